#ifndef FRAISSE_ABELIAN_CLASS_HPP
#define FRAISSE_ABELIAN_CLASS_HPP

#include <fraisse/class_spec.hpp>
#include <fraisse/snf.hpp>

namespace fraisse {

// Finite abelian groups in invariant-factor form d1 | d2 | ... | dk.
// Amalgamation is the pushout (B1 + B2)/<(h1(a), -h2(a))>, computed with the
// Smith normal form and re-decomposed into the divisibility chain.
class AbelianClass : public FraisseClass {
public:
    explicit AbelianClass(std::uint64_t order_cap)
        : FraisseClass(order_cap == 256 ? "abelian" : "abelian:" + std::to_string(order_cap)),
          order_cap_(order_cap) {
        if (order_cap < 1) throw UsageError("abelian order cap must be >= 1");
    }

    bool is_member(const Structure& s) const override;
    Structure substructure(const Structure& s, std::span<const Label> gens) const override;
    std::optional<Structure> substructure_capped(const Structure& s,
                                                 std::span<const Label> gens,
                                                 std::uint64_t cap) const override;
    bool is_embedding(const Embedding& e) const override;
    std::vector<LabelMap> embeddings_extending(
        const Structure& a, const Structure& b,
        const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const override;
    CanonicalForm canonicalize(const Structure& s) const override;
    Amalgam amalgamate(const Structure& a, const Embedding& h1,
                       const Embedding& h2) const override;
    JointEmbedding joint_embed(const Structure& a, const Structure& b) const override;
    Structure strict_extend(const Structure& s) const override;
    std::uint64_t structure_size(const Structure& s) const override;
    std::vector<Label> generating_tuple(const Structure& s) const override;
    Structure relabel(const Structure& s, const LabelMap& pi) const override;

    // Canonical group with the identity labeling (label = element code).
    Structure make(std::vector<Code> factors) const;

    Code code_of(const Structure& s, Label l) const;
    Label label_of(const Structure& s, Code c) const;

    std::uint64_t order_cap() const { return order_cap_; }

protected:
    void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const override;

private:
    std::uint64_t order_cap_;
    mutable Code next_order_ = 1;
};

// Presentation quotient Z^g / rowspace(relations): invariant factors plus the
// coordinate map onto element codes. Shared by pushouts and subgroup closure.
struct AbelianQuotient {
    std::vector<Code> factors;
    IntMatrix v;               // column-op matrix from the SNF of the relations
    std::vector<Int> diag;     // full diagonal, aligned with v columns
    std::vector<std::size_t> kept; // rows with diag >= 2, in factor order

    Code element(std::span<const Int> coords) const;
};
AbelianQuotient abelian_quotient(std::size_t gens, const IntMatrix& relations);

} // namespace fraisse

#endif
