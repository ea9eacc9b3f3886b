#ifndef FRAISSE_ORDER_CLASS_HPP
#define FRAISSE_ORDER_CLASS_HPP

#include <fraisse/class_spec.hpp>

namespace fraisse {

// Finite linear orders. Amalgamation merges the two orders over the common
// part; elements incomparable through it are interleaved B1-first per gap.
class OrderClass : public FraisseClass {
public:
    OrderClass() : FraisseClass("order") {}

    bool is_member(const Structure& s) const override;
    Structure substructure(const Structure& s, std::span<const Label> gens) const override;
    bool is_embedding(const Embedding& e) const override;
    std::vector<LabelMap> embeddings_extending(
        const Structure& a, const Structure& b,
        const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const override;
    CanonicalForm canonicalize(const Structure& s) const override;
    Amalgam amalgamate(const Structure& a, const Embedding& h1,
                       const Embedding& h2) const override;
    JointEmbedding joint_embed(const Structure& a, const Structure& b) const override;
    Structure strict_extend(const Structure& s) const override;
    std::vector<Label> generating_tuple(const Structure& s) const override;
    Structure relabel(const Structure& s, const LabelMap& pi) const override;

    // Order given as the label sequence from least to greatest.
    Structure make(std::vector<Label> ascending) const;
    std::vector<Label> ascending(const Structure& s) const;

protected:
    void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const override;

private:
    mutable std::uint64_t next_bucket_size_ = 1;
};

} // namespace fraisse

#endif
