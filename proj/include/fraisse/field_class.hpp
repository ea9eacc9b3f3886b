#ifndef FRAISSE_FIELD_CLASS_HPP
#define FRAISSE_FIELD_CLASS_HPP

#include <fraisse/class_spec.hpp>
#include <fraisse/gfp.hpp>

namespace fraisse {

// Element arithmetic of F_p[x]/(poly) on packed base-p codes.
Code field_add(const FieldPayload& f, Code a, Code b);
Code field_sub(const FieldPayload& f, Code a, Code b);
Code field_mul(const FieldPayload& f, Code a, Code b);
Code field_neg(const FieldPayload& f, Code a);
Code field_pow(const FieldPayload& f, Code a, Code e);
Code field_inv(const FieldPayload& f, Code a);
Code field_frobenius(const FieldPayload& f, Code a);
GfpPoly field_decode(const FieldPayload& f, Code a);
Code field_encode(const FieldPayload& f, const GfpPoly& poly);

// Evaluates an F_p[x] polynomial at a field element.
Code field_eval(const FieldPayload& f, const GfpPoly& poly, Code at);

// Minimal polynomial of an element over F_p (monic).
GfpPoly field_minpoly(const FieldPayload& f, Code a);

// Finite fields of characteristic p. Amalgamation goes into the field of
// lcm degree with a Frobenius twist restoring commutation; chain stages of
// large degree are grown with extend_stage, which keeps old labels attached
// to the same elements via the labeling's linear form.
class FieldClass : public FraisseClass {
public:
    FieldClass(std::uint64_t p, std::uint32_t degree_cap)
        : FraisseClass("field:" + std::to_string(p) +
                       (degree_cap == 16 ? "" : ":" + std::to_string(degree_cap))),
          p_(p), degree_cap_(degree_cap) {
        if (!is_prime_u64(p)) throw UsageError("field characteristic must be prime");
        if (degree_cap < 1) throw UsageError("field degree cap must be >= 1");
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

    // Canonical field: lexicographically smallest monic irreducible,
    // identity labeling. Degree is capped by the configured degree cap.
    Structure make_field(std::uint32_t degree) const;

    // The embedding sending the source generator to the lexicographically
    // smallest root of source.poly in the target; errors on degree
    // non-divisibility.
    Embedding embed(const Structure& fsmall, const Structure& fbig) const;

    // A field of degree new_degree (a multiple of stage's degree) in which
    // every label of `stage` still denotes the same element. Built as a tower
    // extension, so it works far past the enumeration cap.
    Structure extend_stage(const Structure& stage, std::uint32_t new_degree) const;

    Code frobenius(const Structure& f, Code x) const;
    bool frobenius_is_automorphism(const Structure& f) const;

    // Exact number of solutions of x^(p^d) = x, via the Frobenius kernel.
    Code subfield_count(const Structure& f, std::uint32_t d) const;

    // All elements of the subfield of size p^d, sorted by code; requires
    // p^d to be desk-scale.
    std::vector<Code> subfield_elements(const Structure& f, std::uint32_t d) const;

    Code code_of(const Structure& s, Label l) const;
    Label label_of(const Structure& s, Code c) const;
    std::uint32_t degree_of(const Structure& s) const;

    std::uint64_t p() const { return p_; }
    std::uint32_t degree_cap() const { return degree_cap_; }

protected:
    void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const override;

private:
    std::uint64_t p_;
    std::uint32_t degree_cap_;
    mutable std::uint32_t next_degree_ = 1;
};

} // namespace fraisse

#endif
