#ifndef FRAISSE_QMETRIC_CLASS_HPP
#define FRAISSE_QMETRIC_CLASS_HPP

#include <fraisse/class_spec.hpp>

namespace fraisse {

// Finite rational metric spaces with distances from the fixed menu
// {k/q : 1 <= k <= q*Dmax}. Amalgamation is shortest-path with clamping
// at Dmax; joint embedding places the parts at distance Dmax.
class QMetricClass : public FraisseClass {
public:
    QMetricClass(std::uint64_t q, std::uint64_t dmax)
        : FraisseClass("qmetric:" + std::to_string(q) + ":" + std::to_string(dmax)),
          q_(q), dmax_(dmax) {
        if (q < 1 || dmax < 1) throw UsageError("qmetric requires q >= 1 and Dmax >= 1");
        menu_frac_.reserve(q * dmax + 1);
        for (std::uint64_t k = 0; k <= q * dmax; ++k)
            menu_frac_.emplace_back(static_cast<std::int64_t>(k),
                                    static_cast<std::int64_t>(q));
    }

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

    Structure make(std::vector<Label> domain,
                   std::map<std::pair<Label, Label>, Frac> dist) const;

    std::uint64_t q() const { return q_; }
    Frac dmax() const { return Frac(static_cast<std::int64_t>(dmax_), 1); }
    bool in_menu(const Frac& f) const;

protected:
    void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const override;

private:
    std::uint64_t q_;
    std::uint64_t dmax_;
    // menu_frac_[k] = Frac(k, q), k in [0, q*Dmax]; avoids re-normalizing
    // rationals in the amalgamation hot path.
    std::vector<Frac> menu_frac_;
    mutable std::uint64_t next_bucket_size_ = 1;
};

// Exhaustive triangle-inequality check over all triples.
bool qmetric_triangle_ok(const Structure& s);

} // namespace fraisse

#endif
