#ifndef FRAISSE_GRAPH_CLASS_HPP
#define FRAISSE_GRAPH_CLASS_HPP

#include <fraisse/class_spec.hpp>

#include <optional>

namespace fraisse {

// Finite graphs, optionally K_n-free. Amalgamation is free: no edges are
// added between the two extension parts, which preserves clique bounds.
class GraphClass : public FraisseClass {
public:
    GraphClass() : FraisseClass("graph") {}
    explicit GraphClass(unsigned forbidden_clique)
        : FraisseClass("kfree:" + std::to_string(forbidden_clique)),
          forbidden_clique_(forbidden_clique) {}

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
                   std::vector<std::pair<Label, Label>> edges) const;
    std::optional<unsigned> forbidden_clique() const { return forbidden_clique_; }

protected:
    void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const override;

private:
    bool clique_free(const GraphPayload& g, const std::vector<Label>& dom) const;

    std::optional<unsigned> forbidden_clique_;
    mutable std::uint64_t next_bucket_size_ = 1;
};

// The explicit random graph on {0,..,k-1}: i ~ j (i < j) iff bit i of j is 1.
Structure rado_oracle(std::uint64_t k);
bool rado_adjacent(Label i, Label j);

// A vertex of G adjacent to every member of `u` and to none of `v`.
std::optional<Label> alice_restaurant_check(const Structure& g,
                                            const std::vector<Label>& u,
                                            const std::vector<Label>& v);

std::string graph_to_dot(const Structure& g);

} // namespace fraisse

#endif
