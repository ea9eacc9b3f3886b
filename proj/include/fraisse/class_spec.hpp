#ifndef FRAISSE_CLASS_SPEC_HPP
#define FRAISSE_CLASS_SPEC_HPP

#include <fraisse/structure.hpp>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fraisse {

struct Amalgam {
    Structure c;
    Embedding g1;
    Embedding g2;
};

struct JointEmbedding {
    Structure d;
    Embedding ga;
    Embedding gb;
};

// The pluggable class contract: amalgamation, joint embedding, hereditary
// closure and a deterministic enumeration of isomorphism types.
//
// All operations are pure functions of their arguments. The enumeration
// memo is the only mutable state and is filled lazily in a fixed order
// (size ascending, canonical form ascending within one size).
class FraisseClass {
public:
    virtual ~FraisseClass() = default;

    const std::string& id() const { return id_; }

    virtual bool is_member(const Structure& s) const = 0;

    // Smallest substructure containing `gens`; rejects the empty set.
    virtual Structure substructure(const Structure& s, std::span<const Label> gens) const = 0;

    // Like substructure, but gives up (nullopt) once the closure exceeds
    // `cap` elements. Used by task checks against large chain stages.
    virtual std::optional<Structure> substructure_capped(const Structure& s,
                                                         std::span<const Label> gens,
                                                         std::uint64_t cap) const;

    virtual bool is_embedding(const Embedding& e) const = 0;

    // All label maps a.domain -> b.domain that are embeddings and agree with
    // `pins`, in lexicographic order on (sorted source labels -> images).
    // Stops after `limit` results (0 = no limit).
    virtual std::vector<LabelMap> embeddings_extending(
        const Structure& a, const Structure& b,
        const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const = 0;

    std::vector<Embedding> all_embeddings(const Structure& a, const Structure& b) const;

    virtual CanonicalForm canonicalize(const Structure& s) const = 0;

    virtual Amalgam amalgamate(const Structure& a, const Embedding& h1,
                               const Embedding& h2) const = 0;

    virtual JointEmbedding joint_embed(const Structure& a, const Structure& b) const = 0;

    virtual Structure strict_extend(const Structure& s) const = 0;

    // Size measure used by the enumeration: |domain| for relational classes,
    // group order / field size for the algebraic ones.
    virtual std::uint64_t structure_size(const Structure& s) const { return domain_size(s); }

    // idx-th structure of the canonical enumeration (one representative per
    // isomorphism type, labels 0..k-1). Throws ContractViolation once the
    // class's configured size cap is exhausted.
    const Structure& enumerated(std::size_t idx) const;

    // Number of types within the configured cap, or SIZE_MAX when the cap
    // has not been reached yet by the lazy enumeration.
    std::size_t enumeration_count_so_far() const { return memo_.size(); }
    bool enumeration_exhausted() const { return exhausted_; }

    std::vector<Structure> enumerate_up_to(std::uint64_t size_bound) const;

    // Canonical generating tuple: full sorted domain for relational classes,
    // lexicographically smallest minimal generating tuple otherwise.
    virtual std::vector<Label> generating_tuple(const Structure& s) const = 0;

    virtual Structure relabel(const Structure& s, const LabelMap& pi) const = 0;

protected:
    explicit FraisseClass(std::string id) : id_(std::move(id)) {}

    // Appends all types of the next size bucket to memo, in canonical order.
    // Sets *done when the class's cap is exhausted.
    virtual void enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const = 0;

private:
    std::string id_;
    mutable std::vector<Structure> memo_;
    mutable bool exhausted_ = false;
};

// Parses a class id and builds the class:
//   graph | kfree:<n> | order | qmetric:<q>:<Dmax> | abelian[:order_cap]
//   | field:<p>[:degree_cap]
std::shared_ptr<const FraisseClass> make_class(const std::string& id);

// Shared helpers ------------------------------------------------------------

// Generic backtracking embedding search for explicit-domain structures.
// `ok(partial, src, dst)` checks consistency of adding src->dst.
std::vector<LabelMap> backtrack_embeddings(
    const std::vector<Label>& src_domain, const std::vector<Label>& dst_domain,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit,
    const std::function<bool(const LabelMap&, Label, Label)>& ok);

// Label assignment policy shared by amalgamate/joint_embed: B1 keeps its
// labels, B2 elements keep theirs when free, everything else gets the
// smallest unused naturals in canonical element order.
class LabelAllocator {
public:
    explicit LabelAllocator(const std::set<Label>& used) : used_(used) {}
    Label fresh() {
        while (used_.count(next_)) ++next_;
        used_.insert(next_);
        return next_;
    }
    bool take(Label l) { return used_.insert(l).second; }

private:
    std::set<Label> used_;
    Label next_ = 0;
};

// Domain merge used by the relational amalgamations: g1 is the identity on
// B1, glued B2 points follow h1 o h2^{-1}, other B2 points keep their label
// when it is free and get the smallest unused natural otherwise.
struct MergePlan {
    std::vector<Label> domain; // sorted union
    LabelMap g2; // B2 -> C
};
MergePlan amalgam_label_plan(const Structure& a, const Embedding& h1, const Embedding& h2);
MergePlan joint_label_plan(const Structure& b1, const Structure& b2);

// Shared precondition checks for amalgamate(a, h1, h2).
void check_amalgam_inputs(const FraisseClass& cls, const Structure& a,
                          const Embedding& h1, const Embedding& h2);

} // namespace fraisse

#endif
