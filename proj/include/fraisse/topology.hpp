#ifndef FRAISSE_TOPOLOGY_HPP
#define FRAISSE_TOPOLOGY_HPP

#include <fraisse/builder.hpp>

#include <functional>
#include <random>

namespace fraisse {

// The basic open O_B: all structures whose restriction to the anchor's
// domain equals the anchor.
struct BasicOpen {
    Structure anchor;
};

// A member of one of the two dense families of the genericity theorem.
struct DenseSetDescriptor {
    enum class Kind { age, ext };
    Kind kind = Kind::age;
    Structure age_a;   // Kind::age: the structure A of F_A
    ExtensionTask task; // Kind::ext: the quadruple of F_{A1,A2,a,b}

    static DenseSetDescriptor age(Structure a);
    static DenseSetDescriptor ext(ExtensionTask t);
    std::string annotation(const FraisseClass& cls) const;
};

// A chain seeded at B whose every stage restricts to B: the constructive
// witness that O_B is nonempty.
ChainState witness_nonempty(std::shared_ptr<const FraisseClass> cls, const Structure& b,
                            std::uint64_t steps);

// Restriction equality of s against the anchor; errors when the anchor's
// domain is not covered by s.
bool member_basic(const FraisseClass& cls, const Structure& s, const BasicOpen& o);

// Openness means a yes is stable under extension; a finite stage never
// answers no.
struct DenseMembership {
    bool yes = false;
    bool vacuous = false;                          // ext case (i)
    std::optional<LabelMap> witness; // age / ext case (ii)
};
DenseMembership member_dense_open(const FraisseClass& cls, const Structure& s,
                                  const DenseSetDescriptor& d);

// Claim 2: O' anchored at a joint extension of the anchor and A, so that
// O' is contained in O intersected with F_A.
BasicOpen refine_into_age(const FraisseClass& cls, const BasicOpen& o, const Structure& a);

// Claim 4: either the vacuous certificate (case a) or an enlarged anchor
// plus the witnessing embedding of A2 with the b-labels placed as the
// images of the corresponding a-elements (case b).
struct ExtRefinement {
    BasicOpen open;
    bool vacuous = false;
    LabelMap witness; // a2 -> anchor, empty when vacuous
};
ExtRefinement refine_into_ext(const FraisseClass& cls, const BasicOpen& o,
                              const ExtensionTask& task);

// A dense-open set with its constructive refinement function.
struct DenseOpenOracle {
    DenseSetDescriptor descriptor;
    std::function<BasicOpen(const BasicOpen&)> refine;
};
DenseOpenOracle oracle_for(std::shared_ptr<const FraisseClass> cls, DenseSetDescriptor d);

// The Prop. 2.4 constructor: alternately refines through the oracles
// (cycled) and absorbs the next natural label; checks every refinement's
// nesting and certificate.
ChainState baire_intersect(std::shared_ptr<const FraisseClass> cls, const BasicOpen& seed,
                           const std::vector<DenseOpenOracle>& oracles, std::uint64_t rounds);

// The canonical descriptor stream of the builder strategy: AgeSet descriptors
// from the class enumeration interleaved 1:1 with ExtSet descriptors from the
// task stream. Skips exhausted indices; deterministic.
class DescriptorStream {
public:
    explicit DescriptorStream(std::shared_ptr<const FraisseClass> cls);
    DenseSetDescriptor next();

private:
    std::shared_ptr<const FraisseClass> cls_;
    std::shared_ptr<const TaskStream> tasks_;
    std::uint64_t turn_ = 0;
    std::size_t age_idx_ = 0;
    std::uint64_t ext_code_ = 0;
};

struct GameRound {
    std::string player; // "adversary" | "builder"
    Structure anchor;
    std::string annotation;
};

struct GameTranscript {
    std::vector<GameRound> rounds;
    ChainState final_chain;
    nlohmann::json to_json() const;
};

using Adversary = std::function<BasicOpen(const BasicOpen&)>;

// Alternates adversary moves (validated) with the builder strategy over the
// canonical descriptor stream, starting from the seed anchor.
GameTranscript play_banach_mazur(std::shared_ptr<const FraisseClass> cls,
                                 const BasicOpen& seed, const Adversary& adversary,
                                 std::uint64_t rounds);

// Deterministic in `seed`: each move is either one strict extension or one
// age refinement by a small enumerated structure (low bit of the next draw).
Adversary adversary_random(std::shared_ptr<const FraisseClass> cls, std::uint64_t seed);

} // namespace fraisse

#endif
