#ifndef FRAISSE_BUILDER_HPP
#define FRAISSE_BUILDER_HPP

#include <fraisse/class_spec.hpp>

#include <json.hpp>

#include <cstdint>
#include <set>

namespace fraisse {

// One saturation demand: A1 sits inside A2 via the fixed embedding e, the
// tuple a generates A1, and b names where a should land in the chain.
struct ExtensionTask {
    Structure a1;
    Structure a2;
    Embedding e; // a1 -> a2, first in all_embeddings order
    std::vector<Label> a;
    std::vector<Label> b;
};

struct LogEntry {
    std::int64_t code; // stream code; injected tasks get -1, -2, ...
    bool realized = false;
    std::size_t stage = 0; // chain index where the witness lives
};

struct ReportEntry {
    std::string check;
    std::string status; // "pass" | "fail"
    std::string detail;
};

struct Report {
    std::vector<ReportEntry> entries;
    bool passed() const {
        for (const auto& e : entries)
            if (e.status != "pass") return false;
        return true;
    }
    nlohmann::json to_json() const;
};

// The deterministic task stream. Code t unpacks along the diagonal
// (family, tuple-index); a family is a canonical pair (A1, A2) from the
// class enumeration (ordered pairs i <= j by enumeration index, pair order
// (j, i)) together with its first embedding and A1's canonical generating
// tuple; the tuple index enumerates b over distinct labels by (max, lex).
class TaskStream {
public:
    explicit TaskStream(std::shared_ptr<const FraisseClass> cls) : cls_(std::move(cls)) {}

    // The task at stream code `code`, or nullopt when the code names a
    // family without members (exhausted enumeration or no embedding).
    std::optional<ExtensionTask> task_for_code(std::uint64_t code) const;

private:
    struct Family {
        bool valid = false;
        Structure a1, a2;
        LabelMap e;
        std::vector<Label> a;
    };
    const Family& family(std::size_t k) const;

    std::shared_ptr<const FraisseClass> cls_;
    mutable std::vector<Family> families_;
};

// The increasing chain B0 <= B1 <= ... plus the fair schedule state.
// chain[n] is the stage after n steps.
struct ChainState {
    std::shared_ptr<const FraisseClass> cls;
    std::shared_ptr<const TaskStream> stream; // cache; not serialized
    std::vector<Structure> chain;
    std::vector<LogEntry> log;
    std::uint64_t cursor = 0;          // next unexamined stream code
    std::set<std::uint64_t> pending;   // codes seen but waiting for labels
    Label allocator = 0;               // smallest label not yet absorbed
    std::uint64_t steps_taken = 0;
    std::uint64_t stage_base = 0;      // stage-number offset after a reload
    std::int64_t next_injected_code = -1;

    const Structure& top() const { return chain.back(); }
    std::size_t top_stage() const { return stage_base + chain.size() - 1; }
};

ChainState new_builder(std::shared_ptr<const FraisseClass> cls, const Structure& seed);

void step(ChainState& st);
void run(ChainState& st, std::uint64_t steps);

// Realizes an externally supplied task immediately (logged with a negative
// code), outside the fair schedule. Used for targeted demands in tests and
// verification suites.
void realize_task(ChainState& st, const ExtensionTask& task);

Structure restriction(const ChainState& st, std::span<const Label> labels);

Report verify_age(const ChainState& st, std::uint64_t gen_bound);

struct SaturationResult {
    enum class Status { realized, vacuous, not_yet };
    Status status = Status::not_yet;
    std::size_t stage = 0;
};
SaturationResult verify_saturation(const ChainState& st, const ExtensionTask& task);

// One-point extendability of every partial isomorphism between <=size_bound
// generated substructures of the first `window` labels. A missing extension
// is injected as a task; failing that, the chain runs up to `budget` further
// fair steps before the demand counts as failed.
Report verify_homogeneity(ChainState& st, std::uint64_t size_bound, std::uint64_t window,
                          std::uint64_t budget = 64);

nlohmann::json chain_state_to_json(const ChainState& st);
ChainState chain_state_from_json(const nlohmann::json& j);

// Shared by builder and verifiers: does any embedding of `a2` into `target`
// send e(a_i) to b_i? Empty pins mean plain embeddability.
bool task_witnessed(const FraisseClass& cls, const ExtensionTask& task,
                    const Structure& target);
// Is a |-> b a partial isomorphism onto the substructure generated by b?
bool task_applicable(const FraisseClass& cls, const ExtensionTask& task,
                     const Structure& target);
// Realizes `task` against `work` in place (amalgamation, or a label-preserving
// stage extension for fields); true = realized, false = vacuous.
bool realize_against(const FraisseClass& cls, const ExtensionTask& task, Structure& work);

} // namespace fraisse

#endif
