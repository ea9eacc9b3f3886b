#include <fraisse/builder.hpp>

#include <fraisse/field_class.hpp>
#include <fraisse/json_io.hpp>

#include <algorithm>
#include <numeric>

namespace fraisse {

using nlohmann::json;

namespace {

// m-th distinct `len`-tuple of labels, ordered by (max label, lex).
std::vector<Label> tuple_for_index(std::size_t len, std::uint64_t m) {
    if (len == 0) throw ContractViolation("empty generating tuple in stream");
    for (Label mx = static_cast<Label>(len) - 1;; ++mx) {
        std::vector<Label> t(len, 0);
        while (true) {
            bool distinct = true, has_max = false;
            for (std::size_t i = 0; i < len && distinct; ++i) {
                if (t[i] == mx) has_max = true;
                for (std::size_t j = i + 1; j < len; ++j)
                    if (t[i] == t[j]) {
                        distinct = false;
                        break;
                    }
            }
            if (distinct && has_max) {
                if (m == 0) return t;
                --m;
            }
            std::size_t i = len;
            while (i > 0) {
                if (++t[i - 1] <= mx) break;
                t[i - 1] = 0;
                --i;
            }
            if (i == 0) break;
        }
    }
}

// Diagonal unpacking of a stream code into (family, tuple index).
std::pair<std::size_t, std::uint64_t> unpack_code(std::uint64_t code) {
    std::uint64_t d = 0;
    while ((d + 1) * (d + 2) / 2 <= code) ++d;
    std::uint64_t r = code - d * (d + 1) / 2;
    return {static_cast<std::size_t>(r), d - r};
}

std::vector<std::pair<Label, Label>> task_pins_a(const ExtensionTask& t) {
    std::vector<std::pair<Label, Label>> pins;
    for (std::size_t i = 0; i < t.a.size(); ++i) pins.emplace_back(t.a[i], t.b[i]);
    return pins;
}

std::vector<std::pair<Label, Label>> task_pins_a2(const ExtensionTask& t) {
    std::vector<std::pair<Label, Label>> pins;
    for (std::size_t i = 0; i < t.a.size(); ++i)
        pins.emplace_back(t.e.map.at(t.a[i]), t.b[i]);
    return pins;
}

} // namespace

const TaskStream::Family& TaskStream::family(std::size_t k) const {
    while (families_.size() <= k) {
        std::size_t idx = families_.size();
        // Pair (i, j), i <= j by enumeration index, ordered by (j, i).
        std::size_t j = 0;
        while ((j + 1) * (j + 2) / 2 <= idx) ++j;
        std::size_t i = idx - j * (j + 1) / 2;
        Family fam;
        try {
            fam.a1 = cls_->enumerated(i);
            fam.a2 = cls_->enumerated(j);
            auto embs = cls_->embeddings_extending(fam.a1, fam.a2, {}, 1);
            if (!embs.empty()) {
                fam.e = embs.front();
                fam.a = cls_->generating_tuple(fam.a1);
                fam.valid = true;
            }
        } catch (const ContractViolation&) {
            // enumeration exhausted; family stays invalid
        }
        families_.push_back(std::move(fam));
    }
    return families_[k];
}

std::optional<ExtensionTask> TaskStream::task_for_code(std::uint64_t code) const {
    auto [k, m] = unpack_code(code);
    const Family& fam = family(k);
    if (!fam.valid) return std::nullopt;
    ExtensionTask t;
    t.a1 = fam.a1;
    t.a2 = fam.a2;
    t.e = Embedding{fam.a1, fam.a2, fam.e};
    t.a = fam.a;
    t.b = tuple_for_index(fam.a.size(), m);
    return t;
}

bool task_applicable(const FraisseClass& cls, const ExtensionTask& task,
                     const Structure& target) {
    if (task.a.size() != task.b.size())
        throw ContractViolation("task tuples a and b differ in length");
    std::set<Label> distinct(task.b.begin(), task.b.end());
    if (distinct.size() != task.b.size()) return false;
    for (Label l : task.b)
        if (!domain_contains(target, l)) return false;
    return !cls.embeddings_extending(task.a1, target, task_pins_a(task), 1).empty();
}

bool task_witnessed(const FraisseClass& cls, const ExtensionTask& task,
                    const Structure& target) {
    for (Label l : task.b)
        if (!domain_contains(target, l)) return false;
    return !cls.embeddings_extending(task.a2, target, task_pins_a2(task), 1).empty();
}

namespace {

// Absorbs every label <= upto into `work` via strict extension.
void absorb_up_to(const FraisseClass& cls, Label upto, Label& allocator, Structure& work) {
    while (allocator <= upto) {
        int guard = 0;
        while (!domain_contains(work, allocator)) {
            work = cls.strict_extend(work);
            if (++guard > 64)
                throw ContractViolation("absorption failed to reach label " +
                                        std::to_string(allocator));
        }
        ++allocator;
    }
}

} // namespace

// Realizes the task against `work` in place; true = realized, false = vacuous.
bool realize_against(const FraisseClass& cls, const ExtensionTask& task, Structure& work) {
    if (!task_applicable(cls, task, work)) return false;
    if (task_witnessed(cls, task, work)) return true; // already present
    if (const auto* fc = dynamic_cast<const FieldClass*>(&cls)) {
        // Field stages grow in place: the lcm-degree extension keeps every
        // existing label bound to the same element, and any embedding of a
        // subfield extends to the bigger subfield.
        std::uint32_t m = std::lcm(fc->degree_of(work), fc->degree_of(task.a2));
        work = fc->extend_stage(work, m);
    } else {
        auto matches = cls.embeddings_extending(task.a1, work, task_pins_a(task), 1);
        Embedding h1{task.a1, work, matches.front()};
        work = cls.amalgamate(task.a1, h1, task.e).c;
    }
    if (!task_witnessed(cls, task, work))
        throw ContractViolation("realized task has no witness in the new stage");
    return true;
}

namespace {

constexpr int kScanBudget = 100000;

std::optional<std::pair<std::uint64_t, ExtensionTask>> pop_task(ChainState& st,
                                                                const Structure& work) {
    auto eligible = [&](const ExtensionTask& t) {
        for (Label l : t.b)
            if (!domain_contains(work, l)) return false;
        return true;
    };
    for (auto it = st.pending.begin(); it != st.pending.end(); ++it) {
        auto t = st.stream->task_for_code(*it);
        if (t && eligible(*t)) {
            std::uint64_t code = *it;
            st.pending.erase(it);
            return {{code, std::move(*t)}};
        }
    }
    for (int scanned = 0; scanned < kScanBudget; ++scanned) {
        std::uint64_t code = st.cursor++;
        auto t = st.stream->task_for_code(code);
        if (!t) continue;
        if (eligible(*t)) return {{code, std::move(*t)}};
        st.pending.insert(code);
    }
    return std::nullopt;
}

} // namespace

ChainState new_builder(std::shared_ptr<const FraisseClass> cls, const Structure& seed) {
    if (!cls->is_member(seed)) throw ContractViolation("seed is not a class member");
    ChainState st;
    st.stream = std::make_shared<TaskStream>(cls);
    st.cls = std::move(cls);
    st.chain.push_back(seed);
    return st;
}

void step(ChainState& st) {
    Structure work = st.top();
    ++st.steps_taken;
    absorb_up_to(*st.cls, st.steps_taken, st.allocator, work);
    auto popped = pop_task(st, work);
    std::optional<LogEntry> entry;
    if (popped) {
        bool realized = realize_against(*st.cls, popped->second, work);
        entry = LogEntry{static_cast<std::int64_t>(popped->first), realized, 0};
    }
    st.chain.push_back(std::move(work));
    if (entry) {
        entry->stage = st.top_stage();
        st.log.push_back(*entry);
    }
}

void run(ChainState& st, std::uint64_t steps) {
    for (std::uint64_t i = 0; i < steps; ++i) step(st);
}

void realize_task(ChainState& st, const ExtensionTask& task) {
    Structure work = st.top();
    for (Label l : task.b)
        if (!domain_contains(work, l))
            throw ContractViolation("injected task references an absent label");
    bool realized = realize_against(*st.cls, task, work);
    st.chain.push_back(std::move(work));
    st.log.push_back(LogEntry{st.next_injected_code--, realized, st.top_stage()});
}

Structure restriction(const ChainState& st, std::span<const Label> labels) {
    for (Label l : labels)
        if (!domain_contains(st.top(), l))
            throw ContractViolation("restriction: unknown label " + std::to_string(l));
    return st.cls->substructure(st.top(), labels);
}

namespace {

// First `limit` labels present in the structure, ascending.
std::vector<Label> label_window(const Structure& s, std::size_t limit) {
    std::vector<Label> out;
    if (domain_is_implicit(s)) {
        for (Label l = 0; out.size() < limit && domain_contains(s, l); ++l) out.push_back(l);
    } else {
        std::vector<Label> dom = domain_labels(s);
        std::sort(dom.begin(), dom.end());
        for (Label l : dom) {
            if (out.size() >= limit) break;
            out.push_back(l);
        }
    }
    return out;
}

void for_each_subset(const std::vector<Label>& pool, std::size_t size,
                     const std::function<void(const std::vector<Label>&)>& fn) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    if (size > pool.size()) return;
    while (true) {
        std::vector<Label> subset(size);
        for (std::size_t i = 0; i < size; ++i) subset[i] = pool[idx[i]];
        fn(subset);
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == pool.size() - size + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

Report verify_age(const ChainState& st, std::uint64_t gen_bound) {
    if (gen_bound < 1) throw ContractViolation("verify_age: gen_bound must be >= 1");
    const Structure& top = st.top();
    std::vector<Label> pool = label_window(top, 1u << 16);
    // Keep the subset count desk-scale; quantify over a prefix when needed.
    std::size_t window = pool.size();
    while (window > gen_bound) {
        double count = 1;
        for (std::uint64_t k = 1; k <= gen_bound; ++k)
            count *= static_cast<double>(window - k + 1) / static_cast<double>(k);
        if (count <= 200000.0) break;
        window = window / 2;
    }
    pool.resize(window);

    Report rep;
    std::uint64_t checked = 0;
    for (std::uint64_t k = 1; k <= gen_bound && k <= pool.size(); ++k) {
        for_each_subset(pool, k, [&](const std::vector<Label>& subset) {
            ++checked;
            auto sub = st.cls->substructure_capped(top, subset, 4096);
            if (!sub) return; // closure beyond desk scale; skipped
            if (!st.cls->is_member(*sub)) {
                std::string detail = "generators";
                for (Label l : subset) detail += " " + std::to_string(l);
                rep.entries.push_back({"age", "fail", detail});
            }
        });
    }
    rep.entries.push_back({"age", "pass",
                           std::to_string(checked) + " substructures over " +
                               std::to_string(pool.size()) + " labels"});
    return rep;
}

SaturationResult verify_saturation(const ChainState& st, const ExtensionTask& task) {
    for (std::size_t i = 0; i < st.chain.size(); ++i) {
        const Structure& stage = st.chain[i];
        bool resident = true;
        for (Label l : task.b)
            if (!domain_contains(stage, l)) {
                resident = false;
                break;
            }
        if (!resident) continue;
        if (!task_applicable(*st.cls, task, stage))
            return {SaturationResult::Status::vacuous, st.stage_base + i};
        if (task_witnessed(*st.cls, task, stage))
            return {SaturationResult::Status::realized, st.stage_base + i};
    }
    return {SaturationResult::Status::not_yet, 0};
}

Report verify_homogeneity(ChainState& st, std::uint64_t size_bound, std::uint64_t window,
                          std::uint64_t budget) {
    if (size_bound < 1 || window < 1)
        throw ContractViolation("verify_homogeneity: bounds must be >= 1");
    Report rep;
    std::vector<Label> pool = label_window(st.top(), window);
    std::uint64_t isos_checked = 0, extensions_checked = 0;

    // One direction of one demand. When the extension is not there yet, the
    // exact one-point demand is injected as a task; the fair schedule is only
    // the last resort.
    auto extendable = [&](const Structure& s1, const LabelMap& phi,
                          Label x) -> bool {
        std::vector<Label> gens(s1.domain.empty() ? domain_labels(s1) : s1.domain);
        gens.push_back(x);
        Structure s1x = st.cls->substructure(st.top(), gens);
        std::vector<std::pair<Label, Label>> pins(phi.begin(), phi.end());
        if (!st.cls->embeddings_extending(s1x, st.top(), pins, 1).empty()) return true;
        ExtensionTask t;
        t.a1 = s1;
        t.a2 = s1x;
        LabelMap ident;
        for (Label l : domain_labels(s1)) {
            ident[l] = l;
            t.a.push_back(l);
            t.b.push_back(phi.at(l));
        }
        t.e = Embedding{s1, s1x, std::move(ident)};
        realize_task(st, t);
        if (!st.cls->embeddings_extending(s1x, st.top(), pins, 1).empty()) return true;
        run(st, budget);
        return !st.cls->embeddings_extending(s1x, st.top(), pins, 1).empty();
    };

    std::vector<std::vector<Label>> subsets;
    for (std::uint64_t k = 1; k <= size_bound && k <= pool.size(); ++k)
        for_each_subset(pool, k, [&](const std::vector<Label>& s) { subsets.push_back(s); });

    for (const auto& t1 : subsets)
        for (const auto& t2 : subsets) {
            if (t1.size() != t2.size()) continue;
            Structure s1 = st.cls->substructure(st.top(), t1);
            Structure s2 = st.cls->substructure(st.top(), t2);
            if (st.cls->structure_size(s1) != st.cls->structure_size(s2)) continue;
            for (const auto& phi : st.cls->embeddings_extending(s1, s2, {}, 0)) {
                ++isos_checked;
                LabelMap inv;
                for (const auto& [k2, v] : phi) inv[v] = k2;
                for (Label x : pool) {
                    if (domain_contains(s1, x)) continue;
                    ++extensions_checked;
                    if (!extendable(s1, phi, x))
                        rep.entries.push_back(
                            {"homogeneity", "fail",
                             "forward extension by " + std::to_string(x) + " failed"});
                }
                for (Label x : pool) {
                    if (domain_contains(s2, x)) continue;
                    ++extensions_checked;
                    if (!extendable(s2, inv, x))
                        rep.entries.push_back(
                            {"homogeneity", "fail",
                             "backward extension by " + std::to_string(x) + " failed"});
                }
            }
        }
    rep.entries.push_back({"homogeneity", "pass",
                           std::to_string(isos_checked) + " isomorphisms, " +
                               std::to_string(extensions_checked) + " one-point demands"});
    return rep;
}

nlohmann::json Report::to_json() const {
    json out = json::array();
    for (const auto& e : entries)
        out.push_back(json{{"check", e.check}, {"status", e.status}, {"detail", e.detail}});
    return out;
}

json chain_state_to_json(const ChainState& st) {
    json log = json::array();
    for (const auto& e : st.log)
        log.push_back(json::array({e.code, e.realized ? "realized" : "vacuous", e.stage}));
    return json{{"class", st.cls->id()},
                {"top", structure_to_json(st.top())},
                {"log", log},
                {"cursor", st.cursor},
                {"pending", std::vector<std::uint64_t>(st.pending.begin(), st.pending.end())},
                {"allocator", st.allocator},
                {"steps", st.steps_taken},
                {"stage_base", st.top_stage()},
                {"next_injected", st.next_injected_code}};
}

ChainState chain_state_from_json(const json& j) {
    ChainState st;
    st.cls = make_class(j.at("class").get<std::string>());
    st.stream = std::make_shared<TaskStream>(st.cls);
    Structure top = structure_from_json(j.at("top"));
    if (!st.cls->is_member(top)) throw UsageError("saved top structure fails membership");
    st.chain.push_back(std::move(top));
    for (const auto& e : j.at("log")) {
        LogEntry entry;
        entry.code = e.at(0).get<std::int64_t>();
        std::string kind = e.at(1).get<std::string>();
        if (kind != "realized" && kind != "vacuous")
            throw UsageError("bad realization log entry: " + kind);
        entry.realized = kind == "realized";
        entry.stage = e.at(2).get<std::size_t>();
        st.log.push_back(entry);
    }
    st.cursor = j.at("cursor").get<std::uint64_t>();
    for (const auto& c : j.at("pending")) st.pending.insert(c.get<std::uint64_t>());
    st.allocator = j.at("allocator").get<Label>();
    st.steps_taken = j.at("steps").get<std::uint64_t>();
    st.stage_base = j.at("stage_base").get<std::uint64_t>();
    st.next_injected_code = j.at("next_injected").get<std::int64_t>();
    return st;
}

} // namespace fraisse
