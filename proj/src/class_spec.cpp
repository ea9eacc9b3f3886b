#include <fraisse/class_spec.hpp>

#include <fraisse/abelian_class.hpp>
#include <fraisse/field_class.hpp>
#include <fraisse/graph_class.hpp>
#include <fraisse/order_class.hpp>
#include <fraisse/qmetric_class.hpp>

#include <algorithm>

namespace fraisse {

std::optional<Structure> FraisseClass::substructure_capped(const Structure& s,
                                                           std::span<const Label> gens,
                                                           std::uint64_t cap) const {
    Structure sub = substructure(s, gens);
    if (domain_size(sub) > cap) return std::nullopt;
    return sub;
}

std::vector<Embedding> FraisseClass::all_embeddings(const Structure& a,
                                                    const Structure& b) const {
    std::vector<Embedding> out;
    for (auto& m : embeddings_extending(a, b, {}, 0))
        out.push_back(Embedding{a, b, std::move(m)});
    return out;
}

const Structure& FraisseClass::enumerated(std::size_t idx) const {
    while (memo_.size() <= idx && !exhausted_) {
        bool done = false;
        enumerate_next_bucket(memo_, &done);
        if (done) exhausted_ = true;
    }
    if (idx >= memo_.size())
        throw ContractViolation("enumeration exhausted for class " + id_ + " at index " +
                                std::to_string(idx));
    return memo_[idx];
}

std::vector<Structure> FraisseClass::enumerate_up_to(std::uint64_t size_bound) const {
    std::vector<Structure> out;
    for (std::size_t i = 0;; ++i) {
        if (memo_.size() <= i && exhausted_) break;
        const Structure* s;
        try {
            s = &enumerated(i);
        } catch (const ContractViolation&) {
            break;
        }
        if (structure_size(*s) > size_bound) break;
        out.push_back(*s);
    }
    return out;
}

std::vector<LabelMap> backtrack_embeddings(
    const std::vector<Label>& src_domain, const std::vector<Label>& dst_domain,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit,
    const std::function<bool(const LabelMap&, Label, Label)>& ok) {
    std::vector<LabelMap> results;
    LabelMap pin_map;
    std::set<Label> pinned_targets;
    for (const auto& [s, t] : pins) {
        auto it = pin_map.find(s);
        if (it != pin_map.end()) {
            if (it->second != t) return results; // contradictory pins
            continue;
        }
        if (!pinned_targets.insert(t).second) return results; // not injective
        pin_map[s] = t;
    }

    LabelMap partial;
    std::set<Label> used;
    // Validate pins incrementally in source order so `ok` sees a consistent
    // partial map.
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == src_domain.size()) {
            results.push_back(partial);
            return limit != 0 && results.size() >= limit;
        }
        Label s = src_domain[i];
        auto pin = pin_map.find(s);
        if (pin != pin_map.end()) {
            Label t = pin->second;
            if (used.count(t) || !ok(partial, s, t)) return false;
            partial[s] = t;
            used.insert(t);
            bool stop = rec(i + 1);
            partial.erase(s);
            used.erase(t);
            return stop;
        }
        for (Label t : dst_domain) {
            if (used.count(t) || !ok(partial, s, t)) continue;
            partial[s] = t;
            used.insert(t);
            bool stop = rec(i + 1);
            partial.erase(s);
            used.erase(t);
            if (stop) return true;
        }
        return false;
    };
    rec(0);
    return results;
}

MergePlan amalgam_label_plan(const Structure& a, const Embedding& h1, const Embedding& h2) {
    MergePlan plan;
    std::set<Label> used(h1.target.domain.begin(), h1.target.domain.end());
    // Glued part of B2 maps through A.
    LabelMap glue; // h2(x) -> h1(x)
    for (const auto& [x, y] : h2.map) glue[y] = h1.map.at(x);
    LabelAllocator alloc(used);
    for (Label x : h2.target.domain) {
        auto it = glue.find(x);
        if (it != glue.end()) {
            plan.g2[x] = it->second;
        } else if (alloc.take(x)) {
            plan.g2[x] = x;
        } else {
            plan.g2[x] = alloc.fresh();
        }
    }
    std::set<Label> dom(h1.target.domain.begin(), h1.target.domain.end());
    for (const auto& [x, y] : plan.g2) dom.insert(y);
    plan.domain.assign(dom.begin(), dom.end());
    (void)a;
    return plan;
}

MergePlan joint_label_plan(const Structure& b1, const Structure& b2) {
    MergePlan plan;
    std::set<Label> used(b1.domain.begin(), b1.domain.end());
    LabelAllocator alloc(used);
    for (Label x : b2.domain)
        plan.g2[x] = alloc.take(x) ? x : alloc.fresh();
    std::set<Label> dom(b1.domain.begin(), b1.domain.end());
    for (const auto& [x, y] : plan.g2) dom.insert(y);
    plan.domain.assign(dom.begin(), dom.end());
    return plan;
}

void check_amalgam_inputs(const FraisseClass& cls, const Structure& a,
                          const Embedding& h1, const Embedding& h2) {
    if (h1.source != a || h2.source != a)
        throw ContractViolation("amalgamate: embeddings must share the base structure");
    if (!cls.is_embedding(h1) || !cls.is_embedding(h2))
        throw ContractViolation("amalgamate: invalid embedding input");
}

std::shared_ptr<const FraisseClass> make_class(const std::string& id) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= id.size()) {
        auto colon = id.find(':', pos);
        if (colon == std::string::npos) {
            parts.push_back(id.substr(pos));
            break;
        }
        parts.push_back(id.substr(pos, colon - pos));
        pos = colon + 1;
    }
    auto num = [&](std::size_t i) -> std::uint64_t {
        try {
            return std::stoull(parts.at(i));
        } catch (const std::exception&) {
            throw UsageError("bad class id: " + id);
        }
    };

    const std::string& kind = parts[0];
    if (kind == "graph" && parts.size() == 1) return std::make_shared<GraphClass>();
    if (kind == "kfree" && parts.size() == 2) {
        std::uint64_t n = num(1);
        if (n < 3) throw UsageError("kfree requires n >= 3");
        return std::make_shared<GraphClass>(static_cast<unsigned>(n));
    }
    if (kind == "order" && parts.size() == 1) return std::make_shared<OrderClass>();
    if (kind == "qmetric" && parts.size() == 3)
        return std::make_shared<QMetricClass>(num(1), num(2));
    if (kind == "abelian" && parts.size() <= 2)
        return std::make_shared<AbelianClass>(parts.size() == 2 ? num(1) : 256);
    if (kind == "field" && (parts.size() == 2 || parts.size() == 3))
        return std::make_shared<FieldClass>(num(1), parts.size() == 3
                                                        ? static_cast<std::uint32_t>(num(2))
                                                        : 16u);
    throw UsageError("unknown class id: " + id);
}

} // namespace fraisse
