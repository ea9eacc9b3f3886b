#include <fraisse/graph_class.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace fraisse {

namespace {

const GraphPayload& graph_of(const Structure& s) {
    if (const auto* g = std::get_if<GraphPayload>(&s.payload)) return *g;
    throw ContractViolation("expected a graph payload");
}

} // namespace

Structure GraphClass::make(std::vector<Label> domain,
                           std::vector<std::pair<Label, Label>> edges) const {
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    GraphPayload p;
    for (auto [a, b] : edges) {
        if (a > b) std::swap(a, b);
        p.edges.insert({a, b});
    }
    return Structure{id(), std::move(domain), std::move(p)};
}

bool GraphClass::clique_free(const GraphPayload& g, const std::vector<Label>& dom) const {
    if (!forbidden_clique_) return true;
    unsigned n = *forbidden_clique_;
    if (dom.size() < n) return true;
    std::vector<Label> clique;
    std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
        if (clique.size() == n) return true;
        for (std::size_t i = start; i < dom.size(); ++i) {
            Label v = dom[i];
            bool ok = true;
            for (Label u : clique)
                if (!g.adjacent(u, v)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            clique.push_back(v);
            if (rec(i + 1)) return true;
            clique.pop_back();
        }
        return false;
    };
    return !rec(0);
}

bool GraphClass::is_member(const Structure& s) const {
    if (s.class_id != id()) return false;
    const auto* g = std::get_if<GraphPayload>(&s.payload);
    if (g == nullptr) return false;
    if (s.domain.empty()) return false;
    if (!std::is_sorted(s.domain.begin(), s.domain.end())) return false;
    if (std::adjacent_find(s.domain.begin(), s.domain.end()) != s.domain.end()) return false;
    for (const auto& [a, b] : g->edges) {
        if (a >= b) return false; // normalization doubles as irreflexivity
        if (!domain_contains(s, a) || !domain_contains(s, b)) return false;
    }
    return clique_free(*g, s.domain);
}

Structure GraphClass::substructure(const Structure& s, std::span<const Label> gens) const {
    if (gens.empty()) throw ContractViolation("substructure: empty generating set");
    const GraphPayload& g = graph_of(s);
    std::vector<Label> dom(gens.begin(), gens.end());
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    for (Label l : dom)
        if (!domain_contains(s, l))
            throw ContractViolation("substructure: label outside domain");
    GraphPayload sub;
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = i + 1; j < dom.size(); ++j)
            if (g.adjacent(dom[i], dom[j])) sub.edges.insert({dom[i], dom[j]});
    return Structure{id(), std::move(dom), std::move(sub)};
}

bool GraphClass::is_embedding(const Embedding& e) const {
    const GraphPayload& gs = graph_of(e.source);
    const GraphPayload& gt = graph_of(e.target);
    if (e.map.size() != e.source.domain.size()) return false;
    std::set<Label> image;
    for (Label l : e.source.domain) {
        auto it = e.map.find(l);
        if (it == e.map.end()) return false;
        if (!domain_contains(e.target, it->second)) return false;
        if (!image.insert(it->second).second) return false;
    }
    for (std::size_t i = 0; i < e.source.domain.size(); ++i)
        for (std::size_t j = i + 1; j < e.source.domain.size(); ++j) {
            Label a = e.source.domain[i], b = e.source.domain[j];
            if (gs.adjacent(a, b) != gt.adjacent(e.map.at(a), e.map.at(b))) return false;
        }
    return true;
}

std::vector<LabelMap> GraphClass::embeddings_extending(
    const Structure& a, const Structure& b,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const {
    const GraphPayload& ga = graph_of(a);
    const GraphPayload& gb = graph_of(b);
    auto ok = [&](const LabelMap& partial, Label s, Label t) {
        for (const auto& [ps, pt] : partial)
            if (ga.adjacent(ps, s) != gb.adjacent(pt, t)) return false;
        return true;
    };
    return backtrack_embeddings(a.domain, b.domain, pins, limit, ok);
}

CanonicalForm GraphClass::canonicalize(const Structure& s) const {
    const GraphPayload& g = graph_of(s);
    std::size_t n = s.domain.size();
    if (n > 9) throw ContractViolation("canonicalize: graph too large for relabeling search");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    do {
        std::string bits;
        bits.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                bits.push_back(g.adjacent(s.domain[perm[i]], s.domain[perm[j]]) ? '1' : '0');
        if (bits > best) best = std::move(bits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::ostringstream os;
    os << "gr|" << n << "|" << best;
    return CanonicalForm{os.str()};
}

Amalgam GraphClass::amalgamate(const Structure& a, const Embedding& h1,
                               const Embedding& h2) const {
    check_amalgam_inputs(*this, a, h1, h2);
    MergePlan plan = amalgam_label_plan(a, h1, h2);
    GraphPayload pc = graph_of(h1.target);
    for (const auto& [x, y] : graph_of(h2.target).edges) {
        Label cx = plan.g2.at(x), cy = plan.g2.at(y);
        if (cx > cy) std::swap(cx, cy);
        pc.edges.insert({cx, cy});
    }
    Structure c{id(), plan.domain, std::move(pc)};
    LabelMap idmap;
    for (Label l : h1.target.domain) idmap[l] = l;
    return Amalgam{c, Embedding{h1.target, c, std::move(idmap)},
                   Embedding{h2.target, c, plan.g2}};
}

JointEmbedding GraphClass::joint_embed(const Structure& a, const Structure& b) const {
    MergePlan plan = joint_label_plan(a, b);
    GraphPayload pd = graph_of(a);
    for (const auto& [x, y] : graph_of(b).edges) {
        Label cx = plan.g2.at(x), cy = plan.g2.at(y);
        if (cx > cy) std::swap(cx, cy);
        pd.edges.insert({cx, cy});
    }
    Structure d{id(), plan.domain, std::move(pd)};
    LabelMap idmap;
    for (Label l : a.domain) idmap[l] = l;
    return JointEmbedding{d, Embedding{a, d, std::move(idmap)}, Embedding{b, d, plan.g2}};
}

Structure GraphClass::strict_extend(const Structure& s) const {
    Structure vertex = make({0}, {});
    return joint_embed(s, vertex).d;
}

std::vector<Label> GraphClass::generating_tuple(const Structure& s) const {
    return s.domain;
}

Structure GraphClass::relabel(const Structure& s, const LabelMap& pi) const {
    GraphPayload out;
    for (const auto& [x, y] : graph_of(s).edges) {
        Label a = pi.at(x), b = pi.at(y);
        if (a > b) std::swap(a, b);
        out.edges.insert({a, b});
    }
    std::vector<Label> dom;
    dom.reserve(s.domain.size());
    for (Label l : s.domain) dom.push_back(pi.at(l));
    std::sort(dom.begin(), dom.end());
    if (std::adjacent_find(dom.begin(), dom.end()) != dom.end())
        throw ContractViolation("relabel: map not injective");
    return Structure{id(), std::move(dom), std::move(out)};
}

void GraphClass::enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const {
    // Desk-scale brute force; the builder's task stream never consumes
    // buckets past size 6.
    const std::uint64_t kMaxEnumSize = 6;
    std::uint64_t n = next_bucket_size_++;
    if (n > kMaxEnumSize) {
        *done = true;
        return;
    }
    std::vector<Label> dom(n);
    std::iota(dom.begin(), dom.end(), 0);
    std::vector<std::pair<Label, Label>> slots;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) slots.push_back({dom[i], dom[j]});
    std::map<CanonicalForm, Structure> types;
    for (std::uint64_t mask = 0; mask < (1ull << slots.size()); ++mask) {
        std::vector<std::pair<Label, Label>> edges;
        for (std::size_t k = 0; k < slots.size(); ++k)
            if (mask & (1ull << k)) edges.push_back(slots[k]);
        Structure s = make(dom, edges);
        if (!is_member(s)) continue;
        CanonicalForm cf = canonicalize(s);
        types.emplace(std::move(cf), std::move(s));
    }
    for (auto& [cf, s] : types) {
        (void)cf;
        memo.push_back(std::move(s));
    }
}

bool rado_adjacent(Label i, Label j) {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    if (i >= 63) return false; // bit index beyond representable range
    return (j >> i) & 1u;
}

Structure rado_oracle(std::uint64_t k) {
    if (k < 1) throw ContractViolation("rado_oracle: k must be >= 1");
    GraphClass cls;
    std::vector<Label> dom(k);
    std::iota(dom.begin(), dom.end(), 0);
    std::vector<std::pair<Label, Label>> edges;
    for (Label i = 0; i < k; ++i)
        for (Label j = i + 1; j < k; ++j)
            if (rado_adjacent(i, j)) edges.push_back({i, j});
    return cls.make(dom, edges);
}

std::optional<Label> alice_restaurant_check(const Structure& g,
                                            const std::vector<Label>& u,
                                            const std::vector<Label>& v) {
    const GraphPayload& p = std::get<GraphPayload>(g.payload);
    for (Label w : g.domain) {
        if (std::find(u.begin(), u.end(), w) != u.end()) continue;
        if (std::find(v.begin(), v.end(), w) != v.end()) continue;
        bool ok = true;
        for (Label x : u)
            if (!p.adjacent(w, x)) {
                ok = false;
                break;
            }
        if (ok)
            for (Label x : v)
                if (p.adjacent(w, x)) {
                    ok = false;
                    break;
                }
        if (ok) return w;
    }
    return std::nullopt;
}

std::string graph_to_dot(const Structure& g) {
    const GraphPayload& p = std::get<GraphPayload>(g.payload);
    std::ostringstream os;
    os << "graph G {\n";
    for (Label l : g.domain) os << "  v" << l << ";\n";
    for (const auto& [a, b] : p.edges) os << "  v" << a << " -- v" << b << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace fraisse
