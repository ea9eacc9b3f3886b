#include <fraisse/qmetric_class.hpp>

#include <algorithm>
#include <boost/container/small_vector.hpp>
#include <functional>
#include <numeric>
#include <sstream>

namespace fraisse {

namespace {

const QMetricPayload& metric_of(const Structure& s) {
    if (const auto* m = std::get_if<QMetricPayload>(&s.payload)) return *m;
    throw ContractViolation("expected a metric payload");
}

} // namespace

Structure QMetricClass::make(std::vector<Label> domain,
                             std::map<std::pair<Label, Label>, Frac> dist) const {
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    QMetricPayload p;
    for (auto& [key, d] : dist) {
        auto [a, b] = key;
        if (a > b) std::swap(a, b);
        p.dist[{a, b}] = d;
    }
    Structure s{id(), std::move(domain), std::move(p)};
    if (!is_member(s)) throw ContractViolation("make qmetric: not a member of the class");
    return s;
}

bool QMetricClass::in_menu(const Frac& f) const {
    if (f.numerator() <= 0) return false;
    if (static_cast<std::uint64_t>(f.denominator()) > q_) return false;
    if (q_ % static_cast<std::uint64_t>(f.denominator()) != 0) return false;
    return f <= dmax();
}

bool QMetricClass::is_member(const Structure& s) const {
    if (s.class_id != id()) return false;
    const auto* p = std::get_if<QMetricPayload>(&s.payload);
    if (p == nullptr || s.domain.empty()) return false;
    std::size_t n = s.domain.size();
    if (p->dist.size() != n * (n - 1) / 2) return false;
    for (const auto& [key, d] : p->dist) {
        if (key.first >= key.second) return false;
        if (!domain_contains(s, key.first) || !domain_contains(s, key.second)) return false;
        if (!in_menu(d)) return false;
    }
    return qmetric_triangle_ok(s);
}

bool qmetric_triangle_ok(const Structure& s) {
    const auto* p = std::get_if<QMetricPayload>(&s.payload);
    if (p == nullptr) return false;
    const auto& dom = s.domain;
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = i + 1; j < dom.size(); ++j) {
            Frac dij = p->distance(dom[i], dom[j]);
            for (std::size_t k = j + 1; k < dom.size(); ++k) {
                Frac dik = p->distance(dom[i], dom[k]);
                Frac djk = p->distance(dom[j], dom[k]);
                if (dij > dik + djk || dik > dij + djk || djk > dij + dik) return false;
            }
        }
    return true;
}

Structure QMetricClass::substructure(const Structure& s, std::span<const Label> gens) const {
    if (gens.empty()) throw ContractViolation("substructure: empty generating set");
    const QMetricPayload& p = metric_of(s);
    std::vector<Label> dom(gens.begin(), gens.end());
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    for (Label l : dom)
        if (!domain_contains(s, l))
            throw ContractViolation("substructure: label outside domain");
    QMetricPayload sub;
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = i + 1; j < dom.size(); ++j)
            sub.dist[{dom[i], dom[j]}] = p.distance(dom[i], dom[j]);
    return Structure{id(), std::move(dom), std::move(sub)};
}

bool QMetricClass::is_embedding(const Embedding& e) const {
    const QMetricPayload& ps = metric_of(e.source);
    const QMetricPayload& pt = metric_of(e.target);
    std::size_t n = e.source.domain.size();
    if (e.map.size() != n) return false;
    if (ps.dist.size() != n * (n - 1) / 2) return false;
    boost::container::small_vector<Label, 16> img;
    img.reserve(n);
    for (Label l : e.source.domain) {
        auto it = e.map.find(l);
        if (it == e.map.end() || !domain_contains(e.target, it->second)) return false;
        for (Label seen : img)
            if (seen == it->second) return false;
        img.push_back(it->second);
    }
    // A well-formed payload lists exactly the pairs (dom[i], dom[j]), i < j,
    // in lexicographic order, so the entries line up with an index walk.
    auto it = ps.dist.begin();
    bool aligned = true;
    for (std::size_t i = 0; i < n && aligned; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++it) {
            if (it->first != std::make_pair(e.source.domain[i], e.source.domain[j])) {
                aligned = false;
                break;
            }
            if (it->second != pt.distance(img[i], img[j])) return false;
        }
    if (aligned) return true;
    auto image_of = [&](Label l) {
        auto pos = std::lower_bound(e.source.domain.begin(), e.source.domain.end(), l);
        return img[static_cast<std::size_t>(pos - e.source.domain.begin())];
    };
    for (const auto& [key, d] : ps.dist)
        if (d != pt.distance(image_of(key.first), image_of(key.second))) return false;
    return true;
}

std::vector<LabelMap> QMetricClass::embeddings_extending(
    const Structure& a, const Structure& b,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const {
    const QMetricPayload& pa = metric_of(a);
    const QMetricPayload& pb = metric_of(b);
    auto ok = [&](const LabelMap& partial, Label s, Label t) {
        for (const auto& [ps, pt] : partial)
            if (pa.distance(ps, s) != pb.distance(pt, t)) return false;
        return true;
    };
    return backtrack_embeddings(a.domain, b.domain, pins, limit, ok);
}

CanonicalForm QMetricClass::canonicalize(const Structure& s) const {
    const QMetricPayload& p = metric_of(s);
    std::size_t n = s.domain.size();
    if (n > 8) throw ContractViolation("canonicalize: metric space too large");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Frac> best;
    bool have = false;
    do {
        std::vector<Frac> flat;
        flat.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                flat.push_back(p.distance(s.domain[perm[i]], s.domain[perm[j]]));
        if (!have || flat < best) {
            best = std::move(flat);
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::ostringstream os;
    os << "qm|" << n << "|";
    for (const Frac& f : best) os << frac_to_string(f) << ",";
    return CanonicalForm{os.str()};
}

namespace {

// Slow path: general sizes, distances not representable on the menu grid.
// Runs the shared precondition checks itself, so the fast path can defer
// them until it has decided not to fall back.
Amalgam amalgamate_generic(const QMetricClass& cls, const Structure& a,
                           const Embedding& h1, const Embedding& h2) {
    check_amalgam_inputs(cls, a, h1, h2);
    MergePlan plan = amalgam_label_plan(a, h1, h2);
    const QMetricPayload& p1 = metric_of(h1.target);
    const QMetricPayload& p2 = metric_of(h2.target);

    QMetricPayload pc = p1;
    // Distances inside the image of B2.
    for (const auto& [key, d] : p2.dist) {
        Label x = plan.g2.at(key.first), y = plan.g2.at(key.second);
        if (x > y) std::swap(x, y);
        pc.dist[{x, y}] = d;
    }
    // Cross distances: shortest path through the common part, clamped.
    std::vector<Label> only1, only2;
    std::set<Label> glued; // labels of C coming from A
    for (const auto& [x, y] : h1.map) {
        (void)x;
        glued.insert(y);
    }
    for (Label l : h1.target.domain)
        if (!glued.count(l)) only1.push_back(l);
    for (Label l : h2.target.domain) {
        bool in_a = false;
        for (const auto& [x, y] : h2.map)
            if (y == l) {
                in_a = true;
                break;
            }
        if (!in_a) only2.push_back(l);
    }
    for (Label x : only1)
        for (Label y2 : only2) {
            Frac best = cls.dmax();
            for (Label av : a.domain) {
                Frac via = p1.distance(x, h1.map.at(av)) + p2.distance(h2.map.at(av), y2);
                if (via < best) best = via;
            }
            if (!cls.in_menu(best))
                throw ContractViolation("qmetric amalgam: value outside menu for (" +
                                        std::to_string(x) + "," + std::to_string(y2) + ")");
            Label cy = plan.g2.at(y2);
            Label cx = x;
            if (cx > cy) std::swap(cx, cy);
            pc.dist[{cx, cy}] = best;
        }
    Structure c{cls.id(), plan.domain, std::move(pc)};
    if (!qmetric_triangle_ok(c))
        throw ContractViolation("qmetric amalgam: triangle inequality violated");
    LabelMap idmap;
    for (Label l : h1.target.domain) idmap[l] = l;
    return Amalgam{c, Embedding{h1.target, c, std::move(idmap)},
                   Embedding{h2.target, c, plan.g2}};
}

} // namespace

// Fast path for small inputs whose distances all sit on the 1/q grid: the
// whole computation (label plan, shortest-path cross distances, triangle
// check) runs on q-scaled integers in stack arrays, and the output payload
// is emitted in one sorted pass. Semantics match amalgamate_generic exactly.
Amalgam QMetricClass::amalgamate(const Structure& a, const Embedding& h1,
                                 const Embedding& h2) const {
    // Preconditions are re-checked here on the scaled integer matrices
    // instead of through check_amalgam_inputs: the generic is_embedding
    // validation would dominate the per-call cost. Every fallback goes to
    // amalgamate_generic, which runs the shared checks up front.
    if (h1.source != a || h2.source != a)
        throw ContractViolation("amalgamate: embeddings must share the base structure");
    const QMetricPayload& p1 = metric_of(h1.target);
    const QMetricPayload& p2 = metric_of(h2.target);
    const std::vector<Label>& dom1 = h1.target.domain;
    const std::vector<Label>& dom2 = h2.target.domain;
    constexpr std::size_t kFast = 12;
    const std::size_t n1 = dom1.size(), n2 = dom2.size();
    const std::int64_t q = static_cast<std::int64_t>(q_);
    const std::int64_t dscale = q * static_cast<std::int64_t>(dmax_);

    if (n1 > kFast || n2 > kFast) return amalgamate_generic(*this, a, h1, h2);

    // q-scaled distance matrices, indexed by domain position.
    std::int64_t d1[kFast][kFast], d2[kFast][kFast], da[kFast][kFast];
    auto pos = [](const std::vector<Label>& dom, Label l) {
        return static_cast<std::size_t>(
            std::lower_bound(dom.begin(), dom.end(), l) - dom.begin());
    };
    auto load = [&](const QMetricPayload& p, const std::vector<Label>& dom,
                    std::int64_t (&m)[kFast][kFast]) {
        const std::size_t n = dom.size();
        if (p.dist.size() != n * (n - 1) / 2) return false;
        // Well-formed payloads list (dom[i], dom[j]), i < j, lexicographically.
        auto it = p.dist.begin();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++it) {
                const auto& [key, d] = *it;
                if (key != std::make_pair(dom[i], dom[j])) return false;
                const std::int64_t den = d.denominator();
                // den == 1 is the common case; skip the divisions for it.
                std::int64_t scaled;
                if (den == 1) {
                    scaled = d.numerator() * q;
                } else {
                    if (q % den != 0) return false;
                    scaled = d.numerator() * (q / den);
                }
                m[i][j] = m[j][i] = scaled;
            }
        return true;
    };
    const std::size_t na = a.domain.size();
    if (na > kFast) return amalgamate_generic(*this, a, h1, h2);
    if (!load(p1, dom1, d1) || !load(p2, dom2, d2) || !load(metric_of(a), a.domain, da))
        return amalgamate_generic(*this, a, h1, h2);

    // Images of A on both sides, by position; validates both maps in the
    // process (defined exactly on A, injective, images present, distances
    // preserved) — the integer equivalent of is_embedding(h1/h2).
    std::size_t ga1[kFast], ga2[kFast];
    bool glued2[kFast] = {};
    Label glue_c[kFast];
    bool himg1[kFast] = {};
    auto invalid = [] {
        return ContractViolation("amalgamate: invalid embedding input");
    };
    if (h1.map.size() != na || h2.map.size() != na) throw invalid();
    auto it1 = h1.map.begin();
    auto it2 = h2.map.begin();
    for (std::size_t k = 0; k < na; ++k, ++it1, ++it2) {
        Label av = a.domain[k];
        if (it1->first != av || it2->first != av) throw invalid();
        ga1[k] = pos(dom1, it1->second);
        ga2[k] = pos(dom2, it2->second);
        if (ga1[k] >= n1 || dom1[ga1[k]] != it1->second || himg1[ga1[k]]) throw invalid();
        if (ga2[k] >= n2 || dom2[ga2[k]] != it2->second || glued2[ga2[k]]) throw invalid();
        himg1[ga1[k]] = true;
        glued2[ga2[k]] = true;
        glue_c[ga2[k]] = dom1[ga1[k]];
    }
    for (std::size_t k = 0; k < na; ++k)
        for (std::size_t l = k + 1; l < na; ++l)
            if (d1[ga1[k]][ga1[l]] != da[k][l] || d2[ga2[k]][ga2[l]] != da[k][l])
                throw invalid();

    // Label plan: glued B2 points follow h1 o h2^{-1}; other B2 points keep
    // their label when free, otherwise take the smallest unused natural.
    boost::container::small_vector<Label, 2 * kFast> used(dom1.begin(), dom1.end());
    auto in_used = [&](Label l) {
        for (Label u : used)
            if (u == l) return true;
        return false;
    };
    Label g2lab[kFast];
    Label next = 0;
    for (std::size_t j = 0; j < n2; ++j) {
        if (glued2[j]) {
            g2lab[j] = glue_c[j];
        } else if (!in_used(dom2[j])) {
            used.push_back(dom2[j]);
            g2lab[j] = dom2[j];
        } else {
            while (in_used(next)) ++next;
            used.push_back(next);
            g2lab[j] = next;
        }
    }

    // Union domain of C, sorted, and positions of both parts inside it.
    boost::container::small_vector<Label, 2 * kFast> cdom(dom1.begin(), dom1.end());
    for (std::size_t j = 0; j < n2; ++j)
        if (!glued2[j]) cdom.push_back(g2lab[j]);
    std::sort(cdom.begin(), cdom.end());
    const std::size_t nc = cdom.size();
    auto cpos = [&](Label l) {
        return static_cast<std::size_t>(
            std::lower_bound(cdom.begin(), cdom.end(), l) - cdom.begin());
    };
    std::size_t c1[kFast], c2[kFast];
    for (std::size_t i = 0; i < n1; ++i) c1[i] = cpos(dom1[i]);
    for (std::size_t j = 0; j < n2; ++j) c2[j] = cpos(g2lab[j]);

    // Distance matrix of C: B1 part, then B2 part (agreeing on the glue),
    // then shortest-path cross distances clamped at Dmax.
    std::int64_t dc[2 * kFast][2 * kFast];
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = i + 1; j < n1; ++j)
            dc[c1[i]][c1[j]] = dc[c1[j]][c1[i]] = d1[i][j];
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = i + 1; j < n2; ++j)
            dc[c2[i]][c2[j]] = dc[c2[j]][c2[i]] = d2[i][j];
    for (std::size_t i = 0; i < n1; ++i) {
        if (himg1[i]) continue;
        for (std::size_t j = 0; j < n2; ++j) {
            if (glued2[j]) continue;
            std::int64_t best = dscale;
            for (std::size_t k = 0; k < na; ++k) {
                std::int64_t via = d1[i][ga1[k]] + d2[ga2[k]][j];
                if (via < best) best = via;
            }
            if (best < 1)
                throw ContractViolation("qmetric amalgam: value outside menu for (" +
                                        std::to_string(dom1[i]) + "," +
                                        std::to_string(dom2[j]) + ")");
            dc[c1[i]][c2[j]] = dc[c2[j]][c1[i]] = best;
        }
    }
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = i + 1; j < nc; ++j) {
            std::int64_t dij = dc[i][j];
            for (std::size_t k = j + 1; k < nc; ++k)
                if (dij > dc[i][k] + dc[j][k] || dc[i][k] > dij + dc[j][k] ||
                    dc[j][k] > dij + dc[i][k])
                    throw ContractViolation("qmetric amalgam: triangle inequality violated");
        }

    boost::container::small_vector<std::pair<std::pair<Label, Label>, Frac>, 28> centries;
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = i + 1; j < nc; ++j)
            centries.emplace_back(std::make_pair(cdom[i], cdom[j]),
                                  menu_frac_[static_cast<std::size_t>(dc[i][j])]);
    QMetricPayload pc{
        {boost::container::ordered_unique_range, centries.begin(), centries.end()}};
    Structure c{id(), std::vector<Label>(cdom.begin(), cdom.end()), std::move(pc)};
    std::pair<Label, Label> ident[kFast], g2pairs[kFast];
    for (std::size_t i = 0; i < n1; ++i) ident[i] = {dom1[i], dom1[i]};
    for (std::size_t j = 0; j < n2; ++j) g2pairs[j] = {dom2[j], g2lab[j]};
    Amalgam am;
    am.g1 = Embedding{h1.target, c,
                      LabelMap(boost::container::ordered_unique_range, ident, ident + n1)};
    am.g2 = Embedding{h2.target, c,
                      LabelMap(boost::container::ordered_unique_range, g2pairs,
                               g2pairs + n2)};
    am.c = std::move(c);
    return am;
}

JointEmbedding QMetricClass::joint_embed(const Structure& a, const Structure& b) const {
    MergePlan plan = joint_label_plan(a, b);
    QMetricPayload pd = metric_of(a);
    for (const auto& [key, d] : metric_of(b).dist) {
        Label x = plan.g2.at(key.first), y = plan.g2.at(key.second);
        if (x > y) std::swap(x, y);
        pd.dist[{x, y}] = d;
    }
    for (Label x : a.domain)
        for (Label yb : b.domain) {
            Label y = plan.g2.at(yb);
            Label cx = x, cy = y;
            if (cx > cy) std::swap(cx, cy);
            pd.dist[{cx, cy}] = dmax();
        }
    Structure d{id(), plan.domain, std::move(pd)};
    LabelMap idmap;
    for (Label l : a.domain) idmap[l] = l;
    return JointEmbedding{d, Embedding{a, d, std::move(idmap)}, Embedding{b, d, plan.g2}};
}

Structure QMetricClass::strict_extend(const Structure& s) const {
    Structure point = make({0}, {});
    return joint_embed(s, point).d;
}

std::vector<Label> QMetricClass::generating_tuple(const Structure& s) const {
    return s.domain;
}

Structure QMetricClass::relabel(const Structure& s, const LabelMap& pi) const {
    QMetricPayload out;
    for (const auto& [key, d] : metric_of(s).dist) {
        Label a = pi.at(key.first), b = pi.at(key.second);
        if (a > b) std::swap(a, b);
        out.dist[{a, b}] = d;
    }
    std::vector<Label> dom;
    for (Label l : s.domain) dom.push_back(pi.at(l));
    std::sort(dom.begin(), dom.end());
    if (std::adjacent_find(dom.begin(), dom.end()) != dom.end())
        throw ContractViolation("relabel: map not injective");
    return Structure{id(), std::move(dom), std::move(out)};
}

void QMetricClass::enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const {
    const std::uint64_t kMaxEnumSize = 4;
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
    std::vector<Frac> menu;
    for (std::uint64_t k = 1; k <= q_ * dmax_; ++k)
        menu.push_back(Frac(static_cast<std::int64_t>(k), static_cast<std::int64_t>(q_)));

    std::map<CanonicalForm, Structure> types;
    std::map<std::pair<Label, Label>, Frac> dist;
    // Assign slot by slot with triangle pruning against completed triples.
    std::function<void(std::size_t)> rec = [&](std::size_t si) {
        if (si == slots.size()) {
            Structure s = make(dom, dist);
            if (!qmetric_triangle_ok(s)) return;
            types.emplace(canonicalize(s), std::move(s));
            return;
        }
        auto [a, b] = slots[si];
        for (const Frac& d : menu) {
            bool ok = true;
            for (Label c : dom) {
                if (c == a || c == b) continue;
                auto ka = std::minmax(a, c);
                auto kb = std::minmax(b, c);
                auto ita = dist.find({ka.first, ka.second});
                auto itb = dist.find({kb.first, kb.second});
                if (ita == dist.end() || itb == dist.end()) continue;
                if (d > ita->second + itb->second || ita->second > d + itb->second ||
                    itb->second > d + ita->second) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            dist[{a, b}] = d;
            rec(si + 1);
            dist.erase({a, b});
        }
    };
    rec(0);
    for (auto& [cf, s] : types) {
        (void)cf;
        memo.push_back(std::move(s));
    }
}

} // namespace fraisse
