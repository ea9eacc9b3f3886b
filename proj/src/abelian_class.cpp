#include <fraisse/abelian_class.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace fraisse {

namespace {

const AbelianPayload& group_of(const Structure& s) {
    if (const auto* g = std::get_if<AbelianPayload>(&s.payload)) return *g;
    throw ContractViolation("expected an abelian payload");
}

bool chain_ok(const std::vector<Code>& factors) {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] < 2) return false;
        if (i + 1 < factors.size() && factors[i + 1] % factors[i] != 0) return false;
    }
    return true;
}

// Codes of the factor generators e_1, ..., e_k.
std::vector<Code> unit_codes(const AbelianPayload& g) {
    std::vector<Code> units;
    Code mul = 1;
    for (Code f : g.factors) {
        units.push_back(mul);
        mul *= f;
    }
    return units;
}

// Relation lattice of the map Z^r -> G sending the i-th basis vector to
// gens[i]: rows form a basis of {n : sum n_i gens_i = 0}. Computed from the
// kernel of [coords(gens) | diag(factors)] over Z.
IntMatrix relation_lattice(const AbelianPayload& amb, const std::vector<Code>& gens) {
    std::size_t k = amb.factors.size();
    std::size_t r = gens.size();
    IntMatrix a(k, r + k);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Code> c = abelian_decode(amb, gens[i]);
        for (std::size_t j = 0; j < k; ++j) a.at(j, i) = static_cast<Int>(c[j]);
    }
    for (std::size_t j = 0; j < k; ++j) a.at(j, r + j) = static_cast<Int>(amb.factors[j]);
    SnfResult snf = smith_normal_form(a);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < std::min(a.rows, a.cols); ++i)
        if (snf.s.at(i, i) != 0) ++rank;
    IntMatrix rel(a.cols - rank, r);
    for (std::size_t j = rank; j < a.cols; ++j)
        for (std::size_t i = 0; i < r; ++i) rel.at(j - rank, i) = snf.v.at(i, j);
    return rel;
}

Code subgroup_order(const AbelianPayload& amb, const std::vector<Code>& gens) {
    AbelianQuotient q = abelian_quotient(gens.size(), relation_lattice(amb, gens));
    Code o = 1;
    for (Code f : q.factors) o *= f;
    return o;
}

// Breadth-first closure under addition of the generators, tracking integer
// coordinates of each element in terms of them. Returns false past `cap`.
bool closure_with_coords(const AbelianPayload& g, const std::vector<Code>& gens,
                         std::uint64_t cap, std::map<Code, std::vector<Int>>& out) {
    out.clear();
    out[0] = std::vector<Int>(gens.size(), 0);
    std::vector<Code> queue{0};
    while (!queue.empty()) {
        Code x = queue.back();
        queue.pop_back();
        std::vector<Int> base = out.at(x);
        for (std::size_t i = 0; i < gens.size(); ++i) {
            Code y = abelian_add(g, x, gens[i]);
            if (out.count(y)) continue;
            if (out.size() >= cap) return false;
            std::vector<Int> c = base;
            ++c[i];
            out.emplace(y, std::move(c));
            queue.push_back(y);
        }
    }
    return true;
}

std::vector<std::vector<Code>> factor_chains(Code n, Code bound) {
    if (n == 1) return {{}};
    std::vector<std::vector<Code>> out;
    for (Code d = 2; d <= n && d <= bound; ++d) {
        if (n % d != 0 || bound % d != 0) continue;
        for (auto& c : factor_chains(n / d, d)) {
            c.push_back(d);
            out.push_back(std::move(c));
        }
    }
    return out;
}

constexpr std::uint64_t kStageOrderCap = std::uint64_t(1) << 22;
constexpr std::uint64_t kPointwiseCap = 4096;

} // namespace

Code AbelianQuotient::element(std::span<const Int> coords) const {
    if (coords.size() != v.rows) throw ContractViolation("quotient: bad coordinate size");
    Code code = 0;
    Code mul = 1;
    // With S = U R V, the rows of V^{-1} are a basis of Z^g adapted to the
    // relation lattice; the adapted coordinates of x are z = x V.
    for (std::size_t t = 0; t < kept.size(); ++t) {
        std::size_t i = kept[t];
        Int acc = 0;
        for (std::size_t j = 0; j < v.rows; ++j) acc += v.at(j, i) * coords[j];
        Int d = diag[i];
        Int v = acc % d;
        if (v < 0) v += d;
        code += Code(v) * mul;
        mul *= factors[t];
    }
    return code;
}

AbelianQuotient abelian_quotient(std::size_t gens, const IntMatrix& relations) {
    if (relations.cols != gens) throw ContractViolation("quotient: relation width mismatch");
    SnfResult snf = smith_normal_form(relations);
    AbelianQuotient q;
    q.v = snf.v;
    q.diag.assign(gens, 0);
    for (std::size_t i = 0; i < std::min(relations.rows, gens); ++i)
        q.diag[i] = snf.s.at(i, i);
    for (std::size_t i = 0; i < gens; ++i) {
        if (q.diag[i] == 0) throw ContractViolation("quotient is infinite");
        if (q.diag[i] >= 2) {
            q.kept.push_back(i);
            q.factors.push_back(Code(q.diag[i]));
        }
    }
    return q;
}

Structure AbelianClass::make(std::vector<Code> factors) const {
    if (!chain_ok(factors)) throw ContractViolation("make abelian: not a divisor chain");
    AbelianPayload p;
    p.factors = std::move(factors);
    p.labeling.implicit_full = true;
    p.labeling.size = p.order();
    return Structure{id(), {}, std::move(p)};
}

Code AbelianClass::code_of(const Structure& s, Label l) const {
    return labeling_to_code(group_of(s).labeling, l);
}

Label AbelianClass::label_of(const Structure& s, Code c) const {
    return labeling_to_label(group_of(s).labeling, c);
}

std::uint64_t AbelianClass::structure_size(const Structure& s) const {
    return static_cast<std::uint64_t>(group_of(s).order());
}

bool AbelianClass::is_member(const Structure& s) const {
    if (s.class_id != id()) return false;
    const auto* g = std::get_if<AbelianPayload>(&s.payload);
    if (g == nullptr || !s.domain.empty()) return false;
    if (!chain_ok(g->factors)) return false;
    Code order = g->order();
    const Labeling& lab = g->labeling;
    if (lab.has_linear()) return false; // linear labelings are field-only
    if (lab.implicit_full) {
        if (lab.size != order) return false;
        for (const auto& [l, c] : lab.to_code)
            if (Code(l) >= order || c >= order) return false;
        return true;
    }
    if (Code(lab.to_code.size()) != order) return false;
    if (order <= Code(1) << 16) {
        std::set<Code> seen;
        for (const auto& [l, c] : lab.to_code) {
            (void)l;
            if (c >= order || !seen.insert(c).second) return false;
        }
    }
    return true;
}

Structure AbelianClass::substructure(const Structure& s, std::span<const Label> gens) const {
    auto sub = substructure_capped(s, gens, kStageOrderCap);
    if (!sub) throw ContractViolation("substructure: closure exceeds the order cap");
    return *sub;
}

std::optional<Structure> AbelianClass::substructure_capped(const Structure& s,
                                                           std::span<const Label> gens,
                                                           std::uint64_t cap) const {
    if (gens.empty()) throw ContractViolation("substructure: empty generating set");
    const AbelianPayload& g = group_of(s);
    std::vector<Code> gen_codes;
    for (Label l : gens) gen_codes.push_back(code_of(s, l));
    std::map<Code, std::vector<Int>> closure;
    if (!closure_with_coords(g, gen_codes, cap, closure)) return std::nullopt;

    AbelianQuotient q = abelian_quotient(gen_codes.size(), relation_lattice(g, gen_codes));
    Code order = 1;
    for (Code f : q.factors) order *= f;
    if (order != Code(closure.size()))
        throw ContractViolation("substructure: presentation order mismatch");

    AbelianPayload sub;
    sub.factors = q.factors;
    sub.labeling.size = order;
    for (const auto& [code, coords] : closure)
        sub.labeling.to_code[label_of(s, code)] = q.element(coords);
    return Structure{id(), {}, std::move(sub)};
}

bool AbelianClass::is_embedding(const Embedding& e) const {
    const AbelianPayload& gs = group_of(e.source);
    const AbelianPayload& gt = group_of(e.target);
    std::uint64_t n = domain_size(e.source);
    if (n > kPointwiseCap)
        throw ContractViolation("is_embedding: source too large for pointwise check");
    std::vector<Label> dom = domain_labels(e.source);
    if (e.map.size() != dom.size()) return false;
    std::vector<Code> src_codes(dom.size()), img_codes(dom.size());
    std::map<Code, Code> image; // source code -> target code
    for (std::size_t i = 0; i < dom.size(); ++i) {
        auto it = e.map.find(dom[i]);
        if (it == e.map.end() || !domain_contains(e.target, it->second)) return false;
        src_codes[i] = labeling_to_code(gs.labeling, dom[i]);
        img_codes[i] = labeling_to_code(gt.labeling, it->second);
        if (!image.emplace(src_codes[i], img_codes[i]).second) return false;
    }
    std::set<Code> distinct(img_codes.begin(), img_codes.end());
    if (distinct.size() != img_codes.size()) return false;
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = i; j < dom.size(); ++j) {
            Code sum = abelian_add(gs, src_codes[i], src_codes[j]);
            auto it = image.find(sum);
            if (it == image.end()) return false;
            if (it->second != abelian_add(gt, img_codes[i], img_codes[j])) return false;
        }
    return true;
}

std::vector<LabelMap> AbelianClass::embeddings_extending(
    const Structure& a, const Structure& b,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const {
    const AbelianPayload& ga = group_of(a);
    const AbelianPayload& gb = group_of(b);
    if (domain_size(a) > kPointwiseCap)
        throw ContractViolation("embeddings_extending: source too large");
    if (ga.order() > gb.order()) return {};

    LabelMap pin_map;
    for (const auto& [s, t] : pins) {
        if (!domain_contains(a, s)) continue;
        if (!domain_contains(b, t)) return {};
        auto it = pin_map.find(s);
        if (it != pin_map.end() && it->second != t) return {};
        pin_map[s] = t;
    }

    // Generator list: pinned labels first (forced images), then greedily the
    // smallest labels until the closure covers all of `a`.
    std::vector<Label> gen_labels;
    std::vector<Code> gen_codes;
    for (const auto& [s, t] : pin_map) {
        (void)t;
        gen_labels.push_back(s);
        gen_codes.push_back(code_of(a, s));
    }
    std::map<Code, std::vector<Int>> closure;
    closure_with_coords(ga, gen_codes, kPointwiseCap + 1, closure);
    for (Label l : domain_labels(a)) {
        if (closure.size() == static_cast<std::size_t>(ga.order())) break;
        Code c = code_of(a, l);
        if (closure.count(c)) continue;
        gen_labels.push_back(l);
        gen_codes.push_back(c);
        closure_with_coords(ga, gen_codes, kPointwiseCap + 1, closure);
    }
    if (closure.size() != static_cast<std::size_t>(ga.order()))
        throw ContractViolation("embeddings_extending: closure failed");

    IntMatrix rel = relation_lattice(ga, gen_codes);

    // Candidate images per generator. Pinned generators are forced; free ones
    // range over the elements of b of the right order, enumerated inside the
    // subgroup b[order] to keep the search desk-scale.
    std::vector<std::vector<Code>> candidates(gen_codes.size());
    double search = 1.0;
    for (std::size_t i = 0; i < gen_codes.size(); ++i) {
        if (i < pin_map.size()) {
            auto it = pin_map.begin();
            std::advance(it, static_cast<long>(i));
            candidates[i] = {labeling_to_code(gb.labeling, it->second)};
            continue;
        }
        Code want = abelian_element_order(ga, gen_codes[i]);
        // Odometer over the subgroup b[want].
        std::vector<Code> steps, counts;
        Code total = 1;
        for (Code f : gb.factors) {
            Code gcd = std::gcd(static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(want));
            steps.push_back(f / gcd);
            counts.push_back(gcd);
            total *= gcd;
        }
        if (total > Code(1) << 22)
            throw ContractViolation("embeddings_extending: torsion subgroup too large");
        std::vector<Code> idx(gb.factors.size(), 0);
        for (Code it = 0; it < total; ++it) {
            std::vector<Code> tuple(gb.factors.size());
            for (std::size_t j = 0; j < gb.factors.size(); ++j) tuple[j] = idx[j] * steps[j];
            Code cand = abelian_encode(gb, tuple);
            if (abelian_element_order(gb, cand) == want) candidates[i].push_back(cand);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                if (++idx[j] < counts[j]) break;
                idx[j] = 0;
            }
        }
        search *= static_cast<double>(candidates[i].size());
        if (candidates[i].empty()) return {};
    }
    if (search > 5e7) throw ContractViolation("embeddings_extending: search too large");

    // Ordered element list of `a` with coordinates, for building full maps.
    std::vector<std::pair<Code, std::vector<Int>>> elements(closure.begin(), closure.end());

    std::set<LabelMap> found;
    std::vector<Code> images(gen_codes.size(), 0);
    Code order_b = gb.order();
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == gen_codes.size()) {
            // Well-definedness: every lattice relation must map to zero.
            for (std::size_t r = 0; r < rel.rows; ++r) {
                Code acc = 0;
                for (std::size_t j = 0; j < gen_codes.size(); ++j) {
                    Int m = rel.at(r, j) % static_cast<Int>(order_b);
                    if (m < 0) m += static_cast<Int>(order_b);
                    acc = abelian_add(gb, acc, abelian_scale(gb, Code(m), images[j]));
                }
                if (acc != 0) return;
            }
            LabelMap out;
            std::set<Code> img_set;
            for (const auto& [code, coords] : elements) {
                Code img = 0;
                for (std::size_t j = 0; j < gen_codes.size(); ++j)
                    img = abelian_add(gb, img,
                                      abelian_scale(gb, Code(coords[j]), images[j]));
                if (!img_set.insert(img).second) return; // not injective
                out[label_of(a, code)] = labeling_to_label(gb.labeling, img);
            }
            found.insert(std::move(out));
            return;
        }
        for (Code c : candidates[i]) {
            images[i] = c;
            rec(i + 1);
        }
    };
    rec(0);

    std::vector<LabelMap> results(found.begin(), found.end());
    if (limit != 0 && results.size() > limit) results.resize(limit);
    return results;
}

CanonicalForm AbelianClass::canonicalize(const Structure& s) const {
    const AbelianPayload& g = group_of(s);
    std::ostringstream os;
    os << "ab|";
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        if (i) os << ",";
        os << code_to_string(g.factors[i]);
    }
    return CanonicalForm{os.str()};
}

Amalgam AbelianClass::amalgamate(const Structure& a, const Embedding& h1,
                                 const Embedding& h2) const {
    check_amalgam_inputs(*this, a, h1, h2);
    const AbelianPayload& ga = group_of(a);
    const AbelianPayload& g1 = group_of(h1.target);
    const AbelianPayload& g2 = group_of(h2.target);
    std::size_t k = g1.factors.size();
    std::size_t l = g2.factors.size();

    // Pushout presentation: generators of B1 and B2, their order relations,
    // and one glue relation h1(a_t) - h2(a_t) per factor generator of A.
    std::vector<Code> a_units = unit_codes(ga);
    IntMatrix rel(k + l + a_units.size(), k + l);
    for (std::size_t i = 0; i < k; ++i) rel.at(i, i) = static_cast<Int>(g1.factors[i]);
    for (std::size_t i = 0; i < l; ++i) rel.at(k + i, k + i) = static_cast<Int>(g2.factors[i]);
    for (std::size_t t = 0; t < a_units.size(); ++t) {
        Label al = label_of(a, a_units[t]);
        std::vector<Code> c1 = abelian_decode(g1, code_of(h1.target, h1.map.at(al)));
        std::vector<Code> c2 = abelian_decode(g2, code_of(h2.target, h2.map.at(al)));
        for (std::size_t i = 0; i < k; ++i) rel.at(k + l + t, i) = static_cast<Int>(c1[i]);
        for (std::size_t i = 0; i < l; ++i)
            rel.at(k + l + t, k + i) = -static_cast<Int>(c2[i]);
    }
    AbelianQuotient q = abelian_quotient(k + l, rel);

    AbelianPayload gc;
    gc.factors = q.factors;
    Code order_c = gc.order();
    if (order_c > Code(kStageOrderCap))
        throw ContractViolation("abelian amalgam: order exceeds the stage cap");

    // Images of the unit generators; everything else follows by linearity.
    std::vector<Code> img1(k), img2(l);
    {
        std::vector<Int> coords(k + l, 0);
        for (std::size_t i = 0; i < k; ++i) {
            coords[i] = 1;
            img1[i] = q.element(coords);
            coords[i] = 0;
        }
        for (std::size_t i = 0; i < l; ++i) {
            coords[k + i] = 1;
            img2[i] = q.element(coords);
            coords[k + i] = 0;
        }
    }
    auto map1 = [&](Code x) {
        std::vector<Code> c = abelian_decode(g1, x);
        Code out = 0;
        for (std::size_t i = 0; i < k; ++i)
            out = abelian_add(gc, out, abelian_scale(gc, c[i], img1[i]));
        return out;
    };
    auto map2 = [&](Code x) {
        std::vector<Code> c = abelian_decode(g2, x);
        Code out = 0;
        for (std::size_t i = 0; i < l; ++i)
            out = abelian_add(gc, out, abelian_scale(gc, c[i], img2[i]));
        return out;
    };

    // Injectivity: the image subgroup order must match (pushouts of injections
    // are injective; re-verified structurally, and pointwise at desk scale).
    if (subgroup_order(gc, img1) != g1.order())
        throw ContractViolation("abelian amalgam: g1 not injective");
    if (subgroup_order(gc, img2) != g2.order())
        throw ContractViolation("abelian amalgam: g2 not injective");
    for (Label al : domain_labels(a)) {
        Code left = map1(code_of(h1.target, h1.map.at(al)));
        Code right = map2(code_of(h2.target, h2.map.at(al)));
        if (left != right) throw ContractViolation("abelian amalgam: square does not commute");
    }

    // Labels: B1 keeps its labels; B2 labels where free; the rest smallest
    // unused, ascending in element-code order.
    std::map<Code, Label> assigned;
    std::set<Label> used;
    LabelMap g1map, g2map;
    for (Label bl : domain_labels(h1.target, kStageOrderCap)) {
        Code c = map1(code_of(h1.target, bl));
        assigned[c] = bl;
        used.insert(bl);
        g1map[bl] = bl;
    }
    std::vector<Label> pending2;
    for (Label bl : domain_labels(h2.target, kStageOrderCap)) {
        Code c = map2(code_of(h2.target, bl));
        auto it = assigned.find(c);
        if (it != assigned.end()) {
            g2map[bl] = it->second;
        } else if (used.insert(bl).second) {
            assigned[c] = bl;
            g2map[bl] = bl;
        } else {
            pending2.push_back(bl);
        }
    }
    LabelAllocator alloc(used);
    for (Code c = 0; c < order_c; ++c) {
        if (assigned.count(c)) continue;
        assigned[c] = alloc.fresh();
    }
    for (Label bl : pending2) g2map[bl] = assigned.at(map2(code_of(h2.target, bl)));

    gc.labeling.size = order_c;
    for (const auto& [c, bl] : assigned) gc.labeling.to_code[bl] = c;
    Structure c_struct{id(), {}, std::move(gc)};

    Embedding e1{h1.target, c_struct, std::move(g1map)};
    Embedding e2{h2.target, c_struct, std::move(g2map)};
    if (domain_size(h1.target) <= kPointwiseCap && !is_embedding(e1))
        throw ContractViolation("abelian amalgam: g1 fails pointwise verification");
    if (domain_size(h2.target) <= kPointwiseCap && !is_embedding(e2))
        throw ContractViolation("abelian amalgam: g2 fails pointwise verification");
    return Amalgam{c_struct, std::move(e1), std::move(e2)};
}

JointEmbedding AbelianClass::joint_embed(const Structure& a, const Structure& b) const {
    Structure trivial = make({});
    Embedding h1{trivial, a, {{0, label_of(a, 0)}}};
    Embedding h2{trivial, b, {{0, label_of(b, 0)}}};
    // The label 0 of the trivial group is its identity element.
    Amalgam am = amalgamate(trivial, h1, h2);
    return JointEmbedding{am.c, am.g1, am.g2};
}

Structure AbelianClass::strict_extend(const Structure& s) const {
    return joint_embed(s, make({2})).d;
}

std::vector<Label> AbelianClass::generating_tuple(const Structure& s) const {
    const AbelianPayload& g = group_of(s);
    Code order = g.order();
    if (order > Code(kPointwiseCap))
        throw ContractViolation("generating_tuple: structure too large");
    if (g.factors.empty()) return {label_of(s, 0)};
    std::size_t k = g.factors.size();
    Code exponent = g.factors.back();
    std::vector<Label> labels = domain_labels(s);
    std::sort(labels.begin(), labels.end());

    std::vector<Label> tuple;
    std::vector<Code> codes;
    std::function<bool(Code)> rec = [&](Code span_order) -> bool {
        if (tuple.size() == k) return span_order == order;
        Code budget = span_order;
        for (std::size_t t = tuple.size() + 1; t < k; ++t) budget *= exponent;
        for (Label l : labels) {
            Code c = code_of(s, l);
            codes.push_back(c);
            Code next_span = subgroup_order(g, codes);
            if (next_span > span_order && next_span * (budget / span_order) >= order) {
                tuple.push_back(l);
                if (rec(next_span)) return true;
                tuple.pop_back();
            }
            codes.pop_back();
        }
        return false;
    };
    if (!rec(1)) throw ContractViolation("generating_tuple: search failed");
    return tuple;
}

Structure AbelianClass::relabel(const Structure& s, const LabelMap& pi) const {
    const AbelianPayload& g = group_of(s);
    if (g.order() > Code(1) << 20)
        throw ContractViolation("relabel: structure too large to materialize");
    AbelianPayload out;
    out.factors = g.factors;
    out.labeling.size = g.order();
    std::set<Label> seen;
    for (Label l : domain_labels(s)) {
        Label nl = pi.at(l);
        if (!seen.insert(nl).second) throw ContractViolation("relabel: map not injective");
        out.labeling.to_code[nl] = code_of(s, l);
    }
    return Structure{id(), {}, std::move(out)};
}

void AbelianClass::enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const {
    Code n = next_order_++;
    if (n > Code(order_cap_)) {
        *done = true;
        return;
    }
    std::vector<std::pair<CanonicalForm, Structure>> bucket;
    for (auto& chain : factor_chains(n, n)) {
        Structure s = make(chain);
        bucket.emplace_back(canonicalize(s), std::move(s));
    }
    std::sort(bucket.begin(), bucket.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [cf, s] : bucket) {
        (void)cf;
        memo.push_back(std::move(s));
    }
}

} // namespace fraisse
