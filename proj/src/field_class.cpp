#include <fraisse/field_class.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace fraisse {

namespace {

const FieldPayload& field_of(const Structure& s) {
    if (const auto* f = std::get_if<FieldPayload>(&s.payload)) return *f;
    throw ContractViolation("expected a field payload");
}

constexpr std::uint64_t kDeskScale = 1u << 16;
constexpr std::uint64_t kPointwiseCap = 4096;

std::vector<std::uint8_t> code_digits(std::uint64_t p, std::uint32_t n, Code c) {
    std::vector<std::uint8_t> d(n, 0);
    for (std::uint32_t i = 0; i < n && c > 0; ++i) {
        d[i] = static_cast<std::uint8_t>(c % p);
        c /= p;
    }
    return d;
}

Code digits_code(std::uint64_t p, const std::vector<std::uint8_t>& d) {
    Code c = 0;
    for (std::size_t i = d.size(); i-- > 0;) c = c * p + d[i];
    return c;
}

GfpMat columns_mat(std::uint64_t p, const std::vector<std::vector<std::uint8_t>>& cols) {
    if (cols.empty()) return GfpMat(0, 0, p);
    GfpMat m(cols[0].size(), cols.size(), p);
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) m.at(i, j) = cols[j][i];
    return m;
}

// Matrix of x -> x^p in the power basis of the presentation.
GfpMat frobenius_matrix(const FieldPayload& f) {
    std::vector<std::vector<std::uint8_t>> cols;
    Code xi = field_encode(f, GfpPoly{1}); // 1
    Code x = f.degree >= 1 ? field_encode(f, gfp_mod(f.p, GfpPoly{0, 1}, f.poly)) : 0;
    for (std::uint32_t i = 0; i < f.degree; ++i) {
        cols.push_back(code_digits(f.p, f.degree, field_frobenius(f, xi)));
        xi = field_mul(f, xi, x);
    }
    return columns_mat(f.p, cols);
}

GfpMat matrix_power(const GfpMat& m, std::uint32_t e) {
    GfpMat r = GfpMat::identity(m.rows, m.p);
    for (std::uint32_t i = 0; i < e; ++i) r = gfp_matmul(r, m);
    return r;
}

// Roots of a monic irreducible F_p[x]-polynomial inside f, sorted by code.
std::vector<Code> poly_roots(const FieldPayload& f, const GfpPoly& poly) {
    int d = gfp_deg(poly);
    if (d <= 0 || f.degree % static_cast<std::uint32_t>(d) != 0) return {};
    std::vector<Code> roots;
    if (static_cast<std::uint32_t>(d) == f.degree && poly == f.poly) {
        // The presentation generator is a root; the rest is its Frobenius orbit.
        Code r = field_encode(f, gfp_mod(f.p, GfpPoly{0, 1}, f.poly));
        for (int j = 0; j < d; ++j) {
            roots.push_back(r);
            r = field_frobenius(f, r);
        }
    } else {
        // All roots live in the subfield of size p^d.
        GfpMat fr = matrix_power(frobenius_matrix(f), static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i < fr.rows; ++i)
            fr.at(i, i) = static_cast<std::uint8_t>((fr.at(i, i) + f.p - 1) % f.p);
        std::vector<std::vector<std::uint8_t>> basis = gfp_kernel(fr);
        Code combos = 1;
        for (std::size_t i = 0; i < basis.size(); ++i) combos *= f.p;
        if (combos > Code(kDeskScale))
            throw ContractViolation("poly_roots: subfield too large to enumerate");
        std::vector<std::uint8_t> sel(basis.size(), 0);
        for (Code it = 0; it < combos; ++it) {
            std::vector<std::uint8_t> v(f.degree, 0);
            for (std::size_t j = 0; j < basis.size(); ++j)
                for (std::uint32_t r = 0; r < f.degree; ++r)
                    v[r] = static_cast<std::uint8_t>((v[r] + std::uint64_t(sel[j]) * basis[j][r]) %
                                                     f.p);
            Code cand = digits_code(f.p, v);
            if (field_eval(f, poly, cand) == 0) roots.push_back(cand);
            for (std::size_t j = 0; j < sel.size(); ++j) {
                if (std::uint64_t(++sel[j]) < f.p) break;
                sel[j] = 0;
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// Polynomials over a presented field (codes as coefficients), for towers.
// ---------------------------------------------------------------------------

using TowerPoly = std::vector<Code>;

void tower_trim(TowerPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

TowerPoly tower_add(const FieldPayload& k, const TowerPoly& a, const TowerPoly& b) {
    TowerPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = field_add(k, i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    tower_trim(r);
    return r;
}

TowerPoly tower_sub(const FieldPayload& k, const TowerPoly& a, const TowerPoly& b) {
    TowerPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = field_sub(k, i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
    tower_trim(r);
    return r;
}

TowerPoly tower_mul(const FieldPayload& k, const TowerPoly& a, const TowerPoly& b) {
    if (a.empty() || b.empty()) return {};
    TowerPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = field_add(k, r[i + j], field_mul(k, a[i], b[j]));
    }
    tower_trim(r);
    return r;
}

TowerPoly tower_mod(const FieldPayload& k, TowerPoly a, const TowerPoly& m) {
    tower_trim(a);
    if (m.empty()) throw ContractViolation("tower mod by zero");
    Code lead_inv = field_inv(k, m.back());
    while (a.size() >= m.size()) {
        Code q = field_mul(k, a.back(), lead_inv);
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i + 1 < m.size(); ++i)
            a[shift + i] = field_sub(k, a[shift + i], field_mul(k, q, m[i]));
        a.pop_back();
        tower_trim(a);
        if (a.empty()) break;
    }
    return a;
}

TowerPoly tower_gcd(const FieldPayload& k, TowerPoly a, TowerPoly b) {
    tower_trim(a);
    tower_trim(b);
    while (!b.empty()) {
        TowerPoly r = tower_mod(k, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

TowerPoly tower_powmod(const FieldPayload& k, TowerPoly base, Code e, const TowerPoly& m) {
    TowerPoly r{1};
    base = tower_mod(k, base, m);
    while (e > 0) {
        if (e & 1) r = tower_mod(k, tower_mul(k, r, base), m);
        base = tower_mod(k, tower_mul(k, base, base), m);
        e >>= 1;
    }
    return r;
}

// y^(q^t) mod m, q = |k|.
TowerPoly tower_frob_power(const FieldPayload& k, std::uint32_t t, const TowerPoly& m) {
    TowerPoly y = tower_mod(k, TowerPoly{0, 1}, m);
    Code q = k.field_size();
    for (std::uint32_t i = 0; i < t; ++i) y = tower_powmod(k, y, q, m);
    return y;
}

bool tower_irreducible(const FieldPayload& k, const TowerPoly& f) {
    int e = static_cast<int>(f.size()) - 1;
    if (e <= 0) return false;
    if (e == 1) return true;
    TowerPoly y = tower_mod(k, TowerPoly{0, 1}, f);
    if (tower_frob_power(k, static_cast<std::uint32_t>(e), f) != y) return false;
    int rem = e;
    for (int q = 2; q <= rem; ++q) {
        if (rem % q != 0) continue;
        while (rem % q == 0) rem /= q;
        TowerPoly t =
            tower_sub(k, tower_frob_power(k, static_cast<std::uint32_t>(e / q), f), y);
        TowerPoly g = tower_gcd(k, t, f);
        if (g.size() != 1) return false;
    }
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Element arithmetic
// ---------------------------------------------------------------------------

GfpPoly field_decode(const FieldPayload& f, Code a) {
    GfpPoly d = code_digits(f.p, f.degree, a);
    gfp_trim(d);
    return d;
}

Code field_encode(const FieldPayload& f, const GfpPoly& poly) {
    if (static_cast<std::uint32_t>(poly.size()) > f.degree)
        throw ContractViolation("field_encode: residue too long");
    return digits_code(f.p, poly);
}

Code field_add(const FieldPayload& f, Code a, Code b) {
    return field_encode(f, gfp_add(f.p, field_decode(f, a), field_decode(f, b)));
}

Code field_sub(const FieldPayload& f, Code a, Code b) {
    return field_encode(f, gfp_sub(f.p, field_decode(f, a), field_decode(f, b)));
}

Code field_neg(const FieldPayload& f, Code a) { return field_sub(f, 0, a); }

Code field_mul(const FieldPayload& f, Code a, Code b) {
    return field_encode(
        f, gfp_mod(f.p, gfp_mul(f.p, field_decode(f, a), field_decode(f, b)), f.poly));
}

Code field_pow(const FieldPayload& f, Code a, Code e) {
    Code r = field_encode(f, GfpPoly{1});
    while (e > 0) {
        if (e & 1) r = field_mul(f, r, a);
        a = field_mul(f, a, a);
        e >>= 1;
    }
    return r;
}

Code field_inv(const FieldPayload& f, Code a) {
    if (a == 0) throw ContractViolation("field inverse of zero");
    return field_pow(f, a, f.field_size() - 2);
}

Code field_frobenius(const FieldPayload& f, Code a) { return field_pow(f, a, Code(f.p)); }

Code field_eval(const FieldPayload& f, const GfpPoly& poly, Code at) {
    Code acc = 0;
    for (std::size_t i = poly.size(); i-- > 0;)
        acc = field_add(f, field_mul(f, acc, at), Code(poly[i]));
    return acc;
}

GfpPoly field_minpoly(const FieldPayload& f, Code a) {
    std::vector<std::vector<std::uint8_t>> powers;
    Code cur = field_encode(f, GfpPoly{1});
    for (std::uint32_t t = 0;; ++t) {
        std::vector<std::uint8_t> vec = code_digits(f.p, f.degree, cur);
        std::optional<std::vector<std::uint8_t>> sol;
        if (!powers.empty()) sol = gfp_solve(columns_mat(f.p, powers), vec);
        if (sol) {
            GfpPoly m(t + 1, 0);
            for (std::uint32_t i = 0; i < t; ++i)
                m[i] = static_cast<std::uint8_t>((f.p - (*sol)[i]) % f.p);
            m[t] = 1;
            return m;
        }
        if (t == f.degree) throw ContractViolation("minpoly: no dependency found");
        powers.push_back(std::move(vec));
        cur = field_mul(f, cur, a);
    }
}

// ---------------------------------------------------------------------------
// FieldClass
// ---------------------------------------------------------------------------

Code FieldClass::code_of(const Structure& s, Label l) const {
    return labeling_to_code(field_of(s).labeling, l);
}

Label FieldClass::label_of(const Structure& s, Code c) const {
    return labeling_to_label(field_of(s).labeling, c);
}

std::uint32_t FieldClass::degree_of(const Structure& s) const { return field_of(s).degree; }

std::uint64_t FieldClass::structure_size(const Structure& s) const {
    Code sz = field_of(s).field_size();
    if (sz > Code(~std::uint64_t(0)))
        throw ContractViolation("structure_size: field too large");
    return static_cast<std::uint64_t>(sz);
}

Structure FieldClass::make_field(std::uint32_t degree) const {
    if (degree < 1) throw UsageError("field degree must be >= 1");
    if (degree > degree_cap_)
        throw ContractViolation("field size cap exceeded: degree " + std::to_string(degree));
    FieldPayload f;
    f.p = p_;
    f.degree = degree;
    f.poly = gfp_smallest_irreducible(p_, degree);
    f.labeling.implicit_full = true;
    f.labeling.size = f.field_size();
    return Structure{id(), {}, std::move(f)};
}

bool FieldClass::is_member(const Structure& s) const {
    if (s.class_id != id()) return false;
    const auto* f = std::get_if<FieldPayload>(&s.payload);
    if (f == nullptr || !s.domain.empty()) return false;
    if (f->p != p_ || f->degree < 1) return false;
    if (f->poly.size() != f->degree + 1 || f->poly.back() != 1) return false;
    for (std::uint8_t c : f->poly)
        if (std::uint64_t(c) >= p_) return false;
    if (!gfp_is_irreducible(p_, f->poly)) return false;
    Code size = f->field_size();
    const Labeling& lab = f->labeling;
    if (lab.has_linear()) {
        if (lab.lin_base != p_ || lab.lin_dim != f->degree || lab.size != size) return false;
        GfpMat t(f->degree, f->degree, p_), ti(f->degree, f->degree, p_);
        if (lab.lin.size() != lab.lin_inv.size() ||
            lab.lin.size() != std::size_t(f->degree) * f->degree)
            return false;
        std::copy(lab.lin.begin(), lab.lin.end(), t.data.begin());
        std::copy(lab.lin_inv.begin(), lab.lin_inv.end(), ti.data.begin());
        if (gfp_matmul(t, ti).data != GfpMat::identity(f->degree, p_).data) return false;
        return true;
    }
    if (lab.implicit_full) {
        if (lab.size != size) return false;
        for (const auto& [l, c] : lab.to_code)
            if (Code(l) >= size || c >= size) return false;
        return true;
    }
    if (Code(lab.to_code.size()) != size || size > Code(kDeskScale)) return false;
    std::set<Code> seen;
    for (const auto& [l, c] : lab.to_code) {
        (void)l;
        if (c >= size || !seen.insert(c).second) return false;
    }
    return true;
}

std::optional<Structure> FieldClass::substructure_capped(const Structure& s,
                                                         std::span<const Label> gens,
                                                         std::uint64_t cap) const {
    if (gens.empty()) throw ContractViolation("substructure: empty generating set");
    const FieldPayload& f = field_of(s);
    std::uint32_t d = 1;
    for (Label l : gens) {
        Code c = code_of(s, l);
        std::uint32_t dg = static_cast<std::uint32_t>(gfp_deg(field_minpoly(f, c)));
        d = std::lcm(d, dg);
    }
    Code sub_size = 1;
    for (std::uint32_t i = 0; i < d; ++i) sub_size *= p_;
    if (sub_size > Code(cap) || sub_size > Code(kDeskScale)) return std::nullopt;

    std::vector<Code> elems = subfield_elements(s, d);
    // A generator of the subfield and the change of basis onto its powers.
    Code gen = 0;
    GfpPoly m;
    for (Code e : elems) {
        m = field_minpoly(f, e);
        if (static_cast<std::uint32_t>(gfp_deg(m)) == d) {
            gen = e;
            break;
        }
    }
    std::vector<std::vector<std::uint8_t>> gcols;
    Code gp = field_encode(f, GfpPoly{1});
    for (std::uint32_t i = 0; i < d; ++i) {
        gcols.push_back(code_digits(f.p, f.degree, gp));
        gp = field_mul(f, gp, gen);
    }
    GfpMat gmat = columns_mat(f.p, gcols);

    FieldPayload out;
    out.p = p_;
    out.degree = d;
    out.poly = gfp_smallest_irreducible(p_, d);
    out.labeling.size = sub_size;
    std::vector<Code> roots = poly_roots(out, m);
    if (roots.empty()) throw ContractViolation("substructure: lost the generator root");
    Code r = roots.front();
    for (Code e : elems) {
        auto sol = gfp_solve(gmat, code_digits(f.p, f.degree, e));
        if (!sol) throw ContractViolation("substructure: element outside generator span");
        Code img = 0;
        Code rp = field_encode(out, GfpPoly{1});
        for (std::uint32_t i = 0; i < d; ++i) {
            img = field_add(out, img, field_mul(out, Code((*sol)[i]), rp));
            rp = field_mul(out, rp, r);
        }
        out.labeling.to_code[label_of(s, e)] = img;
    }
    return Structure{id(), {}, std::move(out)};
}

Structure FieldClass::substructure(const Structure& s, std::span<const Label> gens) const {
    auto sub = substructure_capped(s, gens, kDeskScale);
    if (!sub) throw ContractViolation("substructure: subfield exceeds desk scale");
    return *sub;
}

bool FieldClass::is_embedding(const Embedding& e) const {
    const FieldPayload& fs = field_of(e.source);
    const FieldPayload& ft = field_of(e.target);
    if (fs.p != ft.p) return false;
    if (domain_size(e.source) > kPointwiseCap)
        throw ContractViolation("is_embedding: source too large for pointwise check");
    std::vector<Label> dom = domain_labels(e.source);
    if (e.map.size() != dom.size()) return false;
    std::vector<Code> src(dom.size()), img(dom.size());
    std::map<Code, Code> image;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        auto it = e.map.find(dom[i]);
        if (it == e.map.end() || !domain_contains(e.target, it->second)) return false;
        src[i] = code_of(e.source, dom[i]);
        img[i] = code_of(e.target, it->second);
        if (!image.emplace(src[i], img[i]).second) return false;
    }
    std::set<Code> distinct(img.begin(), img.end());
    if (distinct.size() != img.size()) return false;
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = i; j < dom.size(); ++j) {
            auto sum = image.find(field_add(fs, src[i], src[j]));
            if (sum == image.end() || sum->second != field_add(ft, img[i], img[j]))
                return false;
            auto prod = image.find(field_mul(fs, src[i], src[j]));
            if (prod == image.end() || prod->second != field_mul(ft, img[i], img[j]))
                return false;
        }
    return true;
}

std::vector<LabelMap> FieldClass::embeddings_extending(
    const Structure& a, const Structure& b,
    const std::vector<std::pair<Label, Label>>& pins, std::size_t limit) const {
    const FieldPayload& fa = field_of(a);
    const FieldPayload& fb = field_of(b);
    if (fb.degree % fa.degree != 0) return {};
    if (fa.field_size() > Code(kPointwiseCap))
        throw ContractViolation("embeddings_extending: source too large");

    LabelMap pin_map;
    for (const auto& [s, t] : pins) {
        if (!domain_contains(a, s)) continue;
        if (!domain_contains(b, t)) return {};
        auto it = pin_map.find(s);
        if (it != pin_map.end() && it->second != t) return {};
        pin_map[s] = t;
    }

    std::vector<Label> dom = domain_labels(a);
    std::sort(dom.begin(), dom.end());
    std::set<LabelMap> found;
    for (Code r : poly_roots(fb, fa.poly)) {
        LabelMap out;
        bool ok = true;
        for (Label l : dom) {
            Code img = field_eval(fb, code_digits(fa.p, fa.degree, code_of(a, l)), r);
            out[l] = label_of(b, img);
        }
        for (const auto& [s, t] : pin_map)
            if (out.at(s) != t) {
                ok = false;
                break;
            }
        if (ok) found.insert(std::move(out));
    }
    std::vector<LabelMap> results(found.begin(), found.end());
    if (limit != 0 && results.size() > limit) results.resize(limit);
    return results;
}

CanonicalForm FieldClass::canonicalize(const Structure& s) const {
    const FieldPayload& f = field_of(s);
    std::ostringstream os;
    os << "fd|" << f.p << "|" << f.degree;
    return CanonicalForm{os.str()};
}

Embedding FieldClass::embed(const Structure& fsmall, const Structure& fbig) const {
    const FieldPayload& fs = field_of(fsmall);
    const FieldPayload& fb = field_of(fbig);
    if (fs.p != fb.p) throw ContractViolation("field_embed: characteristic mismatch");
    if (fb.degree % fs.degree != 0)
        throw ContractViolation("field_embed: degree " + std::to_string(fs.degree) +
                                " does not divide " + std::to_string(fb.degree));
    if (fs.field_size() > Code(kPointwiseCap))
        throw ContractViolation("field_embed: source too large");
    std::vector<Code> roots = poly_roots(fb, fs.poly);
    if (roots.empty()) throw ContractViolation("field_embed: no root of the source poly");
    Code r = roots.front();
    LabelMap map;
    for (Label l : domain_labels(fsmall)) {
        Code img = field_eval(fb, code_digits(fs.p, fs.degree, code_of(fsmall, l)), r);
        map[l] = label_of(fbig, img);
    }
    return Embedding{fsmall, fbig, std::move(map)};
}

Amalgam FieldClass::amalgamate(const Structure& a, const Embedding& h1,
                               const Embedding& h2) const {
    check_amalgam_inputs(*this, a, h1, h2);
    const FieldPayload& f1 = field_of(h1.target);
    const FieldPayload& f2 = field_of(h2.target);
    std::uint32_t m = std::lcm(f1.degree, f2.degree);
    Structure c = make_field(m);
    Embedding g1 = embed(h1.target, c);
    Embedding base = embed(h2.target, c);

    std::vector<Label> a_dom = domain_labels(a);
    for (std::uint32_t j = 0; j < f2.degree; ++j) {
        LabelMap g2map;
        for (const auto& [l, t] : base.map) {
            Code img = code_of(c, t);
            for (std::uint32_t i = 0; i < j; ++i) img = field_frobenius(field_of(c), img);
            g2map[l] = label_of(c, img);
        }
        bool commutes = true;
        for (Label al : a_dom)
            if (g1.map.at(h1.map.at(al)) != g2map.at(h2.map.at(al))) {
                commutes = false;
                break;
            }
        if (commutes) return Amalgam{c, g1, Embedding{h2.target, c, std::move(g2map)}};
    }
    throw ContractViolation("field amalgam: no Frobenius twist commutes");
}

JointEmbedding FieldClass::joint_embed(const Structure& a, const Structure& b) const {
    std::uint32_t m = std::lcm(field_of(a).degree, field_of(b).degree);
    Structure d = make_field(m);
    return JointEmbedding{d, embed(a, d), embed(b, d)};
}

std::vector<Label> FieldClass::generating_tuple(const Structure& s) const {
    const FieldPayload& f = field_of(s);
    Code size = f.field_size();
    for (Label l = 0;; ++l) {
        if (Code(l) >= size) throw ContractViolation("generating_tuple: search failed");
        if (!domain_contains(s, l)) continue;
        Code c = code_of(s, l);
        if (static_cast<std::uint32_t>(gfp_deg(field_minpoly(f, c))) == f.degree) return {l};
    }
}

Structure FieldClass::relabel(const Structure& s, const LabelMap& pi) const {
    const FieldPayload& f = field_of(s);
    if (f.field_size() > Code(kDeskScale))
        throw ContractViolation("relabel: field too large to materialize");
    FieldPayload out;
    out.p = f.p;
    out.degree = f.degree;
    out.poly = f.poly;
    out.labeling.size = f.field_size();
    std::set<Label> seen;
    for (Label l : domain_labels(s)) {
        Label nl = pi.at(l);
        if (!seen.insert(nl).second) throw ContractViolation("relabel: map not injective");
        out.labeling.to_code[nl] = code_of(s, l);
    }
    return Structure{id(), {}, std::move(out)};
}

Code FieldClass::frobenius(const Structure& f, Code x) const {
    return field_frobenius(field_of(f), x);
}

bool FieldClass::frobenius_is_automorphism(const Structure& s) const {
    const FieldPayload& f = field_of(s);
    // Additively bijective: the Frobenius matrix is invertible.
    if (!gfp_inverse(frobenius_matrix(f))) return false;
    // Multiplicative on the power basis; 1 maps to 1.
    std::vector<Code> pows(f.degree), fpows(f.degree);
    Code xi = field_encode(f, GfpPoly{1});
    Code x = field_encode(f, gfp_mod(f.p, GfpPoly{0, 1}, f.poly));
    for (std::uint32_t i = 0; i < f.degree; ++i) {
        pows[i] = xi;
        fpows[i] = field_frobenius(f, xi);
        xi = field_mul(f, xi, x);
    }
    if (fpows[0] != pows[0]) return false;
    for (std::uint32_t i = 0; i < f.degree; ++i)
        for (std::uint32_t j = i; j < f.degree; ++j) {
            Code lhs = field_frobenius(f, field_mul(f, pows[i], pows[j]));
            if (lhs != field_mul(f, fpows[i], fpows[j])) return false;
        }
    return true;
}

Code FieldClass::subfield_count(const Structure& s, std::uint32_t d) const {
    const FieldPayload& f = field_of(s);
    GfpMat fr = matrix_power(frobenius_matrix(f), d);
    for (std::size_t i = 0; i < fr.rows; ++i)
        fr.at(i, i) = static_cast<std::uint8_t>((fr.at(i, i) + f.p - 1) % f.p);
    std::size_t dim = gfp_kernel(fr).size();
    Code count = 1;
    for (std::size_t i = 0; i < dim; ++i) count *= f.p;
    return count;
}

std::vector<Code> FieldClass::subfield_elements(const Structure& s, std::uint32_t d) const {
    const FieldPayload& f = field_of(s);
    GfpMat fr = matrix_power(frobenius_matrix(f), d);
    for (std::size_t i = 0; i < fr.rows; ++i)
        fr.at(i, i) = static_cast<std::uint8_t>((fr.at(i, i) + f.p - 1) % f.p);
    std::vector<std::vector<std::uint8_t>> basis = gfp_kernel(fr);
    Code combos = 1;
    for (std::size_t i = 0; i < basis.size(); ++i) combos *= f.p;
    if (combos > Code(kDeskScale))
        throw ContractViolation("subfield_elements: subfield too large");
    std::vector<Code> out;
    std::vector<std::uint8_t> sel(basis.size(), 0);
    for (Code it = 0; it < combos; ++it) {
        std::vector<std::uint8_t> v(f.degree, 0);
        for (std::size_t j = 0; j < basis.size(); ++j)
            for (std::uint32_t r = 0; r < f.degree; ++r)
                v[r] = static_cast<std::uint8_t>((v[r] + std::uint64_t(sel[j]) * basis[j][r]) %
                                                 f.p);
        out.push_back(digits_code(f.p, v));
        for (std::size_t j = 0; j < sel.size(); ++j) {
            if (std::uint64_t(++sel[j]) < f.p) break;
            sel[j] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Structure FieldClass::strict_extend(const Structure& s) const {
    return extend_stage(s, 2 * field_of(s).degree);
}

Structure FieldClass::extend_stage(const Structure& stage, std::uint32_t new_degree) const {
    const FieldPayload& k = field_of(stage);
    if (new_degree == k.degree) return stage;
    if (new_degree % k.degree != 0 || new_degree < k.degree)
        throw ContractViolation("extend_stage: new degree must be a proper multiple");
    if (static_cast<double>(new_degree) * std::log2(static_cast<double>(p_)) > 120.0)
        throw ContractViolation("extend_stage: field too large to encode");
    std::uint32_t e = new_degree / k.degree;
    std::uint32_t m = new_degree;
    Code q = k.field_size();

    // Lexicographically smallest monic irreducible of degree e over the stage.
    // Irreducibles have density about 1/e, so the scan stays short.
    TowerPoly g;
    for (Code v = 0;; ++v) {
        if (v >= Code(1) << 24)
            throw ContractViolation("extend_stage: irreducible scan exhausted");
        TowerPoly cand(e + 1, 0);
        Code t = v;
        for (std::uint32_t i = 0; i < e && t > 0; ++i) {
            cand[i] = t % q;
            t /= q;
        }
        cand[e] = 1;
        if (cand[0] == 0) continue; // divisible by y
        if (tower_irreducible(k, cand)) {
            g = std::move(cand);
            break;
        }
    }

    // A primitive element w = y + c with a degree-m minimal polynomial, plus
    // the change of basis between tower coordinates and powers of w.
    auto tower_vec = [&](const TowerPoly& t) {
        std::vector<std::uint8_t> v(m, 0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::vector<std::uint8_t> d = code_digits(p_, k.degree, t[i]);
            for (std::uint32_t j = 0; j < k.degree; ++j) v[i * k.degree + j] = d[j];
        }
        return v;
    };
    GfpPoly h;
    GfpMat winv(0, 0, p_);
    bool found = false;
    for (Code c = 0; c < q && !found; ++c) {
        TowerPoly w{c, 1};
        std::vector<std::vector<std::uint8_t>> cols;
        TowerPoly cur{1};
        for (std::uint32_t t = 0; t < m; ++t) {
            cols.push_back(tower_vec(cur));
            cur = tower_mod(k, tower_mul(k, cur, w), g);
        }
        GfpMat wmat = columns_mat(p_, cols);
        auto inv = gfp_inverse(wmat);
        if (!inv) continue;
        auto lam = gfp_solve(wmat, tower_vec(cur)); // cur = w^m
        if (!lam) continue;
        h.assign(m + 1, 0);
        for (std::uint32_t t = 0; t < m; ++t)
            h[t] = static_cast<std::uint8_t>((p_ - (*lam)[t]) % p_);
        h[m] = 1;
        winv = *inv;
        found = true;
    }
    if (!found) throw ContractViolation("extend_stage: no primitive element found");

    FieldPayload out;
    out.p = p_;
    out.degree = m;
    out.poly = h;
    out.labeling.size = out.field_size();

    // E maps old coordinate vectors to new ones: the old basis x^i sits at
    // tower coordinate e_i, so E is the first K columns of winv.
    const Labeling& old = k.labeling;
    if (!old.to_code.empty() && (old.implicit_full || old.has_linear()))
        throw ContractViolation("extend_stage: labeling overrides are unsupported");
    if (old.implicit_full || old.has_linear()) {
        GfpMat t_old(k.degree, k.degree, p_);
        if (old.has_linear())
            std::copy(old.lin.begin(), old.lin.end(), t_old.data.begin());
        else
            t_old = GfpMat::identity(k.degree, p_);
        // First K columns of the new transform: E * T_old.
        std::vector<std::vector<std::uint8_t>> cols;
        for (std::uint32_t jcol = 0; jcol < k.degree; ++jcol) {
            std::vector<std::uint8_t> col(m, 0);
            for (std::uint32_t r = 0; r < m; ++r) {
                std::uint64_t acc = 0;
                for (std::uint32_t i = 0; i < k.degree; ++i)
                    acc += std::uint64_t(winv.at(r, i)) * t_old.at(i, jcol);
                col[r] = static_cast<std::uint8_t>(acc % p_);
            }
            cols.push_back(std::move(col));
        }
        // Complete to an invertible matrix with standard basis vectors.
        for (std::uint32_t i = 0; i < m && cols.size() < m; ++i) {
            std::vector<std::uint8_t> cand(m, 0);
            cand[i] = 1;
            cols.push_back(cand);
            // Keep the candidate only if it is independent of what we have.
            if (!gfp_kernel(columns_mat(p_, cols)).empty()) cols.pop_back();
        }
        if (cols.size() != m)
            throw ContractViolation("extend_stage: basis completion failed");
        GfpMat t_new = columns_mat(p_, cols);
        auto t_new_inv = gfp_inverse(t_new);
        if (!t_new_inv) throw ContractViolation("extend_stage: transform not invertible");
        out.labeling.lin_base = p_;
        out.labeling.lin_dim = m;
        out.labeling.lin = t_new.data;
        out.labeling.lin_inv = t_new_inv->data;
    } else {
        // Explicit small labeling: keep old labels on their images, then the
        // smallest unused labels on the remaining codes in ascending order.
        if (out.labeling.size > Code(kDeskScale))
            throw ContractViolation("extend_stage: explicit labeling too large");
        std::set<Label> used;
        std::set<Code> taken;
        for (const auto& [l, c] : old.to_code) {
            std::vector<std::uint8_t> digs = code_digits(p_, k.degree, c);
            std::vector<std::uint8_t> padded(m, 0);
            std::copy(digs.begin(), digs.end(), padded.begin());
            std::vector<std::uint8_t> img = gfp_matvec(winv, padded);
            Code nc = digits_code(p_, img);
            out.labeling.to_code[l] = nc;
            used.insert(l);
            taken.insert(nc);
        }
        LabelAllocator alloc(used);
        for (Code cdx = 0; cdx < out.labeling.size; ++cdx) {
            if (taken.count(cdx)) continue;
            out.labeling.to_code[alloc.fresh()] = cdx;
        }
    }
    return Structure{id(), {}, std::move(out)};
}

void FieldClass::enumerate_next_bucket(std::vector<Structure>& memo, bool* done) const {
    std::uint32_t d = next_degree_++;
    if (d > degree_cap_) {
        *done = true;
        return;
    }
    memo.push_back(make_field(d));
}

} // namespace fraisse
