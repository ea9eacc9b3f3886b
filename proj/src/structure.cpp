#include <fraisse/structure.hpp>

#include <algorithm>
#include <sstream>

namespace fraisse {

std::string code_to_string(Code c) {
    if (c == 0) return "0";
    std::string out;
    while (c > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
        c /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

Code code_from_string(const std::string& s) {
    if (s.empty()) throw UsageError("empty integer literal");
    Code c = 0;
    for (char ch : s) {
        if (ch < '0' || ch > '9') throw UsageError("bad integer literal: " + s);
        c = c * 10 + static_cast<Code>(ch - '0');
    }
    return c;
}

// ---------------------------------------------------------------------------
// Labeling
// ---------------------------------------------------------------------------

namespace {

// digits(l) in base `base`, dim entries, least significant first.
std::vector<std::uint8_t> lin_digits(std::uint64_t base, std::uint32_t dim, Code v) {
    std::vector<std::uint8_t> d(dim, 0);
    for (std::uint32_t i = 0; i < dim && v > 0; ++i) {
        d[i] = static_cast<std::uint8_t>(v % base);
        v /= base;
    }
    return d;
}

Code lin_apply(const Labeling& lab, const std::vector<std::uint8_t>& mat, Code v) {
    std::vector<std::uint8_t> in = lin_digits(lab.lin_base, lab.lin_dim, v);
    Code out = 0;
    Code mul = 1;
    for (std::uint32_t r = 0; r < lab.lin_dim; ++r) {
        std::uint64_t acc = 0;
        for (std::uint32_t c = 0; c < lab.lin_dim; ++c)
            acc += static_cast<std::uint64_t>(mat[r * lab.lin_dim + c]) * in[c];
        out += Code(acc % lab.lin_base) * mul;
        mul *= lab.lin_base;
    }
    return out;
}

} // namespace

Code labeling_to_code(const Labeling& lab, Label l) {
    auto it = lab.to_code.find(l);
    if (it != lab.to_code.end()) return it->second;
    if (lab.has_linear()) {
        if (Code(l) >= lab.size)
            throw ContractViolation("label not in domain: " + std::to_string(l));
        return lin_apply(lab, lab.lin, Code(l));
    }
    if (!lab.implicit_full)
        throw ContractViolation("label not in domain: " + std::to_string(l));
    if (Code(l) >= lab.size)
        throw ContractViolation("label not in domain: " + std::to_string(l));
    // Rank rule: the i-th non-override label maps to the i-th non-override code.
    Code rank = Code(l);
    for (const auto& [ol, oc] : lab.to_code) {
        (void)oc;
        if (ol < l) --rank;
        else break;
    }
    // Find the rank-th code not used as an override value.
    std::vector<Code> used;
    used.reserve(lab.to_code.size());
    for (const auto& [ol, oc] : lab.to_code) used.push_back(oc);
    std::sort(used.begin(), used.end());
    Code c = rank;
    for (Code u : used) {
        if (u <= c) ++c;
        else break;
    }
    return c;
}

Label labeling_to_label(const Labeling& lab, Code c) {
    for (const auto& [l, oc] : lab.to_code)
        if (oc == c) return l;
    if (lab.has_linear()) {
        if (c >= lab.size)
            throw ContractViolation("code out of range: " + code_to_string(c));
        return static_cast<Label>(lin_apply(lab, lab.lin_inv, c));
    }
    if (!lab.implicit_full)
        throw ContractViolation("code has no label: " + code_to_string(c));
    if (c >= lab.size)
        throw ContractViolation("code out of range: " + code_to_string(c));
    // Invert the rank rule.
    Code rank = c;
    {
        std::vector<Code> used;
        for (const auto& [ol, oc] : lab.to_code) used.push_back(oc);
        std::sort(used.begin(), used.end());
        for (Code u : used) {
            if (u < c) --rank;
        }
    }
    Label l = static_cast<Label>(rank);
    for (const auto& [ol, oc] : lab.to_code) {
        (void)oc;
        if (Code(ol) <= Code(l)) ++l;
        else break;
    }
    return l;
}

bool labeling_has(const Labeling& lab, Label l) {
    if (lab.implicit_full || lab.has_linear()) return Code(l) < lab.size;
    return lab.to_code.count(l) != 0;
}

// ---------------------------------------------------------------------------
// Abelian element arithmetic
// ---------------------------------------------------------------------------

std::vector<Code> abelian_decode(const AbelianPayload& g, Code code) {
    std::vector<Code> t(g.factors.size(), 0);
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        t[i] = code % g.factors[i];
        code /= g.factors[i];
    }
    return t;
}

Code abelian_encode(const AbelianPayload& g, std::span<const Code> tuple) {
    Code code = 0;
    for (std::size_t i = g.factors.size(); i-- > 0;)
        code = code * g.factors[i] + tuple[i];
    return code;
}

Code abelian_add(const AbelianPayload& g, Code a, Code b) {
    Code out = 0, mul = 1;
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        Code f = g.factors[i];
        Code s = (a % f + b % f) % f;
        out += s * mul;
        mul *= f;
        a /= f;
        b /= f;
    }
    return out;
}

Code abelian_neg(const AbelianPayload& g, Code a) {
    Code out = 0, mul = 1;
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        Code f = g.factors[i];
        Code x = a % f;
        out += (x == 0 ? 0 : f - x) * mul;
        mul *= f;
        a /= f;
    }
    return out;
}

Code abelian_scale(const AbelianPayload& g, Code m, Code a) {
    Code out = 0, mul = 1;
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        Code f = g.factors[i];
        out += ((a % f) * (m % f)) % f * mul;
        mul *= f;
        a /= f;
    }
    return out;
}

static Code gcd_code(Code a, Code b) {
    while (b) {
        Code t = a % b;
        a = b;
        b = t;
    }
    return a;
}

static Code lcm_code(Code a, Code b) { return a / gcd_code(a, b) * b; }

Code abelian_element_order(const AbelianPayload& g, Code a) {
    Code ord = 1;
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        Code f = g.factors[i];
        Code x = a % f;
        a /= f;
        Code o = f / gcd_code(f, x == 0 ? f : x);
        ord = lcm_code(ord, o);
    }
    return ord;
}

// ---------------------------------------------------------------------------
// Structure domain accessors
// ---------------------------------------------------------------------------

const Labeling* structure_labeling(const Structure& s) {
    if (const auto* ab = std::get_if<AbelianPayload>(&s.payload)) return &ab->labeling;
    if (const auto* f = std::get_if<FieldPayload>(&s.payload)) return &f->labeling;
    return nullptr;
}

Labeling* structure_labeling(Structure& s) {
    if (auto* ab = std::get_if<AbelianPayload>(&s.payload)) return &ab->labeling;
    if (auto* f = std::get_if<FieldPayload>(&s.payload)) return &f->labeling;
    return nullptr;
}

std::uint64_t domain_size(const Structure& s) {
    if (const Labeling* lab = structure_labeling(s)) {
        if (lab->implicit_full || lab->has_linear())
            return static_cast<std::uint64_t>(lab->size);
        return lab->to_code.size();
    }
    return s.domain.size();
}

bool domain_contains(const Structure& s, Label l) {
    if (const Labeling* lab = structure_labeling(s)) return labeling_has(*lab, l);
    return std::binary_search(s.domain.begin(), s.domain.end(), l);
}

bool domain_is_implicit(const Structure& s) {
    const Labeling* lab = structure_labeling(s);
    return lab != nullptr && (lab->implicit_full || lab->has_linear());
}

std::vector<Label> domain_labels(const Structure& s, std::uint64_t cap) {
    if (const Labeling* lab = structure_labeling(s)) {
        if (lab->implicit_full || lab->has_linear()) {
            if (lab->size > Code(cap))
                throw ContractViolation("domain too large to materialize");
            std::vector<Label> out(static_cast<std::size_t>(lab->size));
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
            return out;
        }
        std::vector<Label> out;
        out.reserve(lab->to_code.size());
        for (const auto& [l, c] : lab->to_code) {
            (void)c;
            out.push_back(l);
        }
        return out;
    }
    return s.domain;
}

std::string frac_to_string(const Frac& f) {
    std::ostringstream os;
    os << f.numerator() << "/" << f.denominator();
    return os.str();
}

Frac frac_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Frac(std::stoll(s), 1);
        return Frac(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw UsageError("bad rational literal: " + s);
    }
}

} // namespace fraisse
