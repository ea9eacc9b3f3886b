#ifndef FRAISSE_STRUCTURE_HPP
#define FRAISSE_STRUCTURE_HPP

#include <fraisse/base.hpp>

#include <boost/container/flat_map.hpp>
#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fraisse {

using Frac = boost::rational<std::int64_t>;

// Small label-to-label maps (embedding maps, relabelings, witnesses) are flat:
// they are tiny, copied a lot, and iterated far more than they are mutated.
using LabelMap = boost::container::flat_map<Label, Label>;

// ---------------------------------------------------------------------------
// Payloads
// ---------------------------------------------------------------------------

// Undirected irreflexive edges, stored normalized (a < b).
struct GraphPayload {
    std::set<std::pair<Label, Label>> edges;

    bool adjacent(Label a, Label b) const {
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        return edges.count({a, b}) != 0;
    }
    bool operator==(const GraphPayload&) const = default;
};

// Total order encoded as rank: label -> position 0..n-1.
struct OrderPayload {
    std::map<Label, std::size_t> rank;

    bool less(Label a, Label b) const { return rank.at(a) < rank.at(b); }
    bool operator==(const OrderPayload&) const = default;
};

// Symmetric distance table over the domain, keys normalized (a < b).
// All values positive rationals from the class's menu. Flat storage keeps
// copies cheap; metric structures stay small.
struct QMetricPayload {
    boost::container::flat_map<std::pair<Label, Label>, Frac> dist;

    Frac distance(Label a, Label b) const {
        if (a == b) return Frac(0);
        if (a > b) std::swap(a, b);
        return dist.at({a, b});
    }
    bool operator==(const QMetricPayload&) const = default;
};

// Label <-> element-code bijection used by the algebraic classes.
//
// Explicit form: to_code holds the whole bijection, domain = its keys.
// Implicit form: domain is [0, size); to_code holds finitely many
// overrides and the remaining labels map to the remaining codes in
// increasing order (rank rule). This keeps huge chain stages finite
// to represent.
//
// Linear form (fields only): domain is [0, size) with size = base^dim and
// label l maps to the code whose base-`base` digit vector is lin * digits(l)
// over F_base. lin/lin_inv are dim x dim row-major matrices. Field chain
// extensions compose their embedding matrices into lin, which keeps every
// old label attached to the same element across stages.
struct Labeling {
    bool implicit_full = false;
    Code size = 0;
    std::map<Label, Code> to_code;

    std::uint64_t lin_base = 0; // 0 = no linear form
    std::uint32_t lin_dim = 0;
    std::vector<std::uint8_t> lin;
    std::vector<std::uint8_t> lin_inv;

    bool has_linear() const { return lin_base != 0; }
    bool operator==(const Labeling&) const = default;
};

Code labeling_to_code(const Labeling& lab, Label l);
Label labeling_to_label(const Labeling& lab, Code c);
bool labeling_has(const Labeling& lab, Label l);

// Finite abelian group: factors d1 | d2 | ... | dk, each >= 2.
// Empty factor list = the trivial group (one element).
// Element code = mixed-radix tuple, least significant factor first.
struct AbelianPayload {
    std::vector<Code> factors;
    Labeling labeling;

    Code order() const {
        Code o = 1;
        for (Code f : factors) o *= f;
        return o;
    }
    bool operator==(const AbelianPayload&) const = default;
};

std::vector<Code> abelian_decode(const AbelianPayload& g, Code code);
Code abelian_encode(const AbelianPayload& g, std::span<const Code> tuple);
Code abelian_add(const AbelianPayload& g, Code a, Code b);
Code abelian_neg(const AbelianPayload& g, Code a);
Code abelian_scale(const AbelianPayload& g, Code m, Code a);
Code abelian_element_order(const AbelianPayload& g, Code a);

// Finite field F_{p^n} presented as F_p[x]/(poly).
// Element code = base-p digit packing of the residue polynomial.
struct FieldPayload {
    std::uint64_t p = 2;
    std::uint32_t degree = 1;
    std::vector<std::uint8_t> poly; // monic, length degree+1, coeffs in [0,p)
    Labeling labeling;

    Code field_size() const {
        Code s = 1;
        for (std::uint32_t i = 0; i < degree; ++i) s *= p;
        return s;
    }
    bool operator==(const FieldPayload&) const = default;
};

using Payload = std::variant<GraphPayload, OrderPayload, QMetricPayload,
                             AbelianPayload, FieldPayload>;

// ---------------------------------------------------------------------------
// Structure
// ---------------------------------------------------------------------------

// A finite class-tagged structure living inside omega.
//
// For the relational classes the domain is stored explicitly (sorted).
// For the algebraic classes the domain is derived from the labeling and
// `domain` stays empty.
struct Structure {
    std::string class_id;
    std::vector<Label> domain;
    Payload payload;

    bool operator==(const Structure&) const = default;
};

const Labeling* structure_labeling(const Structure& s);
Labeling* structure_labeling(Structure& s);

std::uint64_t domain_size(const Structure& s);
bool domain_contains(const Structure& s, Label l);
bool domain_is_implicit(const Structure& s);

// Materializes the domain; throws ContractViolation when the domain is
// implicit and larger than `cap`.
std::vector<Label> domain_labels(const Structure& s, std::uint64_t cap = (1u << 20));

// An injective structure-preserving map, defined exactly on source.domain.
struct Embedding {
    Structure source;
    Structure target;
    LabelMap map;

    Label apply(Label l) const { return map.at(l); }
};

struct CanonicalForm {
    std::string bytes;
    bool operator==(const CanonicalForm&) const = default;
    auto operator<=>(const CanonicalForm&) const = default;
};

std::string frac_to_string(const Frac& f);
Frac frac_from_string(const std::string& s);

} // namespace fraisse

#endif
