#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fraisse/abelian_class.hpp>
#include <fraisse/field_class.hpp>

#include <numeric>

using namespace fraisse;

namespace {

const AbelianPayload& group_of(const Structure& s) {
    return std::get<AbelianPayload>(s.payload);
}
const FieldPayload& field_of(const Structure& s) { return std::get<FieldPayload>(s.payload); }

// Brute-force subgroup closure of image labels under addition.
std::size_t closure_size(const AbelianPayload& g, std::vector<Code> gens) {
    std::set<Code> seen{0};
    std::vector<Code> queue{0};
    while (!queue.empty()) {
        Code x = queue.back();
        queue.pop_back();
        for (Code gen : gens) {
            Code y = abelian_add(g, x, gen);
            if (seen.insert(y).second) queue.push_back(y);
        }
    }
    return seen.size();
}

void check_abelian_amalgam(const AbelianClass& cls, const Structure& a, const Embedding& h1,
                           const Embedding& h2) {
    Amalgam am = cls.amalgamate(a, h1, h2);
    REQUIRE(cls.is_member(am.c));
    CHECK(cls.is_embedding(am.g1));
    CHECK(cls.is_embedding(am.g2));
    for (Label al : domain_labels(a))
        CHECK(am.g1.map.at(h1.map.at(al)) == am.g2.map.at(h2.map.at(al)));
    for (Label bl : domain_labels(h1.target)) CHECK(am.g1.map.at(bl) == bl);
    // Pushout order: |B1| * |B2| / |A| for injections over a common subgroup.
    Code expect = group_of(h1.target).order() * group_of(h2.target).order() /
                  group_of(a).order();
    CHECK(group_of(am.c).order() == expect);
}

} // namespace

TEST_CASE("abelian arithmetic on mixed-radix codes") {
    AbelianPayload g;
    g.factors = {2, 4};
    CHECK(abelian_add(g, 1, 1) == 0);           // (1,0) + (1,0)
    CHECK(abelian_add(g, 2, 6) == 0);           // (0,1) + (0,3)
    CHECK(abelian_neg(g, 3) == 7);              // -(1,1) = (1,3)
    CHECK(abelian_scale(g, 3, 2) == 6);         // 3 * (0,1) = (0,3)
    CHECK(abelian_element_order(g, 2) == 4);
    CHECK(abelian_element_order(g, 1) == 2);
    CHECK(abelian_element_order(g, 0) == 1);
    std::vector<Code> t{1, 3};
    CHECK(abelian_encode(g, t) == 7);
    CHECK(abelian_decode(g, 7) == std::vector<Code>{1, 3});
}

TEST_CASE("abelian enumeration counts") {
    auto cls = make_class("abelian");
    CHECK(cls->enumerate_up_to(4).size() == 5);  // 1, Z2, Z3, Z4, Z2+Z2
    CHECK(cls->enumerate_up_to(8).size() == 11); // + Z5, Z6, Z7, Z8, Z2+Z4, Z2+Z2+Z2
}

TEST_CASE("abelian make validates the divisor chain") {
    AbelianClass cls(256);
    CHECK(cls.is_member(cls.make({2, 4})));
    CHECK_THROWS_AS((void)cls.make({4, 2}), ContractViolation);
    CHECK_THROWS_AS((void)cls.make({2, 3}), ContractViolation);
    CHECK(group_of(cls.make({})).order() == 1);
}

TEST_CASE("abelian quotient matches brute force") {
    AbelianClass cls(4096);
    // Z16 x Z3 presented as generators with relations diag(16, 3).
    IntMatrix rel(2, 2);
    rel.at(0, 0) = 16;
    rel.at(1, 1) = 3;
    AbelianQuotient q = abelian_quotient(2, rel);
    Code order = 1;
    for (Code f : q.factors) order *= f;
    CHECK(order == 48);
    AbelianPayload gq;
    gq.factors = q.factors;
    // Generator images must have the right orders and generate everything.
    std::vector<Int> c1{1, 0}, c2{0, 1};
    Code i1 = q.element(c1), i2 = q.element(c2);
    CHECK(abelian_element_order(gq, i1) == 16);
    CHECK(abelian_element_order(gq, i2) == 3);
    CHECK(closure_size(gq, {i1, i2}) == 48);
}

TEST_CASE("abelian amalgamation is the pushout of injections") {
    AbelianClass cls(1 << 16);
    SUBCASE("over the trivial group, coprime orders") {
        Structure a = cls.make({});
        Structure b1 = cls.make({2, 2, 2, 2});
        Structure b2 = cls.make({3});
        Embedding h1{a, b1, {{0, 0}}};
        Embedding h2{a, b2, {{0, 0}}};
        check_abelian_amalgam(cls, a, h1, h2);
    }
    SUBCASE("glued over Z2 inside Z4 and Z2") {
        Structure a = cls.make({2});
        Structure b1 = cls.make({4});
        Structure b2 = cls.make({2, 2});
        Embedding h1{a, b1, {{0, 0}, {1, 2}}}; // Z2 -> 2Z4
        Embedding h2{a, b2, {{0, 0}, {1, 1}}}; // Z2 -> first factor
        check_abelian_amalgam(cls, a, h1, h2);
        Amalgam am = cls.amalgamate(a, h1, h2);
        // Z4 +_{Z2} (Z2 x Z2) = Z2 x Z4, order 8.
        CHECK(group_of(am.c).factors == std::vector<Code>{2, 4});
    }
    SUBCASE("divisibility demand m=2 against Z8") {
        Structure a = cls.make({8});
        Structure b2 = cls.make({16});
        Embedding h1{a, a, {}};
        Embedding h2{a, b2, {}};
        for (Label l = 0; l < 8; ++l) {
            h1.map[l] = l;
            h2.map[l] = labeling_to_label(group_of(b2).labeling, Code(l) * 2);
        }
        check_abelian_amalgam(cls, a, h1, h2);
    }
}

TEST_CASE("abelian embeddings_extending finds exactly the monomorphisms") {
    AbelianClass cls(256);
    Structure z2 = cls.make({2});
    Structure z4 = cls.make({4});
    Structure z22 = cls.make({2, 2});
    // Z2 -> Z4: the unique element of order 2 is code 2.
    auto e1 = cls.embeddings_extending(z2, z4, {}, 0);
    REQUIRE(e1.size() == 1);
    CHECK(e1[0].at(1) == 2);
    // Z2 -> Z2 x Z2: three elements of order 2.
    CHECK(cls.embeddings_extending(z2, z22, {}, 0).size() == 3);
    // Z4 does not embed into Z2 x Z2.
    CHECK(cls.embeddings_extending(z4, z22, {}, 0).empty());
    // Pins filter.
    CHECK(cls.embeddings_extending(z2, z22, {{1, 3}}, 0).size() == 1);
    // Every returned map is a genuine embedding.
    for (auto& m : cls.embeddings_extending(z22, cls.make({2, 4}), {}, 0))
        CHECK(cls.is_embedding(Embedding{z22, cls.make({2, 4}), m}));
}

TEST_CASE("abelian strict_extend grows the group") {
    AbelianClass cls(256);
    Structure s = cls.make({2});
    Structure e = cls.strict_extend(s);
    CHECK(cls.is_member(e));
    CHECK(group_of(e).order() > 2);
    // Old labels survive with their meaning: 1 still has order 2.
    CHECK(abelian_element_order(group_of(e),
                                labeling_to_code(group_of(e).labeling, 1)) == 2);
}

TEST_CASE("field make and arithmetic") {
    FieldClass cls(2, 16);
    Structure f4 = cls.make_field(2);
    CHECK(field_of(f4).poly == std::vector<std::uint8_t>{1, 1, 1}); // x^2 + x + 1
    const FieldPayload& f = field_of(f4);
    // x * x = x + 1 in F4: code 2 * 2 = 3.
    CHECK(field_mul(f, 2, 2) == 3);
    CHECK(field_add(f, 2, 3) == 1);
    CHECK(field_inv(f, 2) == 3);
    CHECK(field_pow(f, 2, 3) == 1); // multiplicative order 3
    CHECK_THROWS_AS((void)field_inv(f, 0), ContractViolation);
    // Frobenius is x -> x^2.
    for (Code c = 0; c < 4; ++c) CHECK(field_frobenius(f, c) == field_mul(f, c, c));

    FieldClass c3(3, 8);
    Structure f9 = c3.make_field(2);
    CHECK(c3.is_member(f9));
    CHECK(field_of(f9).field_size() == 9);
}

TEST_CASE("field minpoly") {
    FieldClass cls(2, 16);
    Structure f4 = cls.make_field(2);
    GfpPoly mp = field_minpoly(field_of(f4), 2);
    CHECK(mp == GfpPoly{1, 1, 1}); // the defining polynomial
    CHECK(field_minpoly(field_of(f4), 0) == GfpPoly{0, 1});
    CHECK(field_minpoly(field_of(f4), 1) == GfpPoly{1, 1});
}

TEST_CASE("F4 embeds into F16 in exactly two ways") {
    FieldClass cls(2, 16);
    Structure f4 = cls.make_field(2);
    Structure f16 = cls.make_field(4);
    auto embs = cls.embeddings_extending(f4, f16, {}, 0);
    CHECK(embs.size() == 2);
    // embed() picks the one sending the generator to the smallest root.
    Embedding e = cls.embed(f4, f16);
    CHECK(cls.is_embedding(e));
    CHECK(e.map == embs.front());
    // F4 does not embed into F8.
    CHECK(cls.embeddings_extending(f4, cls.make_field(3), {}, 0).empty());
    CHECK_THROWS_AS((void)cls.embed(f4, cls.make_field(3)), ContractViolation);
}

TEST_CASE("field amalgamation lands in the lcm degree and commutes") {
    FieldClass cls(2, 16);
    Structure f2 = cls.make_field(1);
    Structure f4 = cls.make_field(2);
    Structure f8 = cls.make_field(3);
    Embedding h1 = cls.embed(f2, f4);
    Embedding h2 = cls.embed(f2, f8);
    Amalgam am = cls.amalgamate(f2, h1, h2);
    CHECK(cls.degree_of(am.c) == 6);
    CHECK(cls.is_embedding(am.g1));
    CHECK(cls.is_embedding(am.g2));
    for (Label al : domain_labels(f2))
        CHECK(am.g1.map.at(h1.map.at(al)) == am.g2.map.at(h2.map.at(al)));
}

TEST_CASE("frobenius is an automorphism and fixes exactly the subfields") {
    FieldClass cls(2, 16);
    Structure f16 = cls.make_field(4);
    CHECK(cls.frobenius_is_automorphism(f16));
    CHECK(cls.subfield_count(f16, 1) == 2);
    CHECK(cls.subfield_count(f16, 2) == 4);
    CHECK(cls.subfield_count(f16, 4) == 16);
    auto sub = cls.subfield_elements(f16, 2);
    REQUIRE(sub.size() == 4);
    // The subfield is closed under the field operations.
    std::set<Code> s(sub.begin(), sub.end());
    for (Code a : sub)
        for (Code b : sub) CHECK(s.count(field_add(field_of(f16), a, b)) == 1);
}

TEST_CASE("extend_stage keeps every old label on the same element") {
    FieldClass cls(2, 64);
    Structure f4 = cls.make_field(2);
    Structure f12 = cls.extend_stage(f4, 12);
    CHECK(cls.degree_of(f12) == 12);
    // Labels 0..3 still name the same elements: additive and multiplicative
    // tables restricted to them agree with F4's.
    for (Label a = 0; a < 4; ++a)
        for (Label b = 0; b < 4; ++b) {
            Code ca = cls.code_of(f12, a), cb = cls.code_of(f12, b);
            Code sum = field_add(field_of(f12), ca, cb);
            Code prod = field_mul(field_of(f12), ca, cb);
            Code sum4 = field_add(field_of(f4), Code(a), Code(b));
            Code prod4 = field_mul(field_of(f4), Code(a), Code(b));
            CHECK(cls.label_of(f12, sum) == Label(sum4));
            CHECK(cls.label_of(f12, prod) == Label(prod4));
        }
    // Iterated extension through a linear labeling stays consistent.
    Structure f60 = cls.extend_stage(f12, 60);
    CHECK(cls.degree_of(f60) == 60);
    for (Label a = 0; a < 4; ++a)
        for (Label b = 0; b < 4; ++b) {
            Code ca = cls.code_of(f60, a), cb = cls.code_of(f60, b);
            Code sum4 = field_add(field_of(f4), Code(a), Code(b));
            CHECK(cls.label_of(f60, field_add(field_of(f60), ca, cb)) == Label(sum4));
        }
    CHECK_THROWS_AS((void)cls.extend_stage(f12, 13), ContractViolation);
}

TEST_CASE("field enumeration: one type per degree") {
    auto cls = make_class("field:2:4");
    auto types = cls->enumerate_up_to(16);
    CHECK(types.size() == 4); // F2, F4, F8, F16
}
