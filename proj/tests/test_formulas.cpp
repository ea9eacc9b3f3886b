#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fraisse/abelian_class.hpp>
#include <fraisse/field_class.hpp>
#include <fraisse/formulas.hpp>
#include <fraisse/graph_class.hpp>
#include <fraisse/order_class.hpp>
#include <fraisse/qmetric_class.hpp>
#include <fraisse/topology.hpp>

using namespace fraisse;

TEST_CASE("parse / print round-trips") {
    for (const char* text : {
             "(E 0 1)",
             "(not (E 0 1))",
             "(and (E 0 1) (or (< 2 3) (= 4 4)))",
             "(d 3/2 0 1)",
             "(sum 1 2 3)",
             "(add 0 1 1)",
             "(mul 2 2 3)",
         }) {
        CAPTURE(text);
        QfSentence s = parse_sentence(text);
        CHECK(sentence_to_string(s) == text);
        CHECK(parse_sentence(sentence_to_string(s)) == s);
    }
    // Whitespace-insensitive.
    CHECK(parse_sentence("  ( and (E 0 1)(E 1 2) ) ") ==
          parse_sentence("(and (E 0 1) (E 1 2))"));
}

TEST_CASE("parse errors carry a position") {
    for (const char* bad : {"", "(", "(E 0)", "(E 0 1", "(foo 1 2)", "(not)",
                            "(not (E 0 1) (E 1 2))", "(d x 0 1)", "(E 0 1) junk"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS((void)parse_sentence(bad), UsageError);
    }
    try {
        (void)parse_sentence("(and (E 0 1) (bad 2 3))");
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
}

TEST_CASE("sentence_constants collects every label once, ascending") {
    QfSentence s = parse_sentence("(and (E 5 1) (not (E 1 9)))");
    CHECK(sentence_constants(s) == std::vector<Label>{1, 5, 9});
}

TEST_CASE("eval on a graph") {
    GraphClass g;
    Structure s = g.make({0, 1, 2}, {{0, 1}});
    CHECK(eval_sentence(s, parse_sentence("(E 0 1)")));
    CHECK(eval_sentence(s, parse_sentence("(E 1 0)")));
    CHECK(!eval_sentence(s, parse_sentence("(E 1 2)")));
    CHECK(eval_sentence(s, parse_sentence("(not (E 1 2))")));
    CHECK(eval_sentence(s, parse_sentence("(and (E 0 1) (not (E 0 2)))")));
    CHECK(eval_sentence(s, parse_sentence("(or (E 1 2) (= 2 2))")));
    CHECK(!eval_sentence(s, parse_sentence("(= 0 1)")));
    // Constants outside the domain are not yet decided: error, not false.
    CHECK_THROWS_AS((void)eval_sentence(s, parse_sentence("(E 0 7)")), ContractViolation);
}

TEST_CASE("eval on an order and a metric space") {
    OrderClass o;
    Structure s = o.make({4, 2, 7}); // 4 < 2 < 7
    CHECK(eval_sentence(s, parse_sentence("(< 4 2)")));
    CHECK(!eval_sentence(s, parse_sentence("(< 2 4)")));

    QMetricClass m(2, 4);
    Structure sp = m.make({0, 1}, {{{0, 1}, Frac(3, 2)}});
    CHECK(eval_sentence(sp, parse_sentence("(d 3/2 0 1)")));
    CHECK(eval_sentence(sp, parse_sentence("(d 3/2 1 0)")));
    CHECK(!eval_sentence(sp, parse_sentence("(d 1 0 1)")));
}

TEST_CASE("eval on the algebraic classes") {
    AbelianClass ab(256);
    Structure z4 = ab.make({4});
    CHECK(eval_sentence(z4, parse_sentence("(sum 1 1 2)")));
    CHECK(eval_sentence(z4, parse_sentence("(sum 3 2 1)")));
    CHECK(!eval_sentence(z4, parse_sentence("(sum 1 2 0)")));

    FieldClass fc(2, 8);
    Structure f4 = fc.make_field(2);
    CHECK(eval_sentence(f4, parse_sentence("(add 2 3 1)")));
    CHECK(eval_sentence(f4, parse_sentence("(mul 2 2 3)")));
    CHECK(!eval_sentence(f4, parse_sentence("(mul 2 3 2)")));
    // Wrong payload for the atom.
    CHECK_THROWS_AS((void)eval_sentence(z4, parse_sentence("(mul 1 1 1)")),
                    ContractViolation);
    CHECK_THROWS_AS((void)eval_sentence(f4, parse_sentence("(E 0 1)")), ContractViolation);
}

TEST_CASE("open_from_structure characterizes the basic open set") {
    GraphClass g;
    auto cls = make_class("graph");
    Structure b = g.make({0, 2}, {{0, 2}});
    QfSentence phi = open_from_structure(b);
    // eval(S, phi_B) iff S restricted to B's domain equals B.
    Structure in1 = g.make({0, 1, 2}, {{0, 2}, {1, 2}});
    Structure out1 = g.make({0, 1, 2}, {{0, 1}});
    CHECK(eval_sentence(in1, phi));
    CHECK(!eval_sentence(out1, phi));
    CHECK(eval_sentence(in1, phi) == member_basic(*cls, in1, BasicOpen{b}));
    CHECK(eval_sentence(out1, phi) == member_basic(*cls, out1, BasicOpen{b}));

    // Single point: the degenerate equality atom mentions the label.
    Structure pt = g.make({3}, {});
    QfSentence phi_pt = open_from_structure(pt);
    CHECK(sentence_constants(phi_pt) == std::vector<Label>{3});
    CHECK(eval_sentence(g.make({1, 3}, {}), phi_pt));

    // Orders and metric spaces translate too.
    OrderClass o;
    Structure ord = o.make({5, 1});
    QfSentence phi_o = open_from_structure(ord);
    CHECK(eval_sentence(o.make({5, 1, 9}), phi_o));
    CHECK(!eval_sentence(o.make({1, 5, 9}), phi_o));

    // Not defined for the algebraic classes.
    AbelianClass ab(256);
    CHECK_THROWS_AS((void)open_from_structure(ab.make({2})), UsageError);
}

TEST_CASE("structure_from_open recovers the anchor") {
    GraphClass g;
    auto cls = make_class("graph");
    Structure b = g.make({0, 2}, {{0, 2}});
    QfSentence phi = open_from_structure(b);
    Structure s = g.make({0, 1, 2, 3}, {{0, 2}, {1, 3}});
    Structure back = structure_from_open(*cls, phi, s);
    CHECK(back == b);
    // Rejected when the sentence is false in s.
    Structure bad = g.make({0, 1, 2}, {});
    CHECK_THROWS_AS((void)structure_from_open(*cls, phi, bad), ContractViolation);
}

TEST_CASE("round trip: structure -> sentence -> structure over a chain stage") {
    auto cls = make_class("graph");
    ChainState st = new_builder(cls, cls->enumerated(0));
    run(st, 30);
    for (std::vector<Label> gens : {std::vector<Label>{0, 1},
                                    std::vector<Label>{2, 5, 9},
                                    std::vector<Label>{1, 3, 4, 8}}) {
        Structure b = cls->substructure(st.top(), gens);
        QfSentence phi = open_from_structure(b);
        CHECK(eval_sentence(st.top(), phi));
        CHECK(structure_from_open(*cls, phi, st.top()) == b);
        CHECK(member_basic(*cls, st.top(), BasicOpen{b}));
    }
}
