#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fraisse/json_io.hpp>
#include <fraisse/snf.hpp>
#include <fraisse/structure.hpp>

#include <numeric>
#include <random>

using namespace fraisse;

namespace {

IntMatrix from_rows(std::vector<std::vector<long long>> rows) {
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return m;
}

// Independent oracle: d1 * ... * dk = gcd of all k x k minors.
void check_snf_contract(const IntMatrix& m) {
    SnfResult r = smith_normal_form(m);
    // u * m * v == s, and s is diagonal with a divisibility chain.
    IntMatrix prod = matmul(matmul(r.u, m), r.v);
    REQUIRE(prod.rows == r.s.rows);
    for (std::size_t i = 0; i < prod.rows; ++i)
        for (std::size_t j = 0; j < prod.cols; ++j) CHECK(prod.at(i, j) == r.s.at(i, j));
    for (std::size_t i = 0; i < r.s.rows; ++i)
        for (std::size_t j = 0; j < r.s.cols; ++j)
            if (i != j) CHECK(r.s.at(i, j) == 0);
    std::size_t n = std::min(m.rows, m.cols);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Int a = r.s.at(i, i), b = r.s.at(i + 1, i + 1);
        CHECK(a >= 0);
        if (a == 0) CHECK(b == 0);
        if (a > 0) CHECK(b % a == 0);
    }
    // v * vinv == I.
    IntMatrix vvi = matmul(r.v, r.vinv);
    for (std::size_t i = 0; i < vvi.rows; ++i)
        for (std::size_t j = 0; j < vvi.cols; ++j) CHECK(vvi.at(i, j) == (i == j ? 1 : 0));
    // Divisor products against the minor gcds.
    Int prefix = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix *= r.s.at(k - 1, k - 1);
        if (prefix < 0) prefix = -prefix;
        CHECK(prefix == gcd_of_minors(m, k));
        if (prefix == 0) break;
    }
}

} // namespace

TEST_CASE("snf of the reference matrix") {
    IntMatrix m = from_rows({{2, 4}, {6, 8}});
    SnfResult r = smith_normal_form(m);
    CHECK(static_cast<long long>(r.s.at(0, 0)) == 2);
    CHECK(static_cast<long long>(r.s.at(1, 1)) == 4);
    check_snf_contract(m);
}

TEST_CASE("snf on fixed shapes") {
    check_snf_contract(from_rows({{1, 0}, {0, 1}}));
    check_snf_contract(from_rows({{0, 0}, {0, 0}}));
    check_snf_contract(from_rows({{2, 0, 0}, {0, 3, 0}}));           // coprime diag
    check_snf_contract(from_rows({{2, 0}, {0, 2}, {1, 1}}));         // tall
    check_snf_contract(from_rows({{6, 10, 15}}));                    // single row, gcd 1
    check_snf_contract(from_rows({{-4}, {6}}));                      // negatives
    check_snf_contract(from_rows({{2, 4, 6}, {4, 8, 12}}));          // rank 1
}

TEST_CASE("snf randomized against the minor-gcd oracle") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> entry(-5, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        IntMatrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m.at(i, j) = entry(rng);
        check_snf_contract(m);
    }
}

TEST_CASE("determinant") {
    CHECK(static_cast<long long>(determinant_abs(from_rows({{2, 4}, {6, 8}}))) == 8);
    CHECK(static_cast<long long>(determinant_abs(from_rows({{1, 2}, {2, 4}}))) == 0);
    CHECK(static_cast<long long>(determinant_abs(IntMatrix::identity(4))) == 1);
}

TEST_CASE("code strings round-trip at 128 bits") {
    Code big = (Code(1) << 100) + 12345;
    CHECK(code_from_string(code_to_string(big)) == big);
    CHECK(code_to_string(Code(0)) == "0");
    CHECK_THROWS_AS((void)code_from_string("12x"), UsageError);
}

TEST_CASE("frac strings") {
    CHECK(frac_to_string(Frac(3, 2)) == "3/2");
    CHECK(frac_from_string("3/2") == Frac(3, 2));
    CHECK(frac_from_string("4") == Frac(4));
    CHECK_THROWS_AS((void)frac_from_string("3/0"), UsageError);
}

TEST_CASE("implicit labeling rank rule") {
    Labeling lab;
    lab.implicit_full = true;
    lab.size = 8;
    lab.to_code[1] = 5; // one override
    lab.to_code[5] = 1;
    // Non-overridden labels map to the remaining codes in increasing order.
    CHECK(labeling_to_code(lab, 0) == 0);
    CHECK(labeling_to_code(lab, 1) == 5);
    CHECK(labeling_to_code(lab, 2) == 2);
    CHECK(labeling_to_code(lab, 5) == 1);
    CHECK(labeling_to_code(lab, 6) == 6);
    for (Label l = 0; l < 8; ++l) CHECK(labeling_to_label(lab, labeling_to_code(lab, l)) == l);
    CHECK(labeling_has(lab, 7));
    CHECK(!labeling_has(lab, 8));
}

TEST_CASE("structure json round-trips") {
    Structure g{"graph", {0, 2, 5}, GraphPayload{{{0, 2}, {2, 5}}}};
    CHECK(structure_from_json(structure_to_json(g)) == g);

    Structure o{"order", {1, 3, 4}, OrderPayload{{{3, 0}, {1, 1}, {4, 2}}}};
    CHECK(structure_from_json(structure_to_json(o)) == o);

    Structure m{"qmetric:2:4",
                {0, 1},
                QMetricPayload{{{{0, 1}, Frac(3, 2)}}}};
    CHECK(structure_from_json(structure_to_json(m)) == m);

    AbelianPayload ab;
    ab.factors = {2, 4};
    ab.labeling.implicit_full = true;
    ab.labeling.size = 8;
    ab.labeling.to_code[0] = 3;
    ab.labeling.to_code[3] = 0;
    Structure a{"abelian", {}, ab};
    CHECK(structure_from_json(structure_to_json(a)) == a);

    FieldPayload fp;
    fp.p = 2;
    fp.degree = 2;
    fp.poly = {1, 1, 1};
    fp.labeling.implicit_full = true;
    fp.labeling.size = 4;
    Structure f{"field:2", {}, fp};
    CHECK(structure_from_json(structure_to_json(f)) == f);

    // Linear labelings survive too.
    fp.labeling.lin_base = 2;
    fp.labeling.lin_dim = 2;
    fp.labeling.lin = {1, 1, 0, 1};
    fp.labeling.lin_inv = {1, 1, 0, 1};
    Structure f2{"field:2", {}, fp};
    CHECK(structure_from_json(structure_to_json(f2)) == f2);

    CHECK(structure_from_string(structure_to_string(g)) == g);
    CHECK_THROWS_AS((void)structure_from_string("{"), UsageError);
}
