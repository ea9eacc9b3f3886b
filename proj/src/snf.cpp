#include <fraisse/snf.hpp>

#include <fraisse/base.hpp>

#include <algorithm>
#include <numeric>

namespace fraisse {

namespace {

Int int_abs(Int x) { return x < 0 ? -x : x; }

Int int_gcd(Int a, Int b) {
    a = int_abs(a);
    b = int_abs(b);
    while (b) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols != b.rows) throw ContractViolation("matmul: shape mismatch");
    IntMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            Int aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

SnfResult smith_normal_form(const IntMatrix& m) {
    SnfResult r;
    r.s = m;
    r.u = IntMatrix::identity(m.rows);
    r.v = IntMatrix::identity(m.cols);
    r.vinv = IntMatrix::identity(m.cols);
    IntMatrix& s = r.s;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < s.cols; ++c) std::swap(s.at(i, c), s.at(j, c));
        for (std::size_t c = 0; c < r.u.cols; ++c) std::swap(r.u.at(i, c), r.u.at(j, c));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t q = 0; q < s.rows; ++q) std::swap(s.at(q, i), s.at(q, j));
        for (std::size_t q = 0; q < r.v.rows; ++q) std::swap(r.v.at(q, i), r.v.at(q, j));
        for (std::size_t c = 0; c < r.vinv.cols; ++c)
            std::swap(r.vinv.at(i, c), r.vinv.at(j, c));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, Int k) { // row dst += k * row src
        if (k == 0) return;
        for (std::size_t c = 0; c < s.cols; ++c) s.at(dst, c) += k * s.at(src, c);
        for (std::size_t c = 0; c < r.u.cols; ++c) r.u.at(dst, c) += k * r.u.at(src, c);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, Int k) { // col dst += k * col src
        if (k == 0) return;
        for (std::size_t q = 0; q < s.rows; ++q) s.at(q, dst) += k * s.at(q, src);
        for (std::size_t q = 0; q < r.v.rows; ++q) r.v.at(q, dst) += k * r.v.at(q, src);
        // vinv <- E^{-1} vinv with E = I + k e_{src,dst}: row src -= k * row dst
        for (std::size_t c = 0; c < r.vinv.cols; ++c)
            r.vinv.at(src, c) -= k * r.vinv.at(dst, c);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t c = 0; c < s.cols; ++c) s.at(i, c) = -s.at(i, c);
        for (std::size_t c = 0; c < r.u.cols; ++c) r.u.at(i, c) = -r.u.at(i, c);
    };

    std::size_t nmin = std::min(s.rows, s.cols);
    for (std::size_t t = 0; t < nmin; ++t) {
        for (;;) {
            // Locate the minimum nonzero absolute value in the trailing block.
            std::size_t pi = t, pj = t;
            Int best = 0;
            for (std::size_t i = t; i < s.rows; ++i)
                for (std::size_t j = t; j < s.cols; ++j) {
                    Int v = int_abs(s.at(i, j));
                    if (v != 0 && (best == 0 || v < best)) {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            if (best == 0) goto next_pivot; // trailing block is zero
            swap_rows(t, pi);
            swap_cols(t, pj);
            if (s.at(t, t) < 0) negate_row(t);

            bool reduced = true;
            for (std::size_t i = t + 1; i < s.rows; ++i) {
                Int quot = s.at(i, t) / s.at(t, t);
                add_row(i, t, -quot);
                if (s.at(i, t) != 0) reduced = false;
            }
            for (std::size_t j = t + 1; j < s.cols; ++j) {
                Int quot = s.at(t, j) / s.at(t, t);
                add_col(j, t, -quot);
                if (s.at(t, j) != 0) reduced = false;
            }
            if (!reduced) continue;

            // Enforce divisibility into the trailing block.
            bool divides_all = true;
            for (std::size_t i = t + 1; i < s.rows && divides_all; ++i)
                for (std::size_t j = t + 1; j < s.cols; ++j)
                    if (s.at(i, j) % s.at(t, t) != 0) {
                        add_row(t, i, 1);
                        divides_all = false;
                        break;
                    }
            if (divides_all) break;
        }
    next_pivot:;
    }
    return r;
}

Int determinant_abs(const IntMatrix& m) {
    if (m.rows != m.cols) throw ContractViolation("determinant: not square");
    // Bareiss fraction-free elimination.
    IntMatrix a = m;
    std::size_t n = a.rows;
    Int prev = 1;
    Int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a.at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t c = 0; c < n; ++c) std::swap(a.at(k, c), a.at(p, c));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return int_abs(n == 0 ? Int(1) : a.at(n - 1, n - 1));
}

Int gcd_of_minors(const IntMatrix& m, std::size_t k) {
    if (k == 0) return 1;
    std::vector<std::size_t> ri(k), ci(k);
    Int g = 0;
    std::vector<std::size_t> rows_sel, cols_sel;
    std::function<void(std::size_t, std::size_t)> pick_cols;
    std::function<void(std::size_t, std::size_t)> pick_rows = [&](std::size_t start,
                                                                  std::size_t depth) {
        if (depth == k) {
            pick_cols(0, 0);
            return;
        }
        for (std::size_t i = start; i + (k - depth) <= m.rows; ++i) {
            rows_sel.push_back(i);
            pick_rows(i + 1, depth + 1);
            rows_sel.pop_back();
        }
    };
    pick_cols = [&](std::size_t start, std::size_t depth) {
        if (depth == k) {
            IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    sub.at(i, j) = m.at(rows_sel[i], cols_sel[j]);
            g = int_gcd(g, determinant_abs(sub));
            return;
        }
        for (std::size_t j = start; j + (k - depth) <= m.cols; ++j) {
            cols_sel.push_back(j);
            pick_cols(j + 1, depth + 1);
            cols_sel.pop_back();
        }
    };
    (void)ri;
    (void)ci;
    pick_rows(0, 0);
    return g;
}

} // namespace fraisse
