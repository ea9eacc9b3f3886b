#ifndef FRAISSE_SNF_HPP
#define FRAISSE_SNF_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fraisse {

using Int = __int128;

struct IntMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Int> data;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
    Int& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    Int at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    static IntMatrix identity(std::size_t n);
};

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b);

struct SnfResult {
    IntMatrix s;    // diagonal, d1 | d2 | ..., di >= 0
    IntMatrix u;    // unimodular row transform
    IntMatrix v;    // unimodular column transform, u * m * v = s
    IntMatrix vinv; // inverse of v
};

// Smith normal form by row/column reduction; deterministic.
SnfResult smith_normal_form(const IntMatrix& m);

// |det| of an integer matrix (fraction-free Gaussian elimination).
Int determinant_abs(const IntMatrix& m);

// gcd of all k x k minors, for the SNF divisor oracle. Returns 0 when all
// minors vanish.
Int gcd_of_minors(const IntMatrix& m, std::size_t k);

} // namespace fraisse

#endif
