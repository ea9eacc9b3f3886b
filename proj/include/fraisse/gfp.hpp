#ifndef FRAISSE_GFP_HPP
#define FRAISSE_GFP_HPP

#include <fraisse/base.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace fraisse {

// Arithmetic over F_p and F_p[x] used by the finite-field class.
// Polynomials are coefficient vectors, ascending degree, entries in [0, p).

using GfpPoly = std::vector<std::uint8_t>;

std::uint64_t gfp_inv(std::uint64_t a, std::uint64_t p);

void gfp_trim(GfpPoly& f);
int gfp_deg(const GfpPoly& f); // -1 for the zero polynomial

GfpPoly gfp_add(std::uint64_t p, const GfpPoly& a, const GfpPoly& b);
GfpPoly gfp_sub(std::uint64_t p, const GfpPoly& a, const GfpPoly& b);
GfpPoly gfp_mul(std::uint64_t p, const GfpPoly& a, const GfpPoly& b);
GfpPoly gfp_mod(std::uint64_t p, GfpPoly a, const GfpPoly& m);
GfpPoly gfp_gcd(std::uint64_t p, GfpPoly a, GfpPoly b);

// x^(p^k) mod m, computed by iterated p-th powers.
GfpPoly gfp_frobenius_power(std::uint64_t p, std::uint64_t k, const GfpPoly& m);

bool gfp_is_irreducible(std::uint64_t p, const GfpPoly& f);

// Lexicographically smallest monic irreducible of degree n: candidates are
// ordered by the base-p value of their lower coefficient vector.
GfpPoly gfp_smallest_irreducible(std::uint64_t p, std::uint32_t n);

bool is_prime_u64(std::uint64_t n);

// Dense matrix over F_p, row-major.
struct GfpMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t p = 2;
    std::vector<std::uint8_t> data;

    GfpMat() = default;
    GfpMat(std::size_t r, std::size_t c, std::uint64_t prime)
        : rows(r), cols(c), p(prime), data(r * c, 0) {}
    std::uint8_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    static GfpMat identity(std::size_t n, std::uint64_t prime);
};

GfpMat gfp_matmul(const GfpMat& a, const GfpMat& b);
std::vector<std::uint8_t> gfp_matvec(const GfpMat& a, const std::vector<std::uint8_t>& v);
std::optional<GfpMat> gfp_inverse(const GfpMat& a);

// Basis of the right kernel {v : a v = 0}, one column vector per basis element.
std::vector<std::vector<std::uint8_t>> gfp_kernel(const GfpMat& a);

// Solves a x = b; nullopt when inconsistent. Any one solution.
std::optional<std::vector<std::uint8_t>> gfp_solve(const GfpMat& a,
                                                   const std::vector<std::uint8_t>& b);

} // namespace fraisse

#endif
