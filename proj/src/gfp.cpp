#include <fraisse/gfp.hpp>

#include <algorithm>

namespace fraisse {

std::uint64_t gfp_inv(std::uint64_t a, std::uint64_t p) {
    // Fermat; p is small and prime.
    a %= p;
    if (a == 0) throw ContractViolation("division by zero in F_p");
    std::uint64_t r = 1, e = p - 2, base = a;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r;
}

void gfp_trim(GfpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int gfp_deg(const GfpPoly& f) { return static_cast<int>(f.size()) - 1; }

GfpPoly gfp_add(std::uint64_t p, const GfpPoly& a, const GfpPoly& b) {
    GfpPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::uint64_t s = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = static_cast<std::uint8_t>(s % p);
    }
    gfp_trim(r);
    return r;
}

GfpPoly gfp_sub(std::uint64_t p, const GfpPoly& a, const GfpPoly& b) {
    GfpPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::uint64_t s = p + (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
        r[i] = static_cast<std::uint8_t>(s % p);
    }
    gfp_trim(r);
    return r;
}

GfpPoly gfp_mul(std::uint64_t p, const GfpPoly& a, const GfpPoly& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint64_t> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += std::uint64_t(a[i]) * b[j];
    }
    GfpPoly r(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<std::uint8_t>(acc[i] % p);
    gfp_trim(r);
    return r;
}

GfpPoly gfp_mod(std::uint64_t p, GfpPoly a, const GfpPoly& m) {
    gfp_trim(a);
    if (m.empty()) throw ContractViolation("polynomial mod zero");
    std::uint64_t lead_inv = gfp_inv(m.back(), p);
    while (a.size() >= m.size()) {
        std::uint64_t q = std::uint64_t(a.back()) * lead_inv % p;
        std::size_t shift = a.size() - m.size();
        if (q != 0)
            for (std::size_t i = 0; i < m.size(); ++i) {
                std::uint64_t v = p * p + a[shift + i] - q * m[i] % p;
                a[shift + i] = static_cast<std::uint8_t>(v % p);
            }
        a.pop_back();
        gfp_trim(a);
        if (a.empty()) break;
    }
    return a;
}

GfpPoly gfp_gcd(std::uint64_t p, GfpPoly a, GfpPoly b) {
    gfp_trim(a);
    gfp_trim(b);
    while (!b.empty()) {
        GfpPoly r = gfp_mod(p, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        std::uint64_t inv = gfp_inv(a.back(), p);
        for (auto& c : a) c = static_cast<std::uint8_t>(std::uint64_t(c) * inv % p);
    }
    return a;
}

GfpPoly gfp_frobenius_power(std::uint64_t p, std::uint64_t k, const GfpPoly& m) {
    GfpPoly x = gfp_mod(p, GfpPoly{0, 1}, m);
    for (std::uint64_t i = 0; i < k; ++i) {
        // p-th power by square-and-multiply on the exponent p.
        GfpPoly r{1};
        GfpPoly base = x;
        std::uint64_t e = p;
        while (e) {
            if (e & 1) r = gfp_mod(p, gfp_mul(p, r, base), m);
            base = gfp_mod(p, gfp_mul(p, base, base), m);
            e >>= 1;
        }
        x = std::move(r);
    }
    return x;
}

bool gfp_is_irreducible(std::uint64_t p, const GfpPoly& f) {
    int n = gfp_deg(f);
    if (n <= 0) return false;
    if (n == 1) return true;
    // x^(p^n) == x mod f, and gcd(x^(p^(n/q)) - x, f) = 1 for prime q | n.
    GfpPoly x{0, 1};
    if (gfp_frobenius_power(p, static_cast<std::uint64_t>(n), f) != gfp_mod(p, x, f))
        return false;
    int rem = n;
    for (int q = 2; q <= rem; ++q) {
        if (rem % q != 0) continue;
        while (rem % q == 0) rem /= q;
        GfpPoly t = gfp_sub(p, gfp_frobenius_power(p, static_cast<std::uint64_t>(n / q), f),
                            gfp_mod(p, x, f));
        GfpPoly g = gfp_gcd(p, t, f);
        if (gfp_deg(g) != 0) return false;
    }
    return true;
}

GfpPoly gfp_smallest_irreducible(std::uint64_t p, std::uint32_t n) {
    if (n == 0) throw UsageError("degree must be positive");
    if (n == 1) return GfpPoly{0, 1}; // prime-field convention: poly = x
    Code total = 1;
    for (std::uint32_t i = 0; i < n; ++i) total *= p;
    for (Code v = 0; v < total; ++v) {
        GfpPoly f(n + 1, 0);
        Code t = v;
        for (std::uint32_t i = 0; i < n; ++i) {
            f[i] = static_cast<std::uint8_t>(t % p);
            t /= p;
        }
        f[n] = 1;
        if (gfp_is_irreducible(p, f)) return f;
    }
    throw ContractViolation("no irreducible found"); // unreachable
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

GfpMat GfpMat::identity(std::size_t n, std::uint64_t prime) {
    GfpMat m(n, n, prime);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

GfpMat gfp_matmul(const GfpMat& a, const GfpMat& b) {
    if (a.cols != b.rows || a.p != b.p) throw ContractViolation("gfp_matmul: shape mismatch");
    GfpMat c(a.rows, b.cols, a.p);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            std::uint64_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j)
                c.at(i, j) = static_cast<std::uint8_t>((c.at(i, j) + aik * b.at(k, j)) % a.p);
        }
    return c;
}

std::vector<std::uint8_t> gfp_matvec(const GfpMat& a, const std::vector<std::uint8_t>& v) {
    if (a.cols != v.size()) throw ContractViolation("gfp_matvec: shape mismatch");
    std::vector<std::uint8_t> out(a.rows, 0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += std::uint64_t(a.at(i, j)) * v[j];
        out[i] = static_cast<std::uint8_t>(acc % a.p);
    }
    return out;
}

namespace {

// Row-reduces `m` in place; returns pivot column per row rank order.
std::vector<std::size_t> rref(GfpMat& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
        std::size_t sel = row;
        while (sel < m.rows && m.at(sel, col) == 0) ++sel;
        if (sel == m.rows) continue;
        for (std::size_t c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(sel, c));
        std::uint64_t inv = gfp_inv(m.at(row, col), m.p);
        for (std::size_t c = 0; c < m.cols; ++c)
            m.at(row, c) = static_cast<std::uint8_t>(std::uint64_t(m.at(row, c)) * inv % m.p);
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (r == row || m.at(r, col) == 0) continue;
            std::uint64_t f = m.at(r, col);
            for (std::size_t c = 0; c < m.cols; ++c) {
                std::uint64_t v = m.p * m.p + m.at(r, c) - f * m.at(row, c) % m.p;
                m.at(r, c) = static_cast<std::uint8_t>(v % m.p);
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

std::optional<GfpMat> gfp_inverse(const GfpMat& a) {
    if (a.rows != a.cols) throw ContractViolation("gfp_inverse: not square");
    GfpMat aug(a.rows, 2 * a.cols, a.p);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols + i) = 1;
    }
    std::vector<std::size_t> pivots = rref(aug);
    if (pivots.size() != a.rows) return std::nullopt;
    for (std::size_t i = 0; i < pivots.size(); ++i)
        if (pivots[i] != i) return std::nullopt;
    GfpMat inv(a.rows, a.cols, a.p);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) inv.at(i, j) = aug.at(i, a.cols + j);
    return inv;
}

std::vector<std::vector<std::uint8_t>> gfp_kernel(const GfpMat& a) {
    GfpMat m = a;
    std::vector<std::size_t> pivots = rref(m);
    std::vector<bool> is_pivot(a.cols, false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<std::vector<std::uint8_t>> basis;
    for (std::size_t free_col = 0; free_col < a.cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<std::uint8_t> v(a.cols, 0);
        v[free_col] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            std::uint64_t val = m.at(r, free_col);
            v[pivots[r]] = static_cast<std::uint8_t>((a.p - val) % a.p);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<std::vector<std::uint8_t>> gfp_solve(const GfpMat& a,
                                                   const std::vector<std::uint8_t>& b) {
    if (a.rows != b.size()) throw ContractViolation("gfp_solve: shape mismatch");
    GfpMat aug(a.rows, a.cols + 1, a.p);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols) = b[i];
    }
    std::vector<std::size_t> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == a.cols) return std::nullopt;
    std::vector<std::uint8_t> x(a.cols, 0);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(r, a.cols);
    return x;
}

} // namespace fraisse
