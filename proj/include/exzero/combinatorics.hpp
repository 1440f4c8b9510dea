#pragma once

// Determinant of the left k×k block of a k×m matrix with zero row sums,
// expanded over maps f: {1..k} -> {1..m} that leave no nonempty subset of
// {1..k} invariant.

#include "numeric.hpp"

#include <stdexcept>
#include <vector>

namespace exzero {

using IntMatrix = std::vector<std::vector<Integer>>;

inline Integer determinant(IntMatrix a) {
    // Bareiss fraction-free elimination.
    const std::size_t n = a.size();
    if (n == 0) return 1;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

/// f restricted to {0..k-1} has no invariant nonempty subset iff every
/// orbit leaves {0..k-1}, i.e. f has no cycle inside it.
inline bool admissible(const std::vector<std::size_t>& f, std::size_t k) {
    for (std::size_t start = 0; start < k; ++start) {
        std::size_t x = start;
        for (std::size_t steps = 0; steps <= k; ++steps) {
            if (x >= k) break;
            if (steps == k) return false;
            x = f[x];
        }
    }
    return true;
}

struct DetExpansion {
    Integer determinant;
    Integer expansion;
    long admissible_maps = 0;
};

inline DetExpansion det_fixedpointfree_expansion(const IntMatrix& a) {
    const std::size_t k = a.size();
    if (k == 0) throw std::invalid_argument("empty matrix");
    const std::size_t m = a[0].size();
    if (m < k) throw std::invalid_argument("need k <= m");
    for (std::size_t i = 0; i < k; ++i) {
        if (a[i].size() != m) throw std::invalid_argument("ragged matrix");
        Integer s = 0;
        for (const auto& x : a[i]) s += x;
        if (s != 0) throw std::invalid_argument("row " + std::to_string(i + 1) + " does not sum to zero");
    }

    DetExpansion out;
    IntMatrix block(k, std::vector<Integer>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) block[i][j] = a[i][j];
    out.determinant = determinant(block);

    std::vector<std::size_t> f(k, 0);
    Integer sum = 0;
    for (;;) {
        if (admissible(f, k)) {
            Integer prod = 1;
            for (std::size_t i = 0; i < k && prod != 0; ++i) prod *= a[i][f[i]];
            sum += prod;
            ++out.admissible_maps;
        }
        std::size_t pos = 0;
        while (pos < k && ++f[pos] == m) f[pos++] = 0;
        if (pos == k) break;
    }
    out.expansion = (k % 2 == 0) ? sum : Integer(-sum);
    return out;
}

}  // namespace exzero
