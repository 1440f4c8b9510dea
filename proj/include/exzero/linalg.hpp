#pragma once

// Exact Gaussian elimination over Q. Matrices are small and sparse at the
// sizes used here, so rows stay dense and zero entries are skipped.

#include "numeric.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace exzero::linalg {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

struct Echelon {
    Mat rows;                     // reduced row echelon form, nonzero rows only
    std::vector<std::size_t> pivots;
};

inline Echelon rref(Mat a, std::size_t ncols) {
    Echelon e;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < a.size(); ++c) {
        std::size_t piv = r;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[r], a[piv]);
        Rational inv = Rational(1) / a[r][c];
        for (std::size_t j = c; j < ncols; ++j)
            if (a[r][j] != 0) a[r][j] *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j < ncols; ++j)
                if (a[r][j] != 0) a[i][j] -= f * a[r][j];
        }
        e.pivots.push_back(c);
        ++r;
    }
    a.resize(r);
    e.rows = std::move(a);
    return e;
}

inline std::size_t rank(const Mat& a, std::size_t ncols) { return rref(a, ncols).pivots.size(); }

/// Basis of {x : a x = 0}.
inline std::vector<Vec> nullspace(const Mat& a, std::size_t ncols) {
    Echelon e = rref(a, ncols);
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : e.pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (std::size_t free = 0; free < ncols; ++free) {
        if (is_pivot[free]) continue;
        Vec x(ncols, 0);
        x[free] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = -e.rows[i][free];
        basis.push_back(std::move(x));
    }
    return basis;
}

inline Mat transpose(const Mat& a, std::size_t ncols) {
    Mat t(ncols, Vec(a.size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j) t[j][i] = a[i][j];
    return t;
}

inline Rational dot(const Vec& a, const Vec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

struct SolveResult {
    std::optional<Vec> solution;   // a x = b
    std::optional<Vec> obstruction;  // y with y^T a = 0 and y^T b != 0
};

/// Solves a x = b exactly; when inconsistent returns a left-kernel witness.
inline SolveResult solve(const Mat& a, const Vec& b, std::size_t ncols) {
    Mat aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
    Echelon e = rref(aug, ncols + 1);
    SolveResult res;
    if (!e.pivots.empty() && e.pivots.back() == ncols) {
        Mat at = transpose(a, ncols);
        for (const auto& y : nullspace(at, a.size())) {
            if (dot(y, b) != 0) {
                res.obstruction = y;
                break;
            }
        }
        return res;
    }
    Vec x(ncols, 0);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.rows[i][ncols];
    res.solution = std::move(x);
    return res;
}

}  // namespace exzero::linalg
