#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "holosurf/core/rational.hpp"

namespace holosurf::exact {

using Row = std::vector<Rational>;
using Matrix = std::vector<Row>;

/// Rank by fraction-free-enough Gaussian elimination over Q. The input is copied.
inline std::size_t rank(Matrix m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

/// Solves a square system exactly; nullopt when singular.
inline std::optional<Row> solve(Matrix a, Row b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    Row x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Unique solution of an m x k system with m >= k, or nullopt when it is inconsistent or the
/// columns are dependent.
inline std::optional<Row> solve_overdetermined(Matrix a, Row b) {
    const std::size_t m = a.size();
    const std::size_t k = m == 0 ? 0 : a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < k; ++c, ++r) {
        std::size_t piv = r;
        while (piv < m && a[piv][c] == 0) ++piv;
        if (piv == m) return std::nullopt;
        std::swap(a[piv], a[r]);
        std::swap(b[piv], b[r]);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < k; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
    }
    for (std::size_t i = k; i < m; ++i)
        if (b[i] != 0) return std::nullopt;
    Row x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = b[i] / a[i][i];
    return x;
}

inline Rational determinant(Matrix a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

/// Gram determinant of the edge vectors p_i - p_0; equals (k! * volume)^2 for a k-simplex.
inline Rational gram_determinant(std::span<const RationalPoint> pts) {
    const std::size_t k = pts.size() - 1;
    std::vector<Row> edges(k);
    for (std::size_t i = 0; i < k; ++i) {
        edges[i].resize(pts[0].size());
        for (std::size_t d = 0; d < pts[0].size(); ++d) edges[i][d] = pts[i + 1][d] - pts[0][d];
    }
    Matrix g(k, Row(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            Rational s = 0;
            for (std::size_t d = 0; d < edges[i].size(); ++d) s += edges[i][d] * edges[j][d];
            g[i][j] = s;
            g[j][i] = s;
        }
    return determinant(std::move(g));
}

/// Rank of the affine hull dimension of a point set (number of independent edge vectors).
inline std::size_t affine_rank(std::span<const RationalPoint> pts) {
    if (pts.size() < 2) return 0;
    Matrix m;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Row r(pts[0].size());
        for (std::size_t d = 0; d < r.size(); ++d) r[d] = pts[i][d] - pts[0][d];
        m.push_back(std::move(r));
    }
    return rank(std::move(m));
}

/// Result of intersecting the convex hulls of two small point sets (simplices).
struct HullIntersection {
    bool nonempty = false;
    bool relative_interiors_meet = false;  ///< some common point has all barycentric weights > 0 on both sides
    bool single_point = false;             ///< intersection set is exactly one point
    RationalPoint point;                   ///< a point of the intersection when nonempty
};

/// Exact intersection of conv(a) and conv(b), by enumerating the basic feasible solutions of
/// {lambda, mu >= 0 : sum lambda = sum mu = 1, sum lambda_i a_i = sum mu_j b_j}. Intended for
/// simplices (at most 4 + 4 points), where the enumeration is tiny.
inline HullIntersection intersect_hulls(std::span<const RationalPoint> a, std::span<const RationalPoint> b) {
    const std::size_t na = a.size(), nb = b.size(), nv = na + nb, dim = a[0].size();
    Matrix eq;
    Row rhs;
    {
        Row r(nv, 0);
        for (std::size_t i = 0; i < na; ++i) r[i] = 1;
        eq.push_back(r);
        rhs.push_back(1);
        Row s(nv, 0);
        for (std::size_t j = 0; j < nb; ++j) s[na + j] = 1;
        eq.push_back(s);
        rhs.push_back(1);
    }
    for (std::size_t d = 0; d < dim; ++d) {
        Row r(nv);
        for (std::size_t i = 0; i < na; ++i) r[i] = a[i][d];
        for (std::size_t j = 0; j < nb; ++j) r[na + j] = -b[j][d];
        eq.push_back(std::move(r));
        rhs.push_back(0);
    }
    // Reduce to independent rows (row echelon on the augmented system).
    Matrix aug = eq;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
    std::vector<Row> indep;
    {
        std::size_t r = 0;
        const std::size_t rows = aug.size();
        for (std::size_t c = 0; c < nv && r < rows; ++c) {
            std::size_t piv = r;
            while (piv < rows && aug[piv][c] == 0) ++piv;
            if (piv == rows) continue;
            std::swap(aug[piv], aug[r]);
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (aug[i][c] == 0) continue;
                Rational f = aug[i][c] / aug[r][c];
                for (std::size_t j = c; j <= nv; ++j) aug[i][j] -= f * aug[r][j];
            }
            ++r;
        }
        for (std::size_t i = r; i < rows; ++i)
            if (aug[i][nv] != 0) return {};  // inconsistent: affine hulls are disjoint
        indep.assign(aug.begin(), aug.begin() + static_cast<std::ptrdiff_t>(r));
    }
    const std::size_t r = indep.size();
    std::vector<Row> vertices;
    // Enumerate all r-subsets of the variables.
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    while (true) {
        Matrix sub(r, Row(r));
        Row b(r);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) sub[i][j] = indep[i][idx[j]];
            b[i] = indep[i][nv];
        }
        if (auto x = solve(std::move(sub), std::move(b))) {
            bool feasible = std::all_of(x->begin(), x->end(), [](const Rational& v) { return v >= 0; });
            if (feasible) {
                Row full(nv, 0);
                for (std::size_t j = 0; j < r; ++j) full[idx[j]] = (*x)[j];
                vertices.push_back(std::move(full));
            }
        }
        // next combination
        std::size_t k = r;
        while (k > 0 && idx[k - 1] == nv - r + k - 1) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
    HullIntersection out;
    if (vertices.empty()) return out;
    out.nonempty = true;
    auto image = [&](const Row& v) {
        RationalPoint p(dim, 0);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t d = 0; d < dim; ++d) p[d] += v[i] * a[i][d];
        return p;
    };
    out.point = image(vertices.front());
    out.single_point = true;
    for (std::size_t v = 1; v < vertices.size() && out.single_point; ++v)
        if (image(vertices[v]) != out.point) out.single_point = false;
    out.relative_interiors_meet = true;
    for (std::size_t j = 0; j < nv; ++j) {
        bool positive_somewhere = std::any_of(vertices.begin(), vertices.end(), [&](const Row& v) { return v[j] > 0; });
        if (!positive_somewhere) {
            out.relative_interiors_meet = false;
            break;
        }
    }
    return out;
}

}  // namespace holosurf::exact
