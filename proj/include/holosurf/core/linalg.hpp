#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace holosurf {

/// Small dense types; ambient dimension is at most 4, so storage stays on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

inline Vec to_vec(std::span<const double> p) {
    Vec v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
    return v;
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// Area of the parallelogram spanned by u and v: sqrt(|u|^2 |v|^2 - (u.v)^2).
inline double parallelogram_area(const Vec& u, const Vec& v) {
    const double uu = u.squaredNorm(), vv = v.squaredNorm(), uv = u.dot(v);
    return std::sqrt(std::max(0.0, uu * vv - uv * uv));
}

/// k-volume of a simplex given as k+1 points via the Gram determinant.
inline double simplex_volume(std::span<const Vec> pts) {
    const auto k = static_cast<Eigen::Index>(pts.size() - 1);
    if (k == 0) return 1.0;
    Eigen::MatrixXd e(pts[0].size(), k);
    for (Eigen::Index i = 0; i < k; ++i) e.col(i) = pts[static_cast<std::size_t>(i + 1)] - pts[0];
    const double det = (e.transpose() * e).determinant();
    double fact = 1.0;
    for (Eigen::Index i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return std::sqrt(std::max(0.0, det)) / fact;
}

}  // namespace holosurf
