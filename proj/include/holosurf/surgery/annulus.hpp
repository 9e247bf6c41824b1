#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "holosurf/core/linalg.hpp"
#include "holosurf/surfaces/surface.hpp"

namespace holosurf::surgery {

/// Point of the annulus h(theta, t) at unit scale. t = 0 and t = 1 give the limit circles.
inline Vec annulus_point(double theta, double t) {
    const double a = t <= 0 ? 0.0 : std::exp(-1.0 / t);
    const double b = t >= 1 ? 0.0 : std::exp(1.0 / (t - 1.0));
    Vec x(4);
    x << a * std::cos(theta), a * std::sin(theta), b * std::cos(theta), b * std::sin(theta);
    return x;
}

/// Triangulated annulus in local coordinates. Rows are t = 0, then n_t + 1 values evenly spaced
/// in [t_min, 1 - t_min], then t = 1. Row 0 is the circle of radius 1/e in the (x3, x4)-plane,
/// the last row the circle of radius 1/e in the (x1, x2)-plane.
struct AnnulusPatch {
    int n_theta = 0, rows = 0;
    std::vector<double> t;     ///< per row
    std::vector<Vec> points;   ///< row-major: row * n_theta + k
    surfaces::AbstractSurface surface;

    int id(int row, int k) const { return row * n_theta + ((k % n_theta) + n_theta) % n_theta; }
    int first_circle(int k) const { return id(0, k); }           ///< (x3, x4)-plane circle
    int last_circle(int k) const { return id(rows - 1, k); }     ///< (x1, x2)-plane circle
};

/// Faces are oriented by dtheta ^ dt, so the patch boundary is the t = 0 circle traversed with
/// increasing theta minus the t = 1 circle traversed the same way.
inline AnnulusPatch annulus_mesh(int n_theta, int n_t, double t_min = 1.0 / 64) {
    if (n_theta < 8 || n_t < 4) throw ValidationError("BadResolution", "annulus needs n_theta >= 8 and n_t >= 4");
    AnnulusPatch a;
    a.n_theta = n_theta;
    a.t.push_back(0.0);
    for (int i = 0; i <= n_t; ++i) a.t.push_back(t_min + (1.0 - 2.0 * t_min) * i / n_t);
    a.t.push_back(1.0);
    a.rows = static_cast<int>(a.t.size());
    for (int r = 0; r < a.rows; ++r)
        for (int k = 0; k < n_theta; ++k) a.points.push_back(annulus_point(2 * std::numbers::pi * k / n_theta, a.t[static_cast<std::size_t>(r)]));
    std::vector<surfaces::Face> faces;
    for (int r = 0; r + 1 < a.rows; ++r)
        for (int k = 0; k < n_theta; ++k) {
            faces.push_back({a.id(r, k), a.id(r, k + 1), a.id(r + 1, k + 1)});
            faces.push_back({a.id(r, k), a.id(r + 1, k + 1), a.id(r + 1, k)});
        }
    a.surface = surfaces::AbstractSurface(a.rows * n_theta, std::move(faces));
    return a;
}

/// Total area of the unit-scale patch.
inline double annulus_area(const AnnulusPatch& a) {
    double s = 0.0;
    for (const auto& f : a.surface.faces())
        s += 0.5 * parallelogram_area(a.points[static_cast<std::size_t>(f[1])] - a.points[static_cast<std::size_t>(f[0])],
                                      a.points[static_cast<std::size_t>(f[2])] - a.points[static_cast<std::size_t>(f[0])]);
    return s;
}

/// Largest point norm of the unit-scale patch.
inline double annulus_max_norm(const AnnulusPatch& a) {
    double m = 0.0;
    for (const auto& p : a.points) m = std::max(m, p.norm());
    return m;
}

}  // namespace holosurf::surgery
