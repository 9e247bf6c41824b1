#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "holosurf/core/errors.hpp"

namespace holosurf::quadrature {

struct Node1D {
    double x;  ///< in [0, 1]
    double w;  ///< weights sum to 1
};

/// m-point Gauss-Legendre rule mapped to [0, 1]; exact for polynomials of degree <= 2m - 1.
inline std::vector<Node1D> gauss_legendre(int m) {
    std::vector<Node1D> nodes(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pm = m == 1 ? z : p1;
            double pm1 = m == 1 ? 1.0 : p0;
            dp = m * (z * pm - pm1) / (z * z - 1.0);
            double dz = pm / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = {0.5 * (1.0 - z), 0.5 * w};
    }
    return nodes;
}

/// Node on the reference triangle {(s, t) : s, t >= 0, s + t <= 1}. Weights sum to 1/2, the
/// reference area, so that sum w f(s, t) approximates the integral ds dt.
struct TriangleNode {
    double s, t, w;
};

/// Collapsed (Duffy) tensor rule exact for polynomials of total degree <= order.
inline std::vector<TriangleNode> triangle_rule(int order) {
    if (order < 1) throw ValidationError("BadQuadratureOrder", "quadrature order must be >= 1");
    const int m = (order + 3) / 2;
    auto g = gauss_legendre(m);
    std::vector<TriangleNode> out;
    out.reserve(g.size() * g.size());
    for (const auto& a : g)
        for (const auto& b : g) {
            // s = a, t = (1 - a) * b, Jacobian (1 - a)
            out.push_back({a.x, (1.0 - a.x) * b.x, a.w * b.w * (1.0 - a.x)});
        }
    return out;
}

}  // namespace holosurf::quadrature
