#pragma once

#include <cmath>
#include <span>

#include "holosurf/chains/form.hpp"
#include "holosurf/core/errors.hpp"

namespace holosurf::norms {

/// Comass of a constant skew matrix A (n = 3 or 4).
/// In R^4, A is orthogonally equivalent to l1 e12 + l2 e34 and the comass is max(|l1|, |l2|);
/// with s = l1^2 + l2^2 = |A|_F^2 / 2 and pf = l1 l2 that is (sqrt(s + 2|pf|) + sqrt(s - 2|pf|)) / 2.
/// In R^3 every 2-form is simple and the comass is the norm of its dual vector.
inline double comass_of_matrix(const Mat& a) {
    if (a.rows() == 3) return std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
    if (a.rows() != 4) throw ValidationError("DimensionMismatch", "comass is implemented for ambient dimension 3 or 4");
    const double s = 0.5 * a.squaredNorm();
    const double pf = std::fabs(a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2));
    return 0.5 * (std::sqrt(s + 2 * pf) + std::sqrt(std::max(0.0, s - 2 * pf)));
}

inline double comass_at(const chains::SampledTwoForm& form, std::span<const double> point) {
    if (form.dim() != 3 && form.dim() != 4)
        throw ValidationError("DimensionMismatch", "comass is implemented for ambient dimension 3 or 4");
    return comass_of_matrix(form.at(point));
}

}  // namespace holosurf::norms
