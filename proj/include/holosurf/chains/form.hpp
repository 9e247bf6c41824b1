#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "holosurf/core/errors.hpp"
#include "holosurf/core/linalg.hpp"

namespace holosurf::chains {

enum class FormSmoothness { constant, polynomial, generic_smooth };

/// A 2-form on R^n given pointwise by its skew coefficient matrix A(x):
/// omega_x(u, v) = u^T A(x) v.
class SampledTwoForm {
public:
    using Evaluator = std::function<Mat(std::span<const double>)>;

    SampledTwoForm(int dim, Evaluator eval, FormSmoothness kind = FormSmoothness::generic_smooth, int degree = -1)
        : dim_(dim), eval_(std::move(eval)), kind_(kind), degree_(degree) {}

    static SampledTwoForm constant(const Mat& a) {
        check_skew(a);
        return SampledTwoForm(static_cast<int>(a.rows()), [a](std::span<const double>) { return a; },
                              FormSmoothness::constant, 0);
    }

    int dim() const noexcept { return dim_; }
    FormSmoothness kind() const noexcept { return kind_; }
    int polynomial_degree() const noexcept { return degree_; }

    Mat at(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) throw ValidationError("DimensionMismatch", "form evaluated at a point of the wrong dimension");
        Mat a = eval_(x);
        if (a.rows() != dim_ || a.cols() != dim_) throw ValidationError("DimensionMismatch", "form evaluator returned a matrix of the wrong size");
        check_skew(a);
        return a;
    }
    Mat at(const Vec& x) const { return at(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); }

    double operator()(const Vec& x, const Vec& u, const Vec& v) const { return u.dot(at(x) * v); }

    static void check_skew(const Mat& a) {
        if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-14)
            throw ValidationError("FormNotSkew", "2-form coefficient matrix is not skew-symmetric to 1e-14");
    }

private:
    int dim_;
    Evaluator eval_;
    FormSmoothness kind_;
    int degree_;
};

/// The elementary form dx_i ^ dx_j (0-based coordinate indices) on R^n.
inline Mat elementary_form(int n, int i, int j) {
    Mat a = Mat::Zero(n, n);
    a(i, j) = 1.0;
    a(j, i) = -1.0;
    return a;
}

/// Standard symplectic form dx1^dy1 + dx2^dy2 on R^4 with coordinates (x1, y1, x2, y2).
inline Mat standard_omega() { return elementary_form(4, 0, 1) + elementary_form(4, 2, 3); }

}  // namespace holosurf::chains
