#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "holosurf/chains/chain.hpp"
#include "holosurf/chains/form.hpp"
#include "holosurf/core/errors.hpp"
#include "holosurf/core/linalg.hpp"

namespace holosurf::hermitian {

using chains::SampledTwoForm;

enum class StructureKind { constant, smooth_sampled };

/// Standard complex structure on R^4 with coordinates (x1, y1, x2, y2): e_x -> e_y.
inline Mat standard_J() {
    Mat j = Mat::Zero(4, 4);
    j(1, 0) = 1.0;
    j(0, 1) = -1.0;
    j(3, 2) = 1.0;
    j(2, 3) = -1.0;
    return j;
}

/// Almost Hermitian structure (J, omega) on a region of R^n, n even. The metric is
/// g(v, w) = omega(v, J w), i.e. G = A J for omega's coefficient matrix A.
class HermitianStructure {
public:
    using MatrixField = std::function<Mat(std::span<const double>)>;
    using Sampler = std::function<Vec(std::mt19937_64&)>;

    HermitianStructure(int dim, MatrixField j, MatrixField omega, StructureKind kind, Sampler sampler = {})
        : dim_(dim), j_(std::move(j)), omega_(std::move(omega)), kind_(kind), sampler_(std::move(sampler)) {
        if (dim_ % 2 != 0 || dim_ < 2) throw ValidationError("DimensionMismatch", "almost complex structures need even dimension");
        if (!sampler_) {
            const int n = dim_;
            sampler_ = [n](std::mt19937_64& rng) {
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                Vec x(n);
                for (int i = 0; i < n; ++i) x[i] = u(rng);
                return x;
            };
        }
    }

    static HermitianStructure constant(const Mat& j, const Mat& omega) {
        if (j.rows() != j.cols() || omega.rows() != omega.cols() || j.rows() != omega.rows())
            throw ValidationError("DimensionMismatch", "J and omega must be square matrices of the same size");
        SampledTwoForm::check_skew(omega);
        return HermitianStructure(static_cast<int>(j.rows()), [j](std::span<const double>) { return j; },
                                  [omega](std::span<const double>) { return omega; }, StructureKind::constant);
    }

    static HermitianStructure standard() { return constant(standard_J(), chains::standard_omega()); }

    int dim() const noexcept { return dim_; }
    StructureKind kind() const noexcept { return kind_; }

    Mat J(const Vec& x) const { return j_(span(x)); }
    Mat omega(const Vec& x) const { return omega_(span(x)); }
    Mat metric(const Vec& x) const { return omega(x) * J(x); }

    SampledTwoForm omega_form() const {
        return SampledTwoForm(dim_, omega_,
                              kind_ == StructureKind::constant ? chains::FormSmoothness::constant
                                                               : chains::FormSmoothness::generic_smooth,
                              kind_ == StructureKind::constant ? 0 : -1);
    }

    Vec sample_point(std::mt19937_64& rng) const { return sampler_(rng); }

private:
    static std::span<const double> span(const Vec& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

    int dim_;
    MatrixField j_;
    MatrixField omega_;
    StructureKind kind_;
    Sampler sampler_;
};

/// Oriented 2-plane at a basepoint; orientation is the order (u, v).
struct OrientedPlane {
    Vec basepoint;
    Vec u;
    Vec v;
};

namespace detail {

inline void check_plane(const OrientedPlane& p, int dim) {
    if (p.u.size() != dim || p.v.size() != dim || p.basepoint.size() != dim)
        throw ValidationError("DimensionMismatch", "plane and structure dimensions differ");
    const double uu = p.u.squaredNorm(), vv = p.v.squaredNorm(), uv = p.u.dot(p.v);
    if (uu * vv - uv * uv <= 1e-14 * std::max(1.0, uu * vv))
        throw ValidationError("DegeneratePlane", "plane spanning vectors are (nearly) linearly dependent");
}

}  // namespace detail

/// 1 - omega(u, v) / vol_g(u, v) without clamping.
inline double kahler_defect_raw(const HermitianStructure& s, const OrientedPlane& p) {
    detail::check_plane(p, s.dim());
    const Mat a = s.omega(p.basepoint);
    const Mat g = s.metric(p.basepoint);
    const double guu = p.u.dot(g * p.u), gvv = p.v.dot(g * p.v);
    const double guv = 0.5 * (p.u.dot(g * p.v) + p.v.dot(g * p.u));
    const double vol2 = guu * gvv - guv * guv;
    if (!(vol2 > 0.0)) throw ValidationError("DegeneratePlane", "plane has non-positive metric area");
    return 1.0 - p.u.dot(a * p.v) / std::sqrt(vol2);
}

/// Kahler defect in [0, 2]. Values outside [-1e-10, 2 + 1e-10] indicate an invalid structure.
inline double kahler_defect(const HermitianStructure& s, const OrientedPlane& p) {
    const double d = kahler_defect_raw(s, p);
    if (d < -1e-10 || d > 2.0 + 1e-10)
        throw ValidationError("StructureInvalid", "Kahler defect " + std::to_string(d) + " outside [0, 2]: omega is not calibrated by g");
    return std::clamp(d, 0.0, 2.0);
}

/// omega|_plane <= vol_plane (+1e-12).
inline bool wirtinger_check(const HermitianStructure& s, const OrientedPlane& p) {
    detail::check_plane(p, s.dim());
    const Mat a = s.omega(p.basepoint);
    const Mat g = s.metric(p.basepoint);
    const double guu = p.u.dot(g * p.u), gvv = p.v.dot(g * p.v), guv = p.u.dot(g * p.v);
    const double vol = std::sqrt(std::max(0.0, guu * gvv - guv * guv));
    const double w = p.u.dot(a * p.v);
    // Normalise so the 1e-12 slack is relative to a unit-area plane.
    return w / vol <= 1.0 + 1e-12;
}

struct StructureReport {
    bool ok = true;
    std::string failed_identity;  ///< "J^2=-I", "taming", "compatibility", "metric"
    double worst_j_squared = 0.0;     ///< max |J^2 + I| entry
    double min_taming = std::numeric_limits<double>::infinity();  ///< min over samples and unit v of omega(v, Jv)
    double worst_compatibility = 0.0; ///< max |omega(Jv, Jw) - omega(v, w)| for unit v, w
    double worst_metric_asymmetry = 0.0;
    double min_metric_eigenvalue = std::numeric_limits<double>::infinity();
    Vec witness_point;
    Vec witness_vector;
    std::size_t samples = 0;
};

/// Monte-Carlo check of J^2 = -I, taming, compatibility and positive-definiteness of g.
inline StructureReport verify_structure(const HermitianStructure& s, std::size_t sample_count, std::uint64_t seed,
                                        double tolerance = 1e-12) {
    StructureReport rep;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const int n = s.dim();
    auto random_unit = [&] {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        return Vec(v / v.norm());
    };
    auto fail = [&](const char* what, const Vec& x, const Vec& v) {
        if (rep.ok) {
            rep.ok = false;
            rep.failed_identity = what;
            rep.witness_point = x;
            rep.witness_vector = v;
        }
    };
    const Mat identity = Mat::Identity(n, n);
    for (std::size_t k = 0; k < sample_count; ++k) {
        const Vec x = s.sample_point(rng);
        const Mat j = s.J(x), a = s.omega(x);
        const double j2 = (j * j + identity).cwiseAbs().maxCoeff();
        rep.worst_j_squared = std::max(rep.worst_j_squared, j2);
        if (j2 > tolerance) fail("J^2=-I", x, Vec::Zero(n));
        // Taming over all directions at once: smallest eigenvalue of the symmetric part of A J.
        const Mat g = a * j;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()));
        const double lmin = eig.eigenvalues().minCoeff();
        rep.min_taming = std::min(rep.min_taming, lmin);
        rep.min_metric_eigenvalue = rep.min_taming;
        if (!(lmin > 0.0)) fail("taming", x, Vec(eig.eigenvectors().col(0)));
        const Vec v = random_unit(), w = random_unit();
        const double compat = std::fabs((j * v).dot(a * (j * w)) - v.dot(a * w));
        rep.worst_compatibility = std::max(rep.worst_compatibility, compat);
        if (compat > tolerance) fail("compatibility", x, v);
        const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
        rep.worst_metric_asymmetry = std::max(rep.worst_metric_asymmetry, asym);
        if (asym > tolerance) fail("metric", x, Vec::Zero(n));
        ++rep.samples;
    }
    return rep;
}

/// Throws StructureInvalid naming the failing identity.
inline void require_valid(const HermitianStructure& s, std::size_t samples = 1000, std::uint64_t seed = 1) {
    auto rep = verify_structure(s, samples, seed);
    if (!rep.ok) throw ValidationError("StructureInvalid", "structure fails " + rep.failed_identity);
}

struct PositivityReport {
    bool positive = true;
    double min_value = std::numeric_limits<double>::infinity();  ///< min over samples of min eig of sym(A J)
    Vec witness_point;
    Vec witness_vector;  ///< v with candidate(v, Jv) <= 0 when not positive
};

/// Checks candidate(v, J v) > 0 for all v != 0 at sampled points, via the smallest eigenvalue of
/// the symmetric part of A(x) J(x).
inline PositivityReport is_positive_form(const SampledTwoForm& candidate, const HermitianStructure& s,
                                         std::size_t sample_count, std::uint64_t seed) {
    if (candidate.dim() != s.dim()) throw ValidationError("DimensionMismatch", "form and structure dimensions differ");
    PositivityReport rep;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < sample_count; ++k) {
        const Vec x = s.sample_point(rng);
        const Mat q = candidate.at(x) * s.J(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (q + q.transpose()));
        const double lmin = eig.eigenvalues().minCoeff();
        if (lmin < rep.min_value) {
            rep.min_value = lmin;
            if (!(lmin > 0.0)) {
                rep.positive = false;
                rep.witness_point = x;
                rep.witness_vector = eig.eigenvectors().col(0);
            }
        }
    }
    return rep;
}

/// Complex structure making the oriented plane span(u, v) a positively oriented complex line:
/// J u' = v' for the Gram-Schmidt frame (u', v'), completed by an orthonormal (w1, w2) with
/// det(u', v', w1, w2) > 0 and J w1 = w2.
inline Mat plane_complex_structure(const Vec& u, const Vec& v) {
    if (u.size() != 4) throw ValidationError("DimensionMismatch", "plane_complex_structure needs R^4");
    Eigen::Matrix4d basis;
    Eigen::Vector4d e0 = u.normalized();
    Eigen::Vector4d e1 = v - v.dot(e0) * e0;
    if (e1.norm() < 1e-14) throw ValidationError("DegeneratePlane", "plane spanning vectors are dependent");
    e1.normalize();
    basis.col(0) = e0;
    basis.col(1) = e1;
    int filled = 2;
    for (int i = 0; i < 4 && filled < 4; ++i) {
        Eigen::Vector4d c = Eigen::Vector4d::Unit(i);
        for (int k = 0; k < filled; ++k) c -= c.dot(basis.col(k)) * basis.col(k);
        if (c.norm() > 0.3) basis.col(filled++) = c.normalized();
    }
    if (basis.determinant() < 0) basis.col(3) = -basis.col(3);
    const Eigen::Vector4d w1 = basis.col(2), w2 = basis.col(3);
    Eigen::Matrix4d j = e1 * e0.transpose() - e0 * e1.transpose() + w2 * w1.transpose() - w1 * w2.transpose();
    return Mat(j);
}

/// Structure J(x) = R(x) J0 R(x)^T with the rotation R(x) = exp(sum_k x_k * X_k) for fixed skew
/// generators, and omega(x) = J(x)^T (g Euclidean). Smooth, non-constant, exactly Hermitian.
inline HermitianStructure rotated_standard(double rate = 0.7) {
    auto rotation = [rate](std::span<const double> x) {
        Eigen::Matrix4d gen = Eigen::Matrix4d::Zero();
        gen(0, 2) = rate * x[0];
        gen(1, 3) = rate * (x[1] - 0.5 * x[2]);
        gen(0, 3) = rate * 0.3 * x[3];
        gen(1, 2) = rate * (0.6 * x[0] * x[1]);
        gen = gen - gen.transpose().eval();
        return Eigen::Matrix4d(gen.exp());
    };
    auto jf = [rotation](std::span<const double> x) {
        Eigen::Matrix4d r = rotation(x);
        Eigen::Matrix4d j0 = standard_J();
        return Mat(r * j0 * r.transpose());
    };
    auto wf = [jf](std::span<const double> x) {
        Mat j = jf(x);
        Mat a = j.transpose();
        return Mat(0.5 * (a - a.transpose()));
    };
    return HermitianStructure(4, jf, wf, StructureKind::smooth_sampled);
}

}  // namespace holosurf::hermitian
