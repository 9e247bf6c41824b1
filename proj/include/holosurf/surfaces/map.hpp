#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "holosurf/chains/chain.hpp"
#include "holosurf/core/linalg.hpp"
#include "holosurf/core/quadrature.hpp"
#include "holosurf/core/rational.hpp"
#include "holosurf/hermitian/structure.hpp"
#include "holosurf/surfaces/surface.hpp"

namespace holosurf::surfaces {

enum class MapKind { piecewise_affine, sampled_smooth };

/// n x 2 matrix of partial derivatives with respect to the reference coordinates (s, t).
using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 4, 2>;

/// Map from a triangulated surface into R^n. Faces are parameterized over the reference triangle
/// {s, t >= 0, s + t <= 1} with (0,0), (1,0), (0,1) at the face's vertices in order.
class SurfaceMap {
public:
    using Evaluator = std::function<Vec(int face, double s, double t)>;
    using JacobianEvaluator = std::function<Jacobian(int face, double s, double t)>;

    /// Piecewise-affine map given by vertex images.
    static SurfaceMap piecewise_affine(AbstractSurface s, std::vector<RationalPoint> images) {
        if (static_cast<int>(images.size()) != s.vertex_count())
            throw ValidationError("DimensionMismatch", "one image point per surface vertex is required");
        const int n = images.empty() ? 0 : static_cast<int>(images[0].size());
        for (const auto& p : images)
            if (static_cast<int>(p.size()) != n) throw ValidationError("DimensionMismatch", "image points have different dimensions");
        SurfaceMap m;
        m.surface_ = std::move(s);
        m.kind_ = MapKind::piecewise_affine;
        m.dim_ = n;
        m.images_ = std::move(images);
        m.dimages_.reserve(m.images_.size());
        for (const auto& p : m.images_) m.dimages_.push_back(to_vec(to_double(p)));
        return m;
    }

    static SurfaceMap sampled(AbstractSurface s, int dim, Evaluator eval, JacobianEvaluator jac) {
        SurfaceMap m;
        m.surface_ = std::move(s);
        m.kind_ = MapKind::sampled_smooth;
        m.dim_ = dim;
        m.eval_ = std::move(eval);
        m.jac_ = std::move(jac);
        return m;
    }

    const AbstractSurface& surface() const noexcept { return surface_; }
    MapKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    bool is_affine() const noexcept { return kind_ == MapKind::piecewise_affine; }

    const std::vector<RationalPoint>& images() const {
        require_affine();
        return images_;
    }
    const Vec& image(int v) const {
        require_affine();
        return dimages_[static_cast<std::size_t>(v)];
    }

    Vec point(int face, double s, double t) const {
        if (kind_ == MapKind::sampled_smooth) return eval_(face, s, t);
        const auto& f = surface_.faces()[static_cast<std::size_t>(face)];
        const Vec& a = image(f[0]);
        return a + s * (image(f[1]) - a) + t * (image(f[2]) - a);
    }

    Jacobian jacobian(int face, double s, double t) const {
        if (kind_ == MapKind::sampled_smooth) return jac_(face, s, t);
        const auto& f = surface_.faces()[static_cast<std::size_t>(face)];
        Jacobian j(dim_, 2);
        j.col(0) = image(f[1]) - image(f[0]);
        j.col(1) = image(f[2]) - image(f[0]);
        return j;
    }

    /// The pushed-forward current as a polyhedral chain (one unit term per face).
    chains::PolyhedralChain to_chain() const {
        require_affine();
        chains::PolyhedralChain c(dim_, 2);
        c.points = images_;
        for (const auto& f : surface_.faces())
            c.terms.push_back({Rational(1), {static_cast<std::size_t>(f[0]), static_cast<std::size_t>(f[1]), static_cast<std::size_t>(f[2])}});
        return c;
    }

    SurfaceMap reversed() const {
        SurfaceMap m = *this;
        m.surface_ = surface_.reversed();
        if (kind_ == MapKind::sampled_smooth) {
            // Reversal swaps the roles of vertices 1 and 2, i.e. (s, t) -> (t, s).
            auto e = eval_;
            auto j = jac_;
            m.eval_ = [e](int f, double s, double t) { return e(f, t, s); };
            m.jac_ = [j](int f, double s, double t) {
                Jacobian r = j(f, t, s);
                r.col(0).swap(r.col(1));
                return r;
            };
        }
        return m;
    }

private:
    void require_affine() const {
        if (kind_ != MapKind::piecewise_affine) throw ValidationError("NotPiecewiseAffine", "operation needs a piecewise-affine map");
    }

    AbstractSurface surface_;
    MapKind kind_ = MapKind::piecewise_affine;
    int dim_ = 0;
    std::vector<RationalPoint> images_;
    std::vector<Vec> dimages_;
    Evaluator eval_;
    JacobianEvaluator jac_;
};

/// |Df| for a 2-dimensional domain: sqrt(det(J^T G J)) with G the ambient metric.
inline double jacobian_norm(const Jacobian& j, const Mat* metric = nullptr) {
    Eigen::Matrix2d g = metric ? Eigen::Matrix2d(j.transpose() * (*metric) * j) : Eigen::Matrix2d(j.transpose() * j);
    return std::sqrt(std::max(0.0, g.determinant()));
}

/// Sum over faces of the integral of |Df|. Affine faces use the closed form.
inline double area_of_map(const SurfaceMap& map, int quadrature_order = chains::kDefaultQuadratureOrder) {
    double total = 0.0;
    const int nf = static_cast<int>(map.surface().face_count());
    if (map.is_affine()) {
        for (int f = 0; f < nf; ++f) total += 0.5 * jacobian_norm(map.jacobian(f, 0, 0));
        return total;
    }
    const auto rule = quadrature::triangle_rule(quadrature_order);
    for (int f = 0; f < nf; ++f)
        for (const auto& q : rule) total += q.w * jacobian_norm(map.jacobian(f, q.s, q.t));
    return total;
}

/// Integral over the surface of f^* omega.
inline double pushforward_evaluate(const SurfaceMap& map, const chains::SampledTwoForm& form,
                                   int quadrature_order = chains::kDefaultQuadratureOrder) {
    if (form.dim() != map.dim()) throw ValidationError("DimensionMismatch", "form and map target dimensions differ");
    const auto rule = quadrature::triangle_rule(quadrature_order);
    double total = 0.0;
    for (int f = 0; f < static_cast<int>(map.surface().face_count()); ++f)
        for (const auto& q : rule) {
            const Jacobian j = map.jacobian(f, q.s, q.t);
            total += q.w * form(map.point(f, q.s, q.t), j.col(0), j.col(1));
        }
    return total;
}

struct DefectReport {
    double area = 0.0;            ///< metric area of the map
    double omega_integral = 0.0;
    double epsilon = 0.0;         ///< 1 - omega_integral / area
    std::vector<double> face_defect;   ///< per face: 1 - (face integral of omega) / (face area)
    std::vector<int> histogram;        ///< counts of face_defect over 10 equal bins of [0, 2]
    double identity_residual = 0.0;    ///< |area * (1 - epsilon) - omega_integral|
};

/// Area-averaged Kahler defect of a map. The area is taken in the structure's metric.
inline DefectReport coarse_defect(const SurfaceMap& map, const hermitian::HermitianStructure& st,
                                  int quadrature_order = chains::kDefaultQuadratureOrder) {
    if (st.dim() != map.dim()) throw ValidationError("DimensionMismatch", "structure and map target dimensions differ");
    const auto rule = quadrature::triangle_rule(quadrature_order);
    DefectReport r;
    r.histogram.assign(10, 0);
    const int nf = static_cast<int>(map.surface().face_count());
    for (int f = 0; f < nf; ++f) {
        double fa = 0.0, fo = 0.0;
        for (const auto& q : rule) {
            const Vec x = map.point(f, q.s, q.t);
            const Jacobian j = map.jacobian(f, q.s, q.t);
            const Mat g = st.metric(x);
            const double a = jacobian_norm(j, &g);
            if (a <= 1e-12)
                throw ValidationError("DegenerateFace", "map Jacobian vanishes on face " + std::to_string(f));
            fa += q.w * a;
            fo += q.w * Vec(j.col(0)).dot(st.omega(x) * Vec(j.col(1)));
        }
        r.area += fa;
        r.omega_integral += fo;
        const double d = 1.0 - fo / fa;
        r.face_defect.push_back(d);
        const int bin = std::clamp(static_cast<int>(std::floor(d / 0.2)), 0, 9);
        ++r.histogram[static_cast<std::size_t>(bin)];
    }
    r.epsilon = r.area > 0 ? 1.0 - r.omega_integral / r.area : 0.0;
    r.identity_residual = std::fabs(r.area * (1.0 - r.epsilon) - r.omega_integral);
    return r;
}

}  // namespace holosurf::surfaces
