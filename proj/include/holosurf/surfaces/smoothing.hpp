#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "holosurf/core/quadrature.hpp"
#include "holosurf/surfaces/certificates.hpp"
#include "holosurf/surfaces/map.hpp"

namespace holosurf::surfaces {

using Vec2 = Eigen::Vector2d;
using ParamTriangle = std::array<Vec2, 3>;

/// Flat parameter triangles per face; neighbouring faces must agree on shared edge lengths so
/// that the transition across each edge is a rigid motion.
struct FlatAtlas {
    std::vector<ParamTriangle> faces;
};

/// Each face developed isometrically from its image (the metric induced by the map).
inline FlatAtlas induced_atlas(const SurfaceMap& map) {
    FlatAtlas a;
    for (std::size_t f = 0; f < map.surface().face_count(); ++f) {
        const Jacobian j = map.jacobian(static_cast<int>(f), 0, 0);
        const double l = j.col(0).norm();
        if (l <= 0) throw ValidationError("DegenerateFace", "face with a zero-length edge cannot be developed");
        const double x = j.col(0).dot(j.col(1)) / l;
        const double y = parallelogram_area(j.col(0), j.col(1)) / l;
        a.faces.push_back({Vec2(0, 0), Vec2(l, 0), Vec2(x, y)});
    }
    return a;
}

/// Smooth compactly supported bump on the unit disk (unnormalized).
inline double standard_bump(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

struct KernelNode {
    Vec2 y;     ///< offset in the unit disk
    double w;   ///< normalized weight
};

/// Polar product rule for a radial profile: Gauss in r, uniform in angle. Weights sum to 1 and
/// the rule is symmetric under y -> -y, so it reproduces affine functions exactly.
inline std::vector<KernelNode> kernel_rule(const std::function<double(double)>& profile, int radial = 8, int angular = 24) {
    std::vector<KernelNode> out;
    const auto g = quadrature::gauss_legendre(radial);
    double total = 0.0;
    for (const auto& q : g)
        for (int k = 0; k < angular; ++k) {
            const double th = 2.0 * std::numbers::pi * (k + 0.5) / angular;
            const double w = q.w * profile(q.x) * q.x;
            out.push_back({q.x * Vec2(std::cos(th), std::sin(th)), w});
            total += w;
        }
    for (auto& n : out) n.w /= total;
    return out;
}

namespace detail {

inline Eigen::Matrix2d edge_frame(const Vec2& a, const Vec2& b) {
    Vec2 e = (b - a).normalized();
    Eigen::Matrix2d r;
    r << e.x(), -e.y(), e.y(), e.x();
    return r;
}

/// Straight-line walks on a flat surface, crossing faces by the rigid transitions of the atlas.
/// Walks leaving through a boundary edge continue in the affine extension of the last face.
class FlatWalker {
public:
    FlatWalker(const SurfaceMap& map, FlatAtlas atlas) : map_(map), atlas_(std::move(atlas)) {
        const auto& s = map.surface();
        if (atlas_.faces.size() != s.face_count()) throw ValidationError("NotFlatAtlas", "atlas needs one parameter triangle per face");
        for (const auto& t : atlas_.faces) {
            const Vec2 u = t[1] - t[0], v = t[2] - t[0];
            if (u.x() * v.y() - u.y() * v.x() <= 0)
                throw ValidationError("NotFlatAtlas", "parameter triangles must be counterclockwise and nondegenerate");
        }
        for (const auto& [e, uses] : s.edges()) {
            if (uses.size() != 2) continue;
            auto len = [&](int f) { return (param(f, e.first) - param(f, e.second)).norm(); };
            const double l0 = len(uses[0].face), l1 = len(uses[1].face);
            if (std::fabs(l0 - l1) > 1e-9 * std::max(1.0, l0))
                throw ValidationError("NotFlatAtlas", "parameter triangles disagree on a shared edge length");
            neighbour_[{uses[0].face, e}] = uses[1].face;
            neighbour_[{uses[1].face, e}] = uses[0].face;
        }
        // Interior vertices whose angle sum is not 2 pi are cone points.
        std::vector<double> angle(static_cast<std::size_t>(s.vertex_count()), 0.0);
        std::vector<char> boundary(static_cast<std::size_t>(s.vertex_count()), 0);
        for (const auto& [e, uses] : s.edges())
            if (uses.size() == 1) boundary[static_cast<std::size_t>(e.first)] = boundary[static_cast<std::size_t>(e.second)] = 1;
        for (std::size_t f = 0; f < s.face_count(); ++f)
            for (int k = 0; k < 3; ++k) {
                const auto& t = atlas_.faces[f];
                const Vec2 u = t[static_cast<std::size_t>((k + 1) % 3)] - t[static_cast<std::size_t>(k)];
                const Vec2 v = t[static_cast<std::size_t>((k + 2) % 3)] - t[static_cast<std::size_t>(k)];
                angle[static_cast<std::size_t>(s.faces()[f][static_cast<std::size_t>(k)])] += std::atan2(std::fabs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
            }
        cone_.assign(static_cast<std::size_t>(s.vertex_count()), 0);
        for (int v = 0; v < s.vertex_count(); ++v)
            if (!boundary[static_cast<std::size_t>(v)] && angle[static_cast<std::size_t>(v)] > 0 &&
                std::fabs(angle[static_cast<std::size_t>(v)] - 2 * std::numbers::pi) > 1e-9)
                cone_[static_cast<std::size_t>(v)] = 1;
    }

    const FlatAtlas& atlas() const noexcept { return atlas_; }
    bool has_cone_points() const { return std::find(cone_.begin(), cone_.end(), 1) != cone_.end(); }

    Vec2 param(int f, int v) const {
        const auto& t = map_.surface().faces()[static_cast<std::size_t>(f)];
        for (int k = 0; k < 3; ++k)
            if (t[static_cast<std::size_t>(k)] == v) return atlas_.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)];
        throw InternalError("WalkVertex", "vertex not on face");
    }

    /// Barycentric (s, t) of parameter point p in face f (may be outside the triangle).
    Vec2 reference(int f, const Vec2& p) const {
        const auto& t = atlas_.faces[static_cast<std::size_t>(f)];
        Eigen::Matrix2d m;
        m.col(0) = t[1] - t[0];
        m.col(1) = t[2] - t[0];
        return m.colPivHouseholderQr().solve(p - t[0]);
    }

    struct End {
        int face;
        Vec2 st;                ///< reference coordinates in `face`
        Eigen::Matrix2d frame;  ///< maps start-frame vectors to end-frame vectors
    };

    /// Walk from p (parameter coordinates of face f) along w; cone points closer than `radius`
    /// to the start raise DeltaTooLarge.
    End walk(int f, Vec2 p, Vec2 w, double radius) const {
        Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
        Vec2 origin = p;
        check_cones(f, origin, radius);
        for (int guard = 0; guard < 10000; ++guard) {
            const auto& tri = atlas_.faces[static_cast<std::size_t>(f)];
            // Exit parameter along the segment for each edge (k, k+1).
            double lambda = 1.0;
            int exit = -1;
            for (int k = 0; k < 3; ++k) {
                const Vec2 a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
                const Vec2 e = b - a;
                const double side_p = e.x() * (p - a).y() - e.y() * (p - a).x();
                const double side_w = e.x() * w.y() - e.y() * w.x();
                if (side_w >= 0) continue;  // moving inward or parallel (triangle is counterclockwise)
                const double l = -side_p / side_w;
                if (l < lambda) {
                    lambda = std::max(0.0, l);
                    exit = k;
                }
            }
            if (exit < 0) return {f, reference(f, p + w), frame};
            const auto& face = map_.surface().faces()[static_cast<std::size_t>(f)];
            const int va = face[static_cast<std::size_t>(exit)], vb = face[static_cast<std::size_t>((exit + 1) % 3)];
            auto it = neighbour_.find({f, {std::min(va, vb), std::max(va, vb)}});
            if (it == neighbour_.end()) return {f, reference(f, p + w), frame};
            const int g = it->second;
            // Rigid motion taking the edge in f to the same edge in g.
            const Vec2 fa = param(f, va), fb = param(f, vb), ga = param(g, va), gb = param(g, vb);
            const Eigen::Matrix2d rot = edge_frame(ga, gb) * edge_frame(fa, fb).transpose();
            auto move = [&](const Vec2& x) -> Vec2 { return ga + rot * (x - fa); };
            const Vec2 hit = p + lambda * w;
            p = move(hit);
            origin = move(origin);
            w = rot * ((1.0 - lambda) * w);
            frame = rot * frame;
            f = g;
            check_cones(f, origin, radius);
        }
        throw InternalError("WalkDiverged", "straight-line walk did not terminate");
    }

private:
    void check_cones(int f, const Vec2& origin, double radius) const {
        const auto& face = map_.surface().faces()[static_cast<std::size_t>(f)];
        for (int k = 0; k < 3; ++k) {
            const int v = face[static_cast<std::size_t>(k)];
            if (cone_[static_cast<std::size_t>(v)] &&
                (atlas_.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)] - origin).norm() < radius)
                throw ValidationError("DeltaTooLarge", "smoothing kernel support reaches a cone point of the flat atlas (vertex " +
                                                           std::to_string(v) + ")");
        }
    }

    const SurfaceMap& map_;
    FlatAtlas atlas_;
    std::map<std::pair<int, EdgeKey>, int> neighbour_;
    std::vector<char> cone_;
};

}  // namespace holosurf::surfaces::detail

struct SmoothingReport {
    SurfaceMap map;             ///< sampled-smooth convolution
    double area_before = 0.0;
    double area_after = 0.0;
    double lipschitz_before = 0.0;  ///< max operator norm of Dg in atlas coordinates
    double lipschitz_after = 0.0;   ///< sampled max for the smoothed map
    double flat_estimate = 0.0;     ///< homotopy certificate against a subdivided proxy
    SurfaceMap proxy = SurfaceMap::piecewise_affine({}, {});  ///< smoothed map sampled on the subdivision
};

/// Surface with every face split into m^2 triangles; new vertices on shared edges are shared.
/// `where` gives (face, s, t) of each new vertex in the original surface.
struct Subdivision {
    AbstractSurface surface;
    std::vector<std::array<double, 3>> where;  ///< face, s, t (face stored as double)
};

inline Subdivision subdivide(const AbstractSurface& s, int m) {
    Subdivision out;
    std::map<std::array<int, 3>, int> ids;  // key: barycentric numerators over m in terms of global vertex ids
    std::vector<Face> faces;
    for (std::size_t f = 0; f < s.face_count(); ++f) {
        const auto& t = s.faces()[f];
        auto vid = [&](int i, int j) {
            // Key by the vertex/weight pairs so points on shared edges coincide across faces.
            std::array<std::pair<int, int>, 3> c{{{t[0], m - i - j}, {t[1], i}, {t[2], j}}};
            std::sort(c.begin(), c.end());
            std::vector<std::pair<int, int>> nz;
            for (auto& x : c)
                if (x.second) nz.push_back(x);
            std::array<int, 3> key{nz[0].first, -1, -1};
            if (nz.size() == 2) key = {nz[0].first, nz[1].first, nz[0].second};
            else if (nz.size() == 3) key = {-1 - static_cast<int>(f), i, j};
            auto [it, fresh] = ids.emplace(key, static_cast<int>(out.where.size()));
            if (fresh) out.where.push_back({static_cast<double>(f), static_cast<double>(i) / m, static_cast<double>(j) / m});
            return it->second;
        };
        for (int i = 0; i < m; ++i)
            for (int j = 0; i + j < m; ++j) {
                faces.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
                if (i + j + 1 < m) faces.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
            }
    }
    out.surface = AbstractSurface(static_cast<int>(out.where.size()), std::move(faces));
    return out;
}

/// Convolution of a piecewise-affine map with a scaled kernel in the flat atlas. The kernel
/// integral is discretized by a fixed symmetric rule, so the result is an average of
/// translates of g: affine maps are reproduced and the Lipschitz constant does not grow.
inline SmoothingReport smooth_map(const SurfaceMap& g, double delta, std::optional<FlatAtlas> atlas = std::nullopt,
                                  const std::function<double(double)>& profile = standard_bump, int proxy_subdivision = 4) {
    if (!g.is_affine()) throw ValidationError("NotPiecewiseAffine", "smoothing expects a piecewise-affine map");
    if (!(delta > 0)) throw ValidationError("BadDelta", "smoothing radius must be positive");
    auto walker = std::make_shared<detail::FlatWalker>(g, atlas ? std::move(*atlas) : induced_atlas(g));
    auto base = std::make_shared<SurfaceMap>(g);
    auto rule = std::make_shared<std::vector<KernelNode>>(kernel_rule(profile));
    const int n = g.dim();
    // Derivative of g in atlas coordinates of each face.
    auto dparam = std::make_shared<std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 4, 2>>>();
    SmoothingReport rep{g};
    for (std::size_t f = 0; f < g.surface().face_count(); ++f) {
        const auto& t = walker->atlas().faces[f];
        Eigen::Matrix2d m;
        m.col(0) = t[1] - t[0];
        m.col(1) = t[2] - t[0];
        Jacobian dp = g.jacobian(static_cast<int>(f), 0, 0) * m.inverse();
        dparam->push_back(dp);
        rep.lipschitz_before = std::max(rep.lipschitz_before, Eigen::JacobiSVD<Eigen::MatrixXd>(dp).singularValues()[0]);
    }
    auto param_of = [walker](int f, double s, double t) {
        const auto& tri = walker->atlas().faces[static_cast<std::size_t>(f)];
        return Vec2(tri[0] + s * (tri[1] - tri[0]) + t * (tri[2] - tri[0]));
    };
    SurfaceMap::Evaluator eval = [=](int f, double s, double t) {
        const Vec2 p = param_of(f, s, t);
        Vec acc = Vec::Zero(n);
        for (const auto& k : *rule) {
            const auto e = walker->walk(f, p, delta * k.y, delta);
            acc += k.w * base->point(e.face, e.st.x(), e.st.y());
        }
        return acc;
    };
    SurfaceMap::JacobianEvaluator jac = [=](int f, double s, double t) {
        const Vec2 p = param_of(f, s, t);
        Jacobian d = Jacobian::Zero(n, 2);
        for (const auto& k : *rule) {
            const auto e = walker->walk(f, p, delta * k.y, delta);
            d += k.w * (*dparam)[static_cast<std::size_t>(e.face)] * e.frame;
        }
        const auto& tri = walker->atlas().faces[static_cast<std::size_t>(f)];
        Eigen::Matrix2d m;
        m.col(0) = tri[1] - tri[0];
        m.col(1) = tri[2] - tri[0];
        return Jacobian(d * m);
    };
    rep.map = SurfaceMap::sampled(g.surface(), n, eval, jac);
    rep.area_before = area_of_map(g);
    rep.area_after = area_of_map(rep.map);

    // Sampled Lipschitz constant (in atlas coordinates) and the proxy flat estimate.
    const auto sub = subdivide(g.surface(), proxy_subdivision);
    std::vector<RationalPoint> gi, fi;
    for (const auto& w : sub.where) {
        const int f = static_cast<int>(w[0]);
        gi.push_back(rational_point(to_std(g.point(f, w[1], w[2]))));
        fi.push_back(rational_point(to_std(eval(f, w[1], w[2]))));
    }
    for (std::size_t f = 0; f < g.surface().face_count(); ++f)
        for (const auto& q : quadrature::triangle_rule(2)) {
            const auto& tri = walker->atlas().faces[f];
            Eigen::Matrix2d m;
            m.col(0) = tri[1] - tri[0];
            m.col(1) = tri[2] - tri[0];
            const Jacobian dp = jac(static_cast<int>(f), q.s, q.t) * m.inverse();
            rep.lipschitz_after = std::max(rep.lipschitz_after, Eigen::JacobiSVD<Eigen::MatrixXd>(dp).singularValues()[0]);
        }
    rep.proxy = SurfaceMap::piecewise_affine(sub.surface, fi);
    rep.flat_estimate = homotopy_certificate(SurfaceMap::piecewise_affine(sub.surface, gi), rep.proxy).value;
    return rep;
}

}  // namespace holosurf::surfaces
