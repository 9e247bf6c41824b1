#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "holosurf/chains/chain.hpp"
#include "holosurf/hermitian/structure.hpp"

namespace holosurf::hermitian {

/// Euclidean distance from x to the closed triangle (a, b, c) in R^n.
inline double point_triangle_distance(const Vec& x, const Vec& a, const Vec& b, const Vec& c) {
    const Vec e1 = b - a, e2 = c - a, d = x - a;
    const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
    const double r1 = e1.dot(d), r2 = e2.dot(d);
    const double det = g11 * g22 - g12 * g12;
    const double s = (g22 * r1 - g12 * r2) / det, t = (g11 * r2 - g12 * r1) / det;
    if (s >= 0 && t >= 0 && s + t <= 1) return (d - s * e1 - t * e2).norm();
    auto seg = [&x](const Vec& p, const Vec& q) {
        const Vec e = q - p;
        const double l = std::clamp((x - p).dot(e) / e.squaredNorm(), 0.0, 1.0);
        return (x - p - l * e).norm();
    };
    return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

/// Almost Hermitian structure on a neighbourhood of an oriented triangulated surface in R^4 for
/// which every face is a J-holomorphic line away from strips of width ~sigma along its edges.
/// J(x) is the normalised blend of the per-face complex structures with Gaussian weights in the
/// distance to each face (relative to the nearest one); g is Euclidean and omega = g(J., .).
/// All face structures lie in the same orientation class, so a nonzero blend M satisfies
/// M^2 = -|m|^2 I and normalises to a complex structure. The blend can vanish far from the
/// surface; evaluating there throws StructureInvalid.
inline HermitianStructure face_adapted(const chains::PolyhedralChain& surface, double sigma) {
    if (surface.ambient_dim != 4 || surface.degree != 2)
        throw ValidationError("DimensionMismatch", "face-adapted structure needs a 2-chain in R^4");
    if (!(sigma > 0)) throw ValidationError("BadParameter", "sigma must be positive");
    struct Face {
        Vec a, b, c;
        Mat j;
    };
    auto faces = std::make_shared<std::vector<Face>>();
    for (const auto& t : surface.terms) {
        auto p = surface.simplex_vecs(t);
        Vec u = p[1] - p[0], v = p[2] - p[0];
        // A negative coefficient flips the face orientation.
        if (sgn(t.coeff) < 0) std::swap(u, v);
        faces->push_back({p[0], p[1], p[2], plane_complex_structure(u, v)});
    }
    if (faces->empty()) throw ValidationError("EmptyChain", "face-adapted structure needs at least one face");
    auto jf = [faces, sigma](std::span<const double> xs) {
        const Vec x = to_vec(xs);
        std::vector<double> d(faces->size());
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < faces->size(); ++k) {
            const auto& f = (*faces)[k];
            d[k] = point_triangle_distance(x, f.a, f.b, f.c);
            dmin = std::min(dmin, d[k]);
        }
        Mat m = Mat::Zero(4, 4);
        for (std::size_t k = 0; k < faces->size(); ++k) {
            const double z = (d[k] - dmin) / sigma;
            if (z < 40.0) m += std::exp(-z * z) * (*faces)[k].j;
        }
        const double scale2 = -(m * m).trace() / 4.0;
        if (!(scale2 > 1e-16)) throw ValidationError("StructureInvalid", "face-adapted structure undefined at this point");
        return Mat(m / std::sqrt(scale2));
    };
    auto wf = [jf](std::span<const double> x) {
        const Mat j = jf(x);
        return Mat(0.5 * (j.transpose() - j));
    };
    auto sampler = [faces, sigma](std::mt19937_64& rng) {
        std::uniform_int_distribution<std::size_t> pick(0, faces->size() - 1);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> g;
        const auto& f = (*faces)[pick(rng)];
        double s = u01(rng), t = u01(rng);
        if (s + t > 1) {
            s = 1 - s;
            t = 1 - t;
        }
        Vec off(4);
        for (int i = 0; i < 4; ++i) off[i] = g(rng);
        return Vec(f.a + s * (f.b - f.a) + t * (f.c - f.a) + 0.5 * sigma * u01(rng) * off.normalized());
    };
    return HermitianStructure(4, jf, wf, StructureKind::smooth_sampled, sampler);
}

}  // namespace holosurf::hermitian
