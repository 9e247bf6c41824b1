#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "holosurf/chains/chain.hpp"
#include "holosurf/surfaces/map.hpp"

namespace holosurf::surfaces {

/// Upper bound for the flat distance of two currents: T1 - T0 = dB + A with masses bounding
/// the flat norm by mass(A) + mass(B).
struct FlatCertificate {
    double value = 0.0;            ///< weighted_volume(B) + weighted_volume(A)
    chains::PolyhedralChain B{4, 3};
    chains::PolyhedralChain A{4, 2};
};

/// Straight-line homotopy between two piecewise-affine maps of the same surface. Each face
/// sweeps a prism, split into three tetrahedra by the global vertex order so that side quads
/// shared by neighbouring faces are split the same way. Boundary edges contribute the swept
/// side strips to A, so the identity g_*S - f_*S = dB + A holds for surfaces with boundary.
inline FlatCertificate homotopy_certificate(const SurfaceMap& f, const SurfaceMap& g) {
    if (f.surface().faces() != g.surface().faces() || f.dim() != g.dim())
        throw ValidationError("DimensionMismatch", "homotopy certificate needs two maps of the same surface");
    const int n = f.dim();
    FlatCertificate c;
    c.B = chains::PolyhedralChain(n, 3);
    c.A = chains::PolyhedralChain(n, 2);
    const std::size_t nv = f.images().size();
    c.B.points = f.images();
    c.B.points.insert(c.B.points.end(), g.images().begin(), g.images().end());
    c.A.points = c.B.points;
    auto bottom = [](int v) { return static_cast<std::size_t>(v); };
    auto top = [nv](int v) { return nv + static_cast<std::size_t>(v); };
    for (const auto& face : f.surface().faces()) {
        std::array<int, 3> s = face;
        std::sort(s.begin(), s.end());
        // Sorted order differs from the face orientation by an even or odd permutation.
        const bool even = (s == face) || (s == Face{face[1], face[2], face[0]}) || (s == Face{face[2], face[0], face[1]});
        const Rational sign = even ? 1 : -1;
        auto [a, b, d] = s;
        // Prism [0,1] x (a b d) oriented so that d(prism) = top - bottom - sides.
        c.B.terms.push_back({sign, {bottom(a), bottom(b), bottom(d), top(d)}});
        c.B.terms.push_back({-sign, {bottom(a), bottom(b), top(b), top(d)}});
        c.B.terms.push_back({sign, {bottom(a), top(a), top(b), top(d)}});
    }
    // Boundary strips: minus the swept side of each boundary edge, split like the prisms.
    for (const auto& [e, uses] : f.surface().edges()) {
        if (uses.size() != 1) continue;
        const Rational s = uses[0].forward ? 1 : -1;
        const auto [p, q] = e;
        c.A.terms.push_back({-s, {bottom(p), bottom(q), top(q)}});
        c.A.terms.push_back({s, {bottom(p), top(p), top(q)}});
    }
    c.value = chains::weighted_volume(c.B) + chains::weighted_volume(c.A);
    return c;
}

/// Cone from `apex` over a 2-cycle D: D = d(apex * D), so flat(D) <= mass(apex * D).
inline FlatCertificate cone_certificate(const chains::PolyhedralChain& D, const RationalPoint& apex) {
    if (D.degree != 2) throw ValidationError("DimensionMismatch", "cone certificate expects a 2-chain");
    FlatCertificate c;
    c.B = chains::PolyhedralChain(D.ambient_dim, 3);
    c.A = chains::PolyhedralChain(D.ambient_dim, 2);
    c.B.points = D.points;
    const std::size_t ap = c.B.add_point(apex);
    for (const auto& t : D.terms) c.B.terms.push_back({t.coeff, {ap, t.vertices[0], t.vertices[1], t.vertices[2]}});
    c.value = chains::weighted_volume(c.B);
    return c;
}

}  // namespace holosurf::surfaces
