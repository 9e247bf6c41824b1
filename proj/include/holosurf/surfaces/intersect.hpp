#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "holosurf/core/exact_linalg.hpp"
#include "holosurf/surfaces/map.hpp"

namespace holosurf::surfaces {

/// A self-intersection point with every face pair meeting there.
struct SelfIntersection {
    RationalPoint point;
    std::vector<std::pair<int, int>> faces;
    bool isolated = true;    ///< the two faces meet in exactly one point
    bool transverse = false; ///< tangent planes span R^4 (always false below dimension 4)
    bool interior = true;    ///< the point is interior to both faces
};

namespace detail {

inline int shared_vertices(const Face& a, const Face& b) {
    int k = 0;
    for (int x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) ++k;
    return k;
}

}  // namespace detail

/// Exact pairwise test of faces that do not share an edge. Faces sharing one vertex count only
/// when they meet somewhere other than that vertex's image.
inline std::vector<SelfIntersection> self_intersections(const SurfaceMap& map) {
    const auto& s = map.surface();
    const auto& faces = s.faces();
    const int n = map.dim();
    const std::size_t nf = faces.size();
    std::vector<Vec> lo(nf), hi(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        lo[f] = hi[f] = map.image(faces[f][0]);
        for (int k = 1; k < 3; ++k) {
            lo[f] = lo[f].cwiseMin(map.image(faces[f][static_cast<std::size_t>(k)]));
            hi[f] = hi[f].cwiseMax(map.image(faces[f][static_cast<std::size_t>(k)]));
        }
    }
    // Sweep on the first coordinate.
    std::vector<std::size_t> order(nf);
    for (std::size_t i = 0; i < nf; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo[a][0] < lo[b][0]; });
    const double slack = 1e-9;
    std::vector<SelfIntersection> out;
    auto pts = [&](std::size_t f) {
        std::vector<RationalPoint> p;
        for (int v : faces[f]) p.push_back(map.images()[static_cast<std::size_t>(v)]);
        return p;
    };
    for (std::size_t ia = 0; ia < nf; ++ia) {
        const std::size_t a = order[ia];
        for (std::size_t ib = ia + 1; ib < nf; ++ib) {
            const std::size_t b = order[ib];
            if (lo[b][0] > hi[a][0] + slack) break;
            bool overlap = true;
            for (int d = 1; d < n && overlap; ++d) overlap = lo[b][d] <= hi[a][d] + slack && lo[a][d] <= hi[b][d] + slack;
            if (!overlap) continue;
            const int shared = detail::shared_vertices(faces[a], faces[b]);
            if (shared >= 2) continue;
            const auto pa = pts(a), pb = pts(b);
            const auto hit = exact::intersect_hulls(pa, pb);
            if (!hit.nonempty) continue;
            if (shared == 1) {
                int sv = -1;
                for (int x : faces[a])
                    if (std::find(faces[b].begin(), faces[b].end(), x) != faces[b].end()) sv = x;
                if (hit.single_point && hit.point == map.images()[static_cast<std::size_t>(sv)]) continue;
            }
            SelfIntersection r;
            r.point = hit.point;
            r.faces.push_back({static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b))});
            r.isolated = hit.single_point;
            r.interior = hit.relative_interiors_meet;
            if (n == 4 && r.isolated) {
                exact::Matrix m;
                for (const auto* p : {&pa, &pb})
                    for (int k = 1; k < 3; ++k) {
                        exact::Row row(4);
                        for (std::size_t d = 0; d < 4; ++d) row[d] = (*p)[static_cast<std::size_t>(k)][d] - (*p)[0][d];
                        m.push_back(std::move(row));
                    }
                r.transverse = exact::rank(m) == 4;
            }
            auto same = std::find_if(out.begin(), out.end(), [&](const SelfIntersection& o) { return o.point == r.point; });
            if (same == out.end()) {
                out.push_back(std::move(r));
            } else {
                same->faces.push_back(r.faces[0]);
                same->isolated = same->isolated && r.isolated;
                same->transverse = same->transverse && r.transverse;
                same->interior = same->interior && r.interior;
            }
        }
    }
    return out;
}

/// Every intersection is an isolated transverse point interior to exactly two faces.
inline bool generic_intersections(const std::vector<SelfIntersection>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](const SelfIntersection& x) {
        return x.isolated && x.transverse && x.interior && x.faces.size() == 1;
    });
}

struct PerturbationReport {
    SurfaceMap map;
    double area_before = 0.0, area_after = 0.0;
    double max_displacement = 0.0;
    std::vector<SelfIntersection> intersections;
    int retries = 0;
    std::uint64_t seed_used = 0;
};

/// Moves every vertex image by a random vector of norm <= magnitude (coordinates on a grid of
/// step magnitude / 4096) until all self-intersections are generic.
inline PerturbationReport perturb_generic(const SurfaceMap& map, double magnitude, std::uint64_t seed, int max_retries = 32) {
    if (!(magnitude > 0)) throw ValidationError("BadMagnitude", "perturbation magnitude must be positive");
    const int n = map.dim();
    const long steps = 4096;
    const Rational unit = rationalize(magnitude, 1L << 40) / steps;
    PerturbationReport rep{map};
    rep.area_before = area_of_map(map);
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt);
        std::mt19937_64 rng(s);
        std::uniform_int_distribution<long> d(-steps, steps);
        auto images = map.images();
        double worst = 0.0;
        for (auto& p : images) {
            std::vector<long> k(static_cast<std::size_t>(n));
            long sq = 0;
            do {
                sq = 0;
                for (auto& x : k) {
                    x = d(rng);
                    sq += x * x;
                }
            } while (sq > steps * steps);
            for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] += unit * k[static_cast<std::size_t>(i)];
            worst = std::max(worst, std::sqrt(static_cast<double>(sq)) * unit.get_d());
        }
        auto out = SurfaceMap::piecewise_affine(map.surface(), std::move(images));
        auto xs = self_intersections(out);
        if (generic_intersections(xs)) {
            rep.map = std::move(out);
            rep.area_after = area_of_map(rep.map);
            rep.max_displacement = worst;
            rep.intersections = std::move(xs);
            rep.retries = attempt;
            rep.seed_used = s;
            return rep;
        }
    }
    throw ValidationError("RetryBudgetExhausted", "no perturbation with generic self-intersections within the retry budget");
}

}  // namespace holosurf::surfaces
