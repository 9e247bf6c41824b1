#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "holosurf/chains/chain.hpp"
#include "holosurf/surfaces/map.hpp"
#include "holosurf/surfaces/surface.hpp"

namespace holosurf::parameterize {

/// One unit-coefficient copy of a term of P, with its vertices in the copy's orientation.
struct PoolTriangle {
    std::array<RationalPoint, 3> vertices;
    std::size_t term = 0;  ///< index into the canonical chain's terms
};

struct TrianglePool {
    int ambient_dim = 4;
    std::vector<PoolTriangle> triangles;
    chains::PolyhedralChain source{4, 2};  ///< canonical form of P
};

/// Splits P into sum r_i unit copies, orientations flipped where coefficients are negative.
inline TrianglePool expand(const chains::PolyhedralChain& P, bool require_integer = true) {
    if (P.degree != 2) throw ValidationError("DimensionMismatch", "parameterization expects a 2-chain");
    TrianglePool pool;
    pool.ambient_dim = P.ambient_dim;
    pool.source = chains::canonicalize(P);
    const auto& c = pool.source;
    if (!chains::is_cycle(c)) throw ValidationError("NotACycle", "chain has nonzero boundary");
    if (!P.reduced_position && !chains::check_reduced_position(c).ok)
        throw ValidationError("NotReducedPosition", "simplices of the chain overlap in their interiors");
    if (require_integer && !chains::has_integer_coefficients(c))
        throw ValidationError("NonIntegerCoefficients", "coefficients must be integers; clear denominators first");
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        const auto& t = c.terms[i];
        auto pts = c.simplex_points(t);
        if (t.coeff < 0) std::swap(pts[1], pts[2]);
        const long r = mpz_class(abs(t.coeff).get_num()).get_si();
        for (long k = 0; k < r; ++k) pool.triangles.push_back({{pts[0], pts[1], pts[2]}, i});
    }
    return pool;
}

/// Edge k of a pool triangle runs from vertex k to vertex k+1.
struct EdgeRef {
    int triangle;
    int edge;
    bool operator==(const EdgeRef&) const = default;
};

enum class PairingStrategy { first_fit, seeded_random };

struct EdgePairing {
    std::vector<std::pair<EdgeRef, EdgeRef>> pairs;
};

/// Matches each pool edge a -> b with an edge b -> a.
inline EdgePairing pair_edges(const TrianglePool& pool, PairingStrategy strategy = PairingStrategy::first_fit,
                              std::uint64_t seed = 0) {
    // For each unordered image edge, the uses running min -> max and max -> min.
    std::map<std::pair<RationalPoint, RationalPoint>, std::array<std::vector<EdgeRef>, 2>> uses;
    for (std::size_t t = 0; t < pool.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            const auto& a = pool.triangles[t].vertices[static_cast<std::size_t>(k)];
            const auto& b = pool.triangles[t].vertices[static_cast<std::size_t>((k + 1) % 3)];
            const bool fwd = a < b;
            uses[fwd ? std::pair{a, b} : std::pair{b, a}][fwd ? 0 : 1].push_back({static_cast<int>(t), k});
        }
    EdgePairing out;
    std::mt19937_64 rng(seed);
    for (auto& [key, lists] : uses) {
        if (lists[0].size() != lists[1].size())
            throw InternalError("UnmatchableEdge", "an image edge has unequal numbers of opposite uses");
        if (strategy == PairingStrategy::seeded_random) std::shuffle(lists[1].begin(), lists[1].end(), rng);
        for (std::size_t i = 0; i < lists[0].size(); ++i) out.pairs.push_back({lists[0][i], lists[1][i]});
    }
    return out;
}

/// True when every pair joins a -> b with b -> a and every pool edge appears exactly once.
inline bool valid_pairing(const TrianglePool& pool, const EdgePairing& p) {
    std::vector<int> seen(pool.triangles.size() * 3, 0);
    for (const auto& [e, f] : p.pairs) {
        auto pt = [&](EdgeRef r, int off) -> const RationalPoint& {
            return pool.triangles[static_cast<std::size_t>(r.triangle)].vertices[static_cast<std::size_t>((r.edge + off) % 3)];
        };
        if (pt(e, 0) != pt(f, 1) || pt(e, 1) != pt(f, 0)) return false;
        ++seen[static_cast<std::size_t>(3 * e.triangle + e.edge)];
        ++seen[static_cast<std::size_t>(3 * f.triangle + f.edge)];
    }
    return std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; });
}

struct GlueResult {
    surfaces::SurfaceMap map;
    surfaces::SurfaceDiagnostic diagnostic;
    int split_vertices = 0;   ///< image points whose corners form more than one vertex
    bool subdivided = false;  ///< faces split 1 -> 4 to separate parallel edges
    std::vector<int> face_origin;  ///< pool triangle of each output face
    bool area_exact = false;       ///< area(g) = mass(P) verified exactly
};

namespace detail {

/// Exact comparison of sum sqrt(q) over faces with sum |c| sqrt(q) over the terms of P, by
/// matching multiplicities of equal squared areas.
inline bool exact_area_match(const surfaces::SurfaceMap& g, const chains::PolyhedralChain& P, bool subdivided) {
    std::map<Rational, Rational> lhs, rhs;
    for (const auto& f : g.surface().faces()) {
        std::vector<RationalPoint> pts{g.images()[static_cast<std::size_t>(f[0])], g.images()[static_cast<std::size_t>(f[1])],
                                       g.images()[static_cast<std::size_t>(f[2])]};
        Rational q = exact::gram_determinant(pts) / 4;
        // A quarter face has squared area q / 16 and contributes sqrt(q) / 4.
        if (subdivided) lhs[q * 16] += Rational(1, 4);
        else lhs[q] += 1;
    }
    for (const auto& t : P.terms) rhs[chains::squared_volume(P, t)] += abs(t.coeff);
    return lhs == rhs;
}

}  // namespace detail

/// Quotient of the pool by the pairing. Corners are identified only through paired edges, which
/// is the image-point quotient with every pinched vertex split into its link components.
inline GlueResult glue(const TrianglePool& pool, const EdgePairing& pairing) {
    if (!valid_pairing(pool, pairing)) throw InternalError("InvalidPairing", "pairing is not a perfect matching of opposite edges");
    const int nt = static_cast<int>(pool.triangles.size());
    surfaces::detail::UnionFind uf(3 * nt);
    for (const auto& [e, f] : pairing.pairs) {
        uf.unite(3 * e.triangle + e.edge, 3 * f.triangle + (f.edge + 1) % 3);
        uf.unite(3 * e.triangle + (e.edge + 1) % 3, 3 * f.triangle + f.edge);
    }
    std::map<int, int> vid;
    std::vector<RationalPoint> images;
    std::map<RationalPoint, std::vector<int>> classes_at;
    for (int c = 0; c < 3 * nt; ++c) {
        auto [it, fresh] = vid.emplace(uf.find(c), static_cast<int>(images.size()));
        if (fresh) {
            const auto& p = pool.triangles[static_cast<std::size_t>(c / 3)].vertices[static_cast<std::size_t>(c % 3)];
            images.push_back(p);
            classes_at[p].push_back(it->second);
        }
    }
    GlueResult out{surfaces::SurfaceMap::piecewise_affine({}, {})};
    for (const auto& [p, ids] : classes_at) out.split_vertices += ids.size() > 1 ? 1 : 0;
    std::vector<surfaces::Face> faces;
    for (int t = 0; t < nt; ++t) faces.push_back({vid[uf.find(3 * t)], vid[uf.find(3 * t + 1)], vid[uf.find(3 * t + 2)]});

    // Distinct quotient edges with the same endpoints cannot be told apart in a vertex-triple
    // list; split every face 1 -> 4 at edge midpoints keyed by the paired edge.
    std::map<surfaces::EdgeKey, int> uses;
    for (const auto& f : faces)
        for (int k = 0; k < 3; ++k) ++uses[{std::min(f[static_cast<std::size_t>(k)], f[static_cast<std::size_t>((k + 1) % 3)]),
                                            std::max(f[static_cast<std::size_t>(k)], f[static_cast<std::size_t>((k + 1) % 3)])}];
    out.subdivided = std::any_of(uses.begin(), uses.end(), [](const auto& u) { return u.second > 2; });
    if (out.subdivided) {
        std::vector<int> mid(static_cast<std::size_t>(3 * nt), -1);
        for (const auto& [e, f] : pairing.pairs) {
            const int id = static_cast<int>(images.size());
            const auto& a = pool.triangles[static_cast<std::size_t>(e.triangle)].vertices[static_cast<std::size_t>(e.edge)];
            const auto& b = pool.triangles[static_cast<std::size_t>(e.triangle)].vertices[static_cast<std::size_t>((e.edge + 1) % 3)];
            RationalPoint m(a.size());
            for (std::size_t d = 0; d < a.size(); ++d) m[d] = (a[d] + b[d]) / 2;
            images.push_back(std::move(m));
            mid[static_cast<std::size_t>(3 * e.triangle + e.edge)] = mid[static_cast<std::size_t>(3 * f.triangle + f.edge)] = id;
        }
        std::vector<surfaces::Face> fine;
        for (int t = 0; t < nt; ++t) {
            const auto& f = faces[static_cast<std::size_t>(t)];
            const int m0 = mid[static_cast<std::size_t>(3 * t)], m1 = mid[static_cast<std::size_t>(3 * t + 1)], m2 = mid[static_cast<std::size_t>(3 * t + 2)];
            fine.push_back({f[0], m0, m2});
            fine.push_back({m0, f[1], m1});
            fine.push_back({m2, m1, f[2]});
            fine.push_back({m0, m1, m2});
            for (int k = 0; k < 4; ++k) out.face_origin.push_back(t);
        }
        faces = std::move(fine);
    } else {
        for (int t = 0; t < nt; ++t) out.face_origin.push_back(t);
    }
    surfaces::AbstractSurface s(static_cast<int>(images.size()), std::move(faces));
    out.diagnostic = surfaces::check_surface(s);
    out.map = surfaces::SurfaceMap::piecewise_affine(std::move(s), std::move(images));
    out.area_exact = detail::exact_area_match(out.map, pool.source, out.subdivided);
    return out;
}

/// expand + pair_edges + glue.
inline GlueResult realize(const chains::PolyhedralChain& P, PairingStrategy strategy = PairingStrategy::first_fit,
                               std::uint64_t seed = 0) {
    const auto pool = expand(P);
    return glue(pool, pair_edges(pool, strategy, seed));
}

}  // namespace holosurf::parameterize
