#pragma once

#include <bit>
#include <cstdint>
#include <tuple>
#include <map>
#include <vector>

#include "holosurf/chains/chain.hpp"
#include "holosurf/norms/grid.hpp"

namespace holosurf::norms {

/// Oriented convex polygon (vertex order = orientation) with a coefficient.
struct Piece {
    Rational coeff;
    std::vector<RationalPoint> verts;
};

namespace geom {

/// Affine functional f(x) = c0 + sum c_i x_i.
struct Affine {
    Rational c0;
    std::vector<Rational> c;
    Rational operator()(const RationalPoint& x) const {
        Rational v = c0;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0) v += c[i] * x[i];
        return v;
    }
};

inline RationalPoint lerp(const RationalPoint& a, const RationalPoint& b, const Rational& t) {
    RationalPoint p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
    return p;
}

/// Drops repeated consecutive vertices; empty result when fewer than three remain or the
/// polygon is flat.
inline std::vector<RationalPoint> clean(std::vector<RationalPoint> v) {
    std::vector<RationalPoint> out;
    for (auto& p : v)
        if (out.empty() || out.back() != p) out.push_back(std::move(p));
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    if (out.size() < 3 || exact::affine_rank(out) < 2) return {};
    return out;
}

/// Part of a convex polygon where f >= 0.
inline std::vector<RationalPoint> clip(const std::vector<RationalPoint>& poly, const Affine& f) {
    std::vector<Rational> val;
    val.reserve(poly.size());
    bool all_in = true, all_out = true;
    for (const auto& p : poly) {
        val.push_back(f(p));
        if (val.back() < 0) all_in = false;
        if (val.back() > 0) all_out = false;
    }
    if (all_in) return poly;
    if (all_out) return {};
    std::vector<RationalPoint> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const std::size_t j = (i + 1) % poly.size();
        if (val[i] >= 0) out.push_back(poly[i]);
        if ((val[i] > 0 && val[j] < 0) || (val[i] < 0 && val[j] > 0))
            out.push_back(lerp(poly[i], poly[j], val[i] / (val[i] - val[j])));
    }
    return clean(std::move(out));
}

inline Affine axis_ge(std::size_t dim, std::size_t axis, const Rational& b) {
    Affine f{-b, std::vector<Rational>(dim, Rational(0))};
    f.c[axis] = 1;
    return f;
}

inline Affine axis_le(std::size_t dim, std::size_t axis, const Rational& b) {
    Affine f{b, std::vector<Rational>(dim, Rational(0))};
    f.c[axis] = -1;
    return f;
}

/// 3-volume of the tetrahedron (a, b, c, d), squared, exact.
inline Rational squared_tet_volume(const RationalPoint& a, const RationalPoint& b, const RationalPoint& c,
                                   const RationalPoint& d) {
    const std::vector<RationalPoint> pts{a, b, c, d};
    return exact::gram_determinant(pts) / 36;
}

/// 3-volume of the cone from apex c over a planar polygon (fan decomposition).
inline double cone_volume(const RationalPoint& c, const std::vector<RationalPoint>& poly) {
    double v = 0;
    for (std::size_t j = 1; j + 1 < poly.size(); ++j)
        v += std::sqrt(squared_tet_volume(c, poly[0], poly[j], poly[j + 1]).get_d());
    return v;
}

}  // namespace geom

struct DeformationReport {
    chains::PolyhedralChain output{4, 2};
    double input_mass = 0.0;
    double output_mass = 0.0;
    double mass_ratio = 0.0;        ///< output_mass / input_mass, the measured constant C
    double flat_bound = 0.0;        ///< sum |coeff| * swept cone volume: bounds F(output - input)
    chains::PolyhedralChain filling{4, 3};  ///< B with output - input = dB (as currents)
    std::vector<RationalPoint> centers;     ///< projection centers actually used
    std::uint64_t seed_used = 0;
    int retries = 0;
    std::size_t pieces = 0;
};

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Face {
    std::vector<long> base;  ///< lattice index of the lower corner
    unsigned free_mask = 0;  ///< axes along which the face extends
    bool operator<(const Face& o) const { return std::tie(free_mask, base) < std::tie(o.free_mask, o.base); }
};

struct CenterDegenerate {};

class Deformer {
public:
    Deformer(const GridSpec& g, std::uint64_t seed, bool record_filling)
        : g_(g), n_(static_cast<std::size_t>(g.dim)), seed_(seed), record_(record_filling), filling_(g.dim, 3) {}

    /// Splits a polygon along every grid hyperplane it crosses.
    std::vector<std::vector<RationalPoint>> grid_split(const std::vector<RationalPoint>& poly) const {
        std::vector<std::vector<RationalPoint>> cur{poly};
        for (std::size_t ax = 0; ax < n_; ++ax) {
            std::vector<std::vector<RationalPoint>> next;
            for (auto& p : cur) {
                Rational mn = p[0][ax], mx = mn;
                for (const auto& v : p) {
                    mn = std::min(mn, v[ax]);
                    mx = std::max(mx, v[ax]);
                }
                Rational k = (mn - g_.lo[ax]) / g_.h;
                mpz_class kk = holosurf::floor(k) + 1;
                auto rest = p;
                for (;; kk += 1) {
                    const Rational b = g_.lo[ax] + g_.h * Rational(kk);
                    if (b >= mx) break;
                    auto below = geom::clip(rest, geom::axis_le(n_, ax, b));
                    if (!below.empty()) next.push_back(std::move(below));
                    rest = geom::clip(rest, geom::axis_ge(n_, ax, b));
                    if (rest.empty()) break;
                }
                if (!rest.empty()) next.push_back(std::move(rest));
            }
            cur = std::move(next);
        }
        return cur;
    }

    Face face_of(const std::vector<RationalPoint>& p) const {
        Face f;
        f.base.resize(n_);
        for (std::size_t ax = 0; ax < n_; ++ax) {
            Rational mn = p[0][ax], mx = mn;
            for (const auto& v : p) {
                mn = std::min(mn, v[ax]);
                mx = std::max(mx, v[ax]);
            }
            const Rational k = (mn - g_.lo[ax]) / g_.h;
            f.base[ax] = holosurf::floor(k).get_si();
            if (mn == mx && k.get_den() == 1) continue;
            f.free_mask |= 1u << ax;
        }
        return f;
    }

    RationalPoint center(const Face& f) {
        auto it = centers_.find(f);
        if (it != centers_.end()) return it->second;
        RationalPoint c(n_);
        for (std::size_t ax = 0; ax < n_; ++ax) {
            c[ax] = g_.coord(static_cast<int>(ax), f.base[ax]);
            if (!(f.free_mask & (1u << ax))) continue;
            std::uint64_t hsh = splitmix(seed_ ^ (static_cast<std::uint64_t>(f.free_mask) << 56) ^ (ax << 48));
            for (long b : f.base) hsh = splitmix(hsh ^ static_cast<std::uint64_t>(b));
            const long jitter = static_cast<long>(hsh % 1999) - 999;  // |jitter| <= h/10
            c[ax] += g_.h / 2 + g_.h * make_rational(jitter, 10000);
        }
        centers_.emplace(f, c);
        return c;
    }

    /// Radial projection of a piece inside face f (dim >= 3) from the face's center onto the
    /// facets of f. Appends the images to `out`.
    void project(const Piece& piece, const Face& f, std::vector<Piece>& out) {
        const RationalPoint c = center(f);
        {
            std::vector<RationalPoint> with_c = piece.verts;
            with_c.push_back(c);
            if (exact::affine_rank(with_c) == 2 && exact::intersect_hulls(std::vector<RationalPoint>{c}, piece.verts).nonempty)
                throw CenterDegenerate{};
        }
        struct Facet {
            std::size_t axis;
            Rational bound, denom;
            int side;
        };
        std::vector<Facet> facets;
        for (std::size_t ax = 0; ax < n_; ++ax) {
            if (!(f.free_mask & (1u << ax))) continue;
            for (int s = 0; s < 2; ++s) {
                const Rational b = g_.coord(static_cast<int>(ax), f.base[ax] + s);
                facets.push_back({ax, b, b - c[ax], s});
            }
        }
        auto phi = [&](const Facet& fc, const RationalPoint& x) -> Rational { return (x[fc.axis] - c[fc.axis]) / fc.denom; };
        // Shortcut: a facet maximal at every vertex contains the whole (convex) piece's image region.
        std::vector<std::size_t> candidates;
        for (std::size_t k = 0; k < facets.size(); ++k) {
            bool everywhere = true;
            for (const auto& v : piece.verts) {
                const Rational pk = phi(facets[k], v);
                for (std::size_t l = 0; l < facets.size() && everywhere; ++l)
                    if (l != k && phi(facets[l], v) > pk) everywhere = false;
                if (!everywhere) break;
            }
            if (everywhere) {
                candidates = {k};
                break;
            }
            candidates.push_back(k);
        }
        for (auto k : candidates) {
            auto region = piece.verts;
            if (candidates.size() > 1) {
                for (std::size_t l = 0; l < facets.size() && !region.empty(); ++l) {
                    if (l == k) continue;
                    // phi_k - phi_l >= 0 as an affine functional of x.
                    geom::Affine a{0, std::vector<Rational>(n_, Rational(0))};
                    a.c[facets[k].axis] += 1 / facets[k].denom;
                    a.c0 -= c[facets[k].axis] / facets[k].denom;
                    a.c[facets[l].axis] -= 1 / facets[l].denom;
                    a.c0 += c[facets[l].axis] / facets[l].denom;
                    region = geom::clip(region, a);
                }
                if (region.empty()) continue;
            }
            std::vector<RationalPoint> image;
            for (const auto& x : region) {
                const Rational t = 1 / phi(facets[k], x);
                RationalPoint y(n_);
                for (std::size_t i = 0; i < n_; ++i) y[i] = c[i] + t * (x[i] - c[i]);
                y[facets[k].axis] = facets[k].bound;
                image.push_back(std::move(y));
            }
            // The image and the region lie on the same rays from c, so the swept set is the
            // difference of the two cones.
            const double swept = geom::cone_volume(c, image) - geom::cone_volume(c, region);
            flat_bound_ += std::fabs(piece.coeff.get_d()) * std::max(0.0, swept);
            if (record_) {
                auto add_cone = [&](const std::vector<RationalPoint>& poly, const Rational& q) {
                    for (std::size_t j = 1; j + 1 < poly.size(); ++j) {
                        const std::vector<RationalPoint> tet{c, poly[0], poly[j], poly[j + 1]};
                        if (exact::affine_rank(tet) == 3) filling_.add_simplex(q, tet);
                    }
                };
                add_cone(image, piece.coeff);
                add_cone(region, -piece.coeff);
            }
            image = geom::clean(std::move(image));
            if (!image.empty()) out.push_back({piece.coeff, std::move(image)});
        }
    }

    DeformationReport run(const chains::PolyhedralChain& chain) {
        std::vector<Piece> pieces;
        for (const auto& t : chain.terms)
            for (auto& poly : grid_split(chain.simplex_points(t))) pieces.push_back({t.coeff, std::move(poly)});
        DeformationReport rep;
        rep.pieces = pieces.size();
        for (std::size_t dim = n_; dim > 2; --dim) {
            std::vector<Piece> next;
            for (auto& p : pieces) {
                const Face f = face_of(p.verts);
                if (static_cast<std::size_t>(std::popcount(f.free_mask)) == dim) project(p, f, next);
                else next.push_back(std::move(p));
            }
            pieces = std::move(next);
        }
        // Every piece now lies in a 2-face; its coefficient there is signed area / h^2.
        std::map<Face, Rational> squares;
        for (const auto& p : pieces) {
            const Face f = face_of(p.verts);
            if (std::popcount(f.free_mask) != 2) throw InternalError("DeformationLeak", "piece did not land on the 2-skeleton");
            std::size_t i = 0, j = 0;
            for (std::size_t ax = 0, seen = 0; ax < n_; ++ax)
                if (f.free_mask & (1u << ax)) (seen++ == 0 ? i : j) = ax;
            Rational twice_area = 0;
            for (std::size_t k = 0; k < p.verts.size(); ++k) {
                const auto& a = p.verts[k];
                const auto& b = p.verts[(k + 1) % p.verts.size()];
                twice_area += a[i] * b[j] - b[i] * a[j];
            }
            squares[f] += p.coeff * twice_area / (2 * g_.h * g_.h);
        }
        rep.output = chains::PolyhedralChain(g_.dim, 2);
        for (const auto& [f, q] : squares) {
            if (q == 0) continue;
            std::size_t i = 0, j = 0;
            for (std::size_t ax = 0, seen = 0; ax < n_; ++ax)
                if (f.free_mask & (1u << ax)) (seen++ == 0 ? i : j) = ax;
            auto corner = [&](int di, int dj) {
                auto k = f.base;
                k[i] += di;
                k[j] += dj;
                return g_.point(k);
            };
            const std::vector<RationalPoint> t1{corner(0, 0), corner(1, 0), corner(1, 1)};
            const std::vector<RationalPoint> t2{corner(0, 0), corner(0, 1), corner(1, 1)};
            rep.output.add_simplex(q, t1);
            rep.output.add_simplex(-q, t2);
            rep.output_mass += std::fabs(q.get_d()) * Rational(g_.h * g_.h).get_d();
        }
        rep.output = chains::canonicalize(rep.output);
        rep.output.reduced_position = true;
        rep.flat_bound = flat_bound_;
        rep.filling = std::move(filling_);
        for (const auto& [f, c] : centers_) rep.centers.push_back(c);
        return rep;
    }

private:
    const GridSpec& g_;
    std::size_t n_;
    std::uint64_t seed_;
    bool record_;
    double flat_bound_ = 0.0;
    chains::PolyhedralChain filling_;
    std::map<Face, RationalPoint> centers_;
};

}  // namespace detail

/// Pushes a 2-cycle onto the 2-skeleton of the cubical grid by successive radial projections
/// from jittered face centers (top cells first). Returns the grid cycle (as Kuhn triangles of
/// the grid squares) together with the swept-volume flat bound and its filling.
inline DeformationReport deform_to_grid(const chains::PolyhedralChain& chain, const GridSpec& grid, std::uint64_t seed,
                                        bool record_filling = true, int max_retries = 8) {
    if (chain.degree != 2 || chain.ambient_dim != grid.dim)
        throw ValidationError("DimensionMismatch", "deformation needs a 2-chain in the grid's dimension");
    if (grid.dim < 2 || grid.dim > 4) throw ValidationError("DimensionMismatch", "grid dimension must be 2..4");
    const auto k = chains::canonicalize(chain);
    for (const auto& p : k.points)
        if (!grid.strictly_contains(p)) throw ValidationError("SupportOutsideGrid", "chain is not strictly inside the grid box");
    if (!chains::is_cycle(k)) throw ValidationError("NotACycle", "deformation requires a cycle");
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL;
        try {
            detail::Deformer d(grid, s, record_filling);
            auto rep = d.run(k);
            rep.seed_used = s;
            rep.retries = attempt;
            rep.input_mass = k.reduced_position ? chains::mass(k) : chains::weighted_volume(k);
            if (k.empty()) rep.input_mass = 0.0;
            rep.mass_ratio = rep.input_mass > 0 ? rep.output_mass / rep.input_mass : 0.0;
            return rep;
        } catch (const detail::CenterDegenerate&) {
            continue;
        }
    }
    throw ValidationError("CenterDegenerate", "projection center met the chain for every jitter seed tried");
}

}  // namespace holosurf::norms
