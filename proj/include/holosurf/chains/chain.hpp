#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holosurf/chains/form.hpp"
#include "holosurf/core/exact_linalg.hpp"
#include "holosurf/core/linalg.hpp"
#include "holosurf/core/quadrature.hpp"
#include "holosurf/core/rational.hpp"

namespace holosurf::chains {

inline constexpr int kMaxAmbientDim = 4;
inline constexpr int kDefaultQuadratureOrder = 4;

/// One weighted oriented simplex; `vertices` index the owning chain's point table and their order
/// is the orientation.
struct Term {
    Rational coeff;
    std::vector<std::size_t> vertices;
};

/// Formal rational combination of oriented affine k-simplices in R^n.
struct PolyhedralChain {
    int ambient_dim = 4;
    int degree = 2;
    std::vector<RationalPoint> points;
    std::vector<Term> terms;
    /// Set when the interiors of distinct simplices are known to be pairwise disjoint.
    bool reduced_position = false;

    PolyhedralChain() = default;
    PolyhedralChain(int n, int k) : ambient_dim(n), degree(k) {}

    bool empty() const noexcept { return terms.empty(); }

    std::size_t add_point(RationalPoint p) {
        if (static_cast<int>(p.size()) != ambient_dim)
            throw ValidationError("DimensionMismatch", "point dimension differs from the chain's ambient dimension");
        points.push_back(std::move(p));
        return points.size() - 1;
    }

    /// Appends a simplex given by coordinates (points are appended, not deduplicated).
    void add_simplex(Rational coeff, std::span<const RationalPoint> verts) {
        if (static_cast<int>(verts.size()) != degree + 1)
            throw ValidationError("DimensionMismatch", "simplex vertex count does not match the chain degree");
        Term t{std::move(coeff), {}};
        for (const auto& v : verts) t.vertices.push_back(add_point(v));
        terms.push_back(std::move(t));
    }

    std::vector<RationalPoint> simplex_points(const Term& t) const {
        std::vector<RationalPoint> out;
        out.reserve(t.vertices.size());
        for (auto v : t.vertices) out.push_back(points.at(v));
        return out;
    }

    std::vector<Vec> simplex_vecs(const Term& t) const {
        std::vector<Vec> out;
        out.reserve(t.vertices.size());
        for (auto v : t.vertices) {
            Vec x(ambient_dim);
            for (int d = 0; d < ambient_dim; ++d) x[d] = points[v][static_cast<std::size_t>(d)].get_d();
            out.push_back(std::move(x));
        }
        return out;
    }
};

namespace detail {

inline void validate_shape(const PolyhedralChain& c) {
    if (c.ambient_dim < 1 || c.ambient_dim > kMaxAmbientDim)
        throw ValidationError("DimensionMismatch", "ambient dimension must be between 1 and 4");
    if (c.degree < 0 || c.degree > 3) throw ValidationError("DimensionMismatch", "chain degree must be 0..3");
    for (const auto& p : c.points)
        if (static_cast<int>(p.size()) != c.ambient_dim)
            throw ValidationError("DimensionMismatch", "point dimension differs from the chain's ambient dimension");
    for (const auto& t : c.terms) {
        if (static_cast<int>(t.vertices.size()) != c.degree + 1)
            throw ValidationError("DimensionMismatch", "simplex vertex count does not match the chain degree");
        for (auto v : t.vertices)
            if (v >= c.points.size()) throw ValidationError("BadVertexIndex", "simplex references a missing point");
    }
}

/// Sorts ids in place and returns the permutation parity (+1 even, -1 odd).
inline int sort_with_parity(std::vector<std::size_t>& ids) {
    int sign = 1;
    for (std::size_t i = 1; i < ids.size(); ++i)
        for (std::size_t j = i; j > 0 && ids[j - 1] > ids[j]; --j) {
            std::swap(ids[j - 1], ids[j]);
            sign = -sign;
        }
    return sign;
}

}  // namespace detail

/// Normal form: duplicate points merged, unused points dropped, the point table sorted
/// lexicographically, each simplex stored with ascending vertex ids (orientation sign moved into
/// the coefficient), equal simplices merged, zero terms removed, terms sorted by vertex tuple.
inline PolyhedralChain canonicalize(const PolyhedralChain& in) {
    detail::validate_shape(in);
    // Distinct used points, sorted lexicographically.
    std::map<RationalPoint, std::size_t> order;
    for (const auto& t : in.terms) {
        if (t.coeff == 0) continue;
        for (auto v : t.vertices) order.emplace(in.points[v], 0);
    }
    PolyhedralChain out(in.ambient_dim, in.degree);
    for (auto& [p, id] : order) {
        id = out.points.size();
        out.points.push_back(p);
    }
    std::map<std::vector<std::size_t>, Rational> merged;
    for (const auto& t : in.terms) {
        if (t.coeff == 0) continue;
        std::vector<std::size_t> ids;
        for (auto v : t.vertices) ids.push_back(order.at(in.points[v]));
        auto pts = out.simplex_points(Term{0, ids});
        if (static_cast<int>(exact::affine_rank(pts)) != in.degree)
            throw ValidationError("DegenerateSimplex", "simplex with affinely dependent vertices");
        int sign = detail::sort_with_parity(ids);
        merged[ids] += sign > 0 ? t.coeff : Rational(-t.coeff);
    }
    for (auto& [ids, c] : merged)
        if (c != 0) out.terms.push_back(Term{c, ids});
    std::vector<bool> used(out.points.size(), false);
    for (const auto& t : out.terms)
        for (auto v : t.vertices) used[v] = true;
    std::vector<std::size_t> compact(out.points.size());
    std::vector<RationalPoint> kept;
    for (std::size_t i = 0; i < out.points.size(); ++i)
        if (used[i]) {
            compact[i] = kept.size();
            kept.push_back(std::move(out.points[i]));
        }
    out.points = std::move(kept);
    for (auto& t : out.terms)
        for (auto& v : t.vertices) v = compact[v];
    out.reduced_position = in.reduced_position;
    return out;
}

/// alpha * a + beta * b, canonicalized.
inline PolyhedralChain combine(const PolyhedralChain& a, const Rational& alpha, const PolyhedralChain& b,
                               const Rational& beta) {
    if (a.ambient_dim != b.ambient_dim || a.degree != b.degree)
        throw ValidationError("DimensionMismatch", "chains differ in ambient dimension or degree");
    PolyhedralChain sum(a.ambient_dim, a.degree);
    sum.points = a.points;
    for (const auto& t : a.terms) sum.terms.push_back(Term{alpha * t.coeff, t.vertices});
    const std::size_t off = sum.points.size();
    sum.points.insert(sum.points.end(), b.points.begin(), b.points.end());
    for (const auto& t : b.terms) {
        Term u{beta * t.coeff, t.vertices};
        for (auto& v : u.vertices) v += off;
        sum.terms.push_back(std::move(u));
    }
    return canonicalize(sum);
}

inline PolyhedralChain scale(const PolyhedralChain& a, const Rational& lambda) {
    PolyhedralChain out = a;
    for (auto& t : out.terms) t.coeff *= lambda;
    return canonicalize(out);
}

inline PolyhedralChain difference(const PolyhedralChain& a, const PolyhedralChain& b) {
    return combine(a, 1, b, -1);
}

/// Alternating-sign face expansion, canonicalized.
inline PolyhedralChain boundary(const PolyhedralChain& chain) {
    if (chain.degree < 1) throw ValidationError("DimensionMismatch", "boundary requires degree >= 1");
    detail::validate_shape(chain);
    PolyhedralChain out(chain.ambient_dim, chain.degree - 1);
    out.points = chain.points;
    for (const auto& t : chain.terms) {
        for (std::size_t i = 0; i < t.vertices.size(); ++i) {
            Term f{(i % 2 == 0) ? t.coeff : Rational(-t.coeff), {}};
            for (std::size_t j = 0; j < t.vertices.size(); ++j)
                if (j != i) f.vertices.push_back(t.vertices[j]);
            out.terms.push_back(std::move(f));
        }
    }
    return canonicalize(out);
}

inline bool is_cycle(const PolyhedralChain& chain) { return chain.degree == 0 || boundary(chain).empty(); }

/// Exact squared k-volume of one simplex: gram / (k!)^2.
inline Rational squared_volume(const PolyhedralChain& c, const Term& t) {
    auto pts = c.simplex_points(t);
    Rational g = exact::gram_determinant(pts);
    Rational f = 1;
    for (int i = 2; i <= c.degree; ++i) f *= i;
    return g / (f * f);
}

/// k-volume of one simplex in binary64 (sqrt of the exactly computed squared volume, so the
/// relative error is a few ulps).
inline double simplex_volume(const PolyhedralChain& c, const Term& t) {
    return std::sqrt(squared_volume(c, t).get_d());
}

struct ReducedPositionReport {
    bool ok = true;
    std::vector<std::pair<std::size_t, std::size_t>> offending;  ///< term index pairs
};

/// Exact pairwise test that relative interiors of distinct simplices are disjoint.
inline ReducedPositionReport check_reduced_position(const PolyhedralChain& chain) {
    ReducedPositionReport rep;
    const auto& terms = chain.terms;
    const int n = chain.ambient_dim;
    std::vector<RationalPoint> lo(terms.size()), hi(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        lo[i] = hi[i] = chain.points[terms[i].vertices[0]];
        for (auto v : terms[i].vertices)
            for (int d = 0; d < n; ++d) {
                const auto& x = chain.points[v][static_cast<std::size_t>(d)];
                if (x < lo[i][static_cast<std::size_t>(d)]) lo[i][static_cast<std::size_t>(d)] = x;
                if (x > hi[i][static_cast<std::size_t>(d)]) hi[i][static_cast<std::size_t>(d)] = x;
            }
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j) {
            bool overlap = true;
            for (int d = 0; d < n && overlap; ++d) {
                auto dd = static_cast<std::size_t>(d);
                if (hi[i][dd] < lo[j][dd] || hi[j][dd] < lo[i][dd]) overlap = false;
            }
            if (!overlap) continue;
            auto a = chain.simplex_points(terms[i]);
            auto b = chain.simplex_points(terms[j]);
            if (exact::intersect_hulls(a, b).relative_interiors_meet) {
                rep.ok = false;
                rep.offending.emplace_back(i, j);
            }
        }
    return rep;
}

/// Sets the reduced-position flag when the exact check passes; returns the check result.
inline bool mark_reduced_position(PolyhedralChain& chain) {
    chain.reduced_position = check_reduced_position(chain).ok;
    return chain.reduced_position;
}

/// Sum of |coefficient| * k-volume. Only meaningful in reduced position: if the flag is unset the
/// exact interior-disjointness check runs and NotReducedPosition is raised on failure.
inline double mass(const PolyhedralChain& chain) {
    if (!chain.reduced_position && !check_reduced_position(chain).ok)
        throw ValidationError("NotReducedPosition", "mass requires a chain whose simplices meet only along boundaries");
    double m = 0.0;
    for (const auto& t : chain.terms) m += std::fabs(t.coeff.get_d()) * simplex_volume(chain, t);
    return m;
}

/// Sum of |coefficient| * k-volume with no position check: an upper bound on the mass.
inline double weighted_volume(const PolyhedralChain& chain) {
    double m = 0.0;
    for (const auto& t : chain.terms) m += std::fabs(t.coeff.get_d()) * simplex_volume(chain, t);
    return m;
}

/// Integral of a 2-form over one oriented triangle with the given rule.
inline double integrate_triangle(const Vec& a, const Vec& b, const Vec& c, const SampledTwoForm& form,
                                 const std::vector<quadrature::TriangleNode>& rule) {
    const Vec e1 = b - a, e2 = c - a;
    double acc = 0.0;
    for (const auto& q : rule) {
        Vec x = a + q.s * e1 + q.t * e2;
        acc += q.w * form(x, e1, e2);
    }
    return acc;
}

/// T(omega) for a 2-chain: per-triangle collapsed Gauss rule of the given order.
inline double evaluate(const PolyhedralChain& chain, const SampledTwoForm& form,
                       int quadrature_order = kDefaultQuadratureOrder) {
    if (chain.degree != 2) throw ValidationError("DimensionMismatch", "evaluate expects a 2-chain");
    if (form.dim() != chain.ambient_dim) throw ValidationError("DimensionMismatch", "form and chain ambient dimensions differ");
    const auto rule = quadrature::triangle_rule(quadrature_order);
    double total = 0.0;
    for (const auto& t : chain.terms) {
        auto v = chain.simplex_vecs(t);
        total += t.coeff.get_d() * integrate_triangle(v[0], v[1], v[2], form, rule);
    }
    return total;
}

/// Largest denominator-free multiple test: true when every coefficient is an integer.
inline bool has_integer_coefficients(const PolyhedralChain& c) {
    return std::all_of(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.coeff.get_den() == 1; });
}

}  // namespace holosurf::chains
