#pragma once

#include <random>
#include <vector>

#include "holosurf/chains/chain.hpp"

namespace holosurf::testing {

inline RationalPoint P(std::initializer_list<long> xs, long den = 1) {
    RationalPoint p;
    for (long x : xs) p.push_back(make_rational(x, den));
    return p;
}

inline Vec V(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

/// Random rational point with coordinates k/den, k uniform in [lo, hi].
inline RationalPoint random_point(std::mt19937_64& rng, int n, long lo, long hi, long den) {
    std::uniform_int_distribution<long> d(lo, hi);
    RationalPoint p;
    for (int i = 0; i < n; ++i) p.push_back(make_rational(d(rng), den));
    return p;
}

/// Random 2-chain (not a cycle) over a shared pool of points; simplices may overlap.
inline chains::PolyhedralChain random_chain(std::mt19937_64& rng, int n, int degree, int terms) {
    chains::PolyhedralChain c(n, degree);
    const int pool = terms + degree + 2;
    for (int i = 0; i < pool; ++i) c.add_point(random_point(rng, n, -20, 20, 7));
    std::uniform_int_distribution<int> pick(0, pool - 1), coeff(-6, 6), den(1, 5);
    while (static_cast<int>(c.terms.size()) < terms) {
        std::vector<std::size_t> ids;
        while (static_cast<int>(ids.size()) < degree + 1) {
            auto v = static_cast<std::size_t>(pick(rng));
            if (std::find(ids.begin(), ids.end(), v) == ids.end()) ids.push_back(v);
        }
        auto pts = c.simplex_points(chains::Term{0, ids});
        if (static_cast<int>(exact::affine_rank(pts)) != degree) continue;
        int k = coeff(rng);
        if (k == 0) k = 1;
        c.terms.push_back(chains::Term{make_rational(k, den(rng)), ids});
    }
    return c;
}

/// Boundary of the standard-ish tetrahedron (a, b, c, d): the closed surface d(abcd).
inline chains::PolyhedralChain tetra_boundary(const std::vector<RationalPoint>& v, const Rational& coeff = 1) {
    chains::PolyhedralChain solid(static_cast<int>(v[0].size()), 3);
    solid.add_simplex(coeff, v);
    auto b = chains::boundary(solid);
    b.reduced_position = true;
    return b;
}

}  // namespace holosurf::testing
