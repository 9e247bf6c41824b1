#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holosurf/chains/chain.hpp"
#include "test_support.hpp"

using namespace holosurf;
using namespace holosurf::chains;
using holosurf::testing::P;

namespace {

PolyhedralChain triangle_chain(std::vector<RationalPoint> pts, std::vector<std::pair<Rational, std::vector<std::size_t>>> terms) {
    PolyhedralChain c(static_cast<int>(pts[0].size()), 2);
    c.points = std::move(pts);
    for (auto& [q, ids] : terms) c.terms.push_back(Term{q, ids});
    return c;
}

// Regular tetrahedron with unit edges and rational vertices in R^4.
std::vector<RationalPoint> unit_tetra() {
    return {P({0, 0, 0, 0}), P({2, 0, 0, 0}, 2), P({1, 1, 1, 1}, 2), P({1, 1, 1, -1}, 2)};
}

}  // namespace

TEST(Canonicalize, OddPermutationCancels) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0})}, {{1, {0, 1, 2}}, {1, {1, 0, 2}}});
    EXPECT_TRUE(canonicalize(c).empty());
}

TEST(Canonicalize, CoefficientsMerge) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0})},
                            {{make_rational(1, 2), {0, 1, 2}}, {make_rational(1, 3), {0, 1, 2}}});
    auto k = canonicalize(c);
    ASSERT_EQ(k.terms.size(), 1u);
    EXPECT_EQ(holosurf::abs(k.terms[0].coeff), make_rational(5, 6));
    const auto w = SampledTwoForm::constant(elementary_form(3, 0, 1));
    EXPECT_NEAR(evaluate(k, w), 5.0 / 12.0, 1e-15);
}

TEST(Canonicalize, DuplicatePointsAreMerged) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0}), P({1, 0, 0})}, {{1, {0, 1, 2}}, {-1, {0, 3, 2}}});
    EXPECT_TRUE(canonicalize(c).empty());
}

TEST(Canonicalize, DegenerateSimplexRejected) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({2, 0, 0})}, {{1, {0, 1, 2}}});
    try {
        canonicalize(c);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "DegenerateSimplex");
    }
}

TEST(Canonicalize, IdempotentAndPairingPreserving) {
    std::mt19937_64 rng(11);
    const auto form = SampledTwoForm::constant(standard_omega() + 0.3 * elementary_form(4, 0, 2));
    for (int i = 0; i < 50; ++i) {
        auto c = holosurf::testing::random_chain(rng, 4, 2, 6);
        auto k = canonicalize(c);
        auto kk = canonicalize(k);
        ASSERT_EQ(k.points, kk.points);
        ASSERT_EQ(k.terms.size(), kk.terms.size());
        for (std::size_t j = 0; j < k.terms.size(); ++j) {
            EXPECT_EQ(k.terms[j].coeff, kk.terms[j].coeff);
            EXPECT_EQ(k.terms[j].vertices, kk.terms[j].vertices);
        }
        EXPECT_NEAR(evaluate(c, form), evaluate(k, form), 1e-12);
    }
}

TEST(Boundary, TriangleFaces) {
    const auto a = P({0, 0, 0}), b = P({1, 0, 0}), c = P({0, 1, 0});
    auto tri = triangle_chain({a, b, c}, {{1, {0, 1, 2}}});
    PolyhedralChain expected(3, 1);
    expected.add_simplex(1, std::vector<RationalPoint>{b, c});
    expected.add_simplex(-1, std::vector<RationalPoint>{a, c});
    expected.add_simplex(1, std::vector<RationalPoint>{a, b});
    EXPECT_TRUE(difference(boundary(tri), expected).empty());
    EXPECT_EQ(boundary(tri).terms.size(), 3u);
}

TEST(Boundary, ClosedTetraSurface) {
    auto s = holosurf::testing::tetra_boundary(unit_tetra());
    EXPECT_EQ(s.terms.size(), 4u);
    EXPECT_TRUE(boundary(s).empty());
}

TEST(Boundary, BoundaryOfBoundaryVanishes) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        for (int n : {3, 4}) {
            auto c = holosurf::testing::random_chain(rng, n, 2, 5);
            EXPECT_TRUE(boundary(boundary(canonicalize(c))).empty());
        }
    }
    auto solid = holosurf::testing::random_chain(rng, 4, 3, 4);
    EXPECT_TRUE(boundary(boundary(canonicalize(solid))).empty());
}

TEST(Mass, UnitRightTriangle) {
    auto c = triangle_chain({P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 0, 0})}, {{1, {0, 1, 2}}});
    EXPECT_DOUBLE_EQ(mass(c), 0.5);
    c.terms[0].coeff = make_rational(2, 3);
    EXPECT_NEAR(mass(c), 1.0 / 3.0, 1e-15);
}

TEST(Mass, UnitTetraSurfaceIsSqrt3) {
    // Oracle: four equilateral unit triangles, Gram determinant 3/4 each => area sqrt(3)/4.
    auto s = holosurf::testing::tetra_boundary(unit_tetra());
    for (const auto& t : s.terms) EXPECT_EQ(squared_volume(s, t), make_rational(3, 16));
    EXPECT_NEAR(mass(s), std::sqrt(3.0), 1e-14);
}

TEST(Mass, HomogeneousInCoefficient) {
    auto s = holosurf::testing::tetra_boundary(unit_tetra());
    for (auto lambda : {make_rational(-3, 2), make_rational(2, 7), make_rational(5)}) {
        auto t = scale(s, lambda);
        t.reduced_position = true;
        EXPECT_NEAR(mass(t), std::fabs(lambda.get_d()) * mass(s), 1e-13);
    }
}

TEST(Mass, OverlapRaisesNotReducedPosition) {
    auto c = triangle_chain({P({0, 0, 0}), P({2, 0, 0}), P({0, 2, 0}), P({1, 1, 0}, 4), P({3, 1, 0}), P({1, 3, 0})},
                            {{1, {0, 1, 2}}, {1, {3, 4, 5}}});
    try {
        mass(c);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "NotReducedPosition");
    }
}

TEST(Evaluate, HolomorphicLagrangianAndOrientation) {
    const auto w0 = SampledTwoForm::constant(standard_omega());
    auto holo = triangle_chain({P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 0, 0})}, {{1, {0, 1, 2}}});
    EXPECT_NEAR(evaluate(holo, w0), 0.5, 1e-15);
    holo.terms[0].vertices = {1, 0, 2};
    EXPECT_NEAR(evaluate(holo, w0), -0.5, 1e-15);
    auto lag = triangle_chain({P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 0, 1, 0})}, {{1, {0, 1, 2}}});
    EXPECT_NEAR(evaluate(lag, w0), 0.0, 1e-15);
}

TEST(Evaluate, DimensionMismatch) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0})}, {{1, {0, 1, 2}}});
    EXPECT_THROW(evaluate(c, SampledTwoForm::constant(standard_omega())), ValidationError);
}

TEST(Evaluate, PolynomialFormExactAtOrder4) {
    // omega = x^2 y^2 dx^dy on the unit right triangle in R^3: integral of x^2 y^2 = 1/180.
    SampledTwoForm f(3, [](std::span<const double> x) {
        Mat a = Mat::Zero(3, 3);
        a(0, 1) = x[0] * x[0] * x[1] * x[1];
        a(1, 0) = -a(0, 1);
        return a;
    }, FormSmoothness::polynomial, 4);
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0})}, {{1, {0, 1, 2}}});
    EXPECT_NEAR(evaluate(c, f, 4), 1.0 / 180.0, 1e-15);
}

TEST(Evaluate, LinearInChainAndForm) {
    std::mt19937_64 rng(3);
    const auto f1 = SampledTwoForm::constant(standard_omega());
    const auto f2 = SampledTwoForm::constant(elementary_form(4, 1, 3) - 2.0 * elementary_form(4, 0, 2));
    const auto f12 = SampledTwoForm::constant(standard_omega() + 0.5 * (elementary_form(4, 1, 3) - 2.0 * elementary_form(4, 0, 2)));
    for (int i = 0; i < 20; ++i) {
        auto a = holosurf::testing::random_chain(rng, 4, 2, 4);
        auto b = holosurf::testing::random_chain(rng, 4, 2, 4);
        auto ab = combine(a, make_rational(2), b, make_rational(-1, 3));
        EXPECT_NEAR(evaluate(ab, f1), 2 * evaluate(a, f1) - evaluate(b, f1) / 3, 1e-9);
        EXPECT_NEAR(evaluate(a, f12), evaluate(a, f1) + 0.5 * evaluate(a, f2), 1e-9);
    }
}

TEST(ReducedPosition, SharedEdgeAllowed) {
    auto c = triangle_chain({P({0, 0, 0}), P({1, 0, 0}), P({0, 1, 0}), P({1, 1, 0})}, {{1, {0, 1, 2}}, {1, {1, 3, 2}}});
    EXPECT_TRUE(check_reduced_position(c).ok);
}

TEST(ReducedPosition, CoplanarOverlapReported) {
    auto c = triangle_chain({P({0, 0, 0}), P({2, 0, 0}), P({0, 2, 0}), P({1, 1, 0}, 4), P({3, 1, 0}), P({1, 3, 0})},
                            {{1, {0, 1, 2}}, {1, {3, 4, 5}}});
    auto r = check_reduced_position(c);
    EXPECT_FALSE(r.ok);
    ASSERT_EQ(r.offending.size(), 1u);
    EXPECT_EQ(r.offending[0], (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(ReducedPosition, TransverseInteriorPointInR4) {
    // (x1,y1)-triangle and (x2,y2)-triangle both containing the origin in their interiors.
    auto c = triangle_chain({P({-1, -1, 0, 0}), P({2, -1, 0, 0}), P({-1, 2, 0, 0}), P({0, 0, -1, -1}), P({0, 0, 2, -1}),
                             P({0, 0, -1, 2})},
                            {{1, {0, 1, 2}}, {1, {3, 4, 5}}});
    auto r = check_reduced_position(c);
    EXPECT_FALSE(r.ok);
    auto hit = exact::intersect_hulls(c.simplex_points(c.terms[0]), c.simplex_points(c.terms[1]));
    EXPECT_TRUE(hit.single_point);
    EXPECT_EQ(hit.point, P({0, 0, 0, 0}));
}

TEST(Rational, ParseFormats) {
    EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
    EXPECT_EQ(parse_rational("-0.125"), make_rational(-1, 8));
    EXPECT_EQ(parse_rational("1e-3"), make_rational(1, 1000));
    EXPECT_EQ(parse_rational("7"), make_rational(7));
    EXPECT_THROW(parse_rational("abc"), ValidationError);
    EXPECT_THROW(parse_rational("1/0"), ValidationError);
}
