#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holosurf/hermitian/adapted.hpp"
#include "holosurf/hermitian/structure.hpp"
#include "test_support.hpp"

using namespace holosurf;
using namespace holosurf::hermitian;
using holosurf::testing::V;

namespace {

Vec random_vec(std::mt19937_64& rng, int n = 4) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

OrientedPlane plane(const Vec& u, const Vec& v) { return {Vec::Zero(u.size()), u, v}; }

}  // namespace

TEST(KahlerDefect, SpecExamples) {
    const auto s = HermitianStructure::standard();
    const Mat j = standard_J();
    const Vec v = V({0.3, -1.2, 0.7, 2.0});
    EXPECT_NEAR(kahler_defect(s, plane(v, j * v)), 0.0, 1e-14);
    EXPECT_NEAR(kahler_defect(s, plane(j * v, v)), 2.0, 1e-14);
    EXPECT_NEAR(kahler_defect(s, plane(V({1, 0, 0, 0}), V({0, 0, 1, 0}))), 1.0, 1e-15);
}

TEST(KahlerDefect, DegeneratePlane) {
    const auto s = HermitianStructure::standard();
    try {
        kahler_defect(s, plane(V({1, 2, 0, 0}), V({2, 4, 0, 0})));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "DegeneratePlane");
    }
}

TEST(KahlerDefect, ReversalRescalingAndRebasing) {
    const auto s = HermitianStructure::standard();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Vec u = random_vec(rng), v = random_vec(rng);
        const double d = kahler_defect(s, plane(u, v));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
        EXPECT_NEAR(kahler_defect(s, plane(v, u)), 2.0 - d, 1e-12);
        EXPECT_NEAR(kahler_defect(s, plane(3.5 * u, 0.2 * v)), d, 1e-10);
        // Oriented re-basing with a positive-determinant change of basis.
        EXPECT_NEAR(kahler_defect(s, plane(2.0 * u + v, -u + 0.5 * v)), d, 1e-10);
    }
}

TEST(KahlerDefect, ZeroExactlyOnComplexLines) {
    const auto s = HermitianStructure::standard();
    const Mat j = standard_J();
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const Vec u = random_vec(rng), v = random_vec(rng);
        // J-invariant with the J orientation: (a u + b Ju, c u + d Ju) with ad - bc > 0.
        const Vec a = 1.3 * u + 0.4 * (j * u), b = -0.2 * u + 0.9 * (j * u);
        EXPECT_LE(kahler_defect(s, plane(a, b)), 1e-12);
        // Generic planes are not J-invariant: span distance to J(span) is large, defect is positive.
        const Vec w = v - v.dot(u) / u.squaredNorm() * u;
        const Vec jw = j * w;
        Eigen::Matrix<double, 4, 2> basis;
        basis.col(0) = u.normalized();
        basis.col(1) = w.normalized();
        const double dist = (jw.normalized() - basis * (basis.transpose() * jw.normalized())).norm();
        if (dist > 1e-6) EXPECT_GT(kahler_defect(s, plane(u, v)), 1e-12);
    }
}

TEST(Wirtinger, RandomPlanesAndNearInvariant) {
    const auto s = HermitianStructure::standard();
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20000; ++i) EXPECT_TRUE(wirtinger_check(s, plane(random_vec(rng), random_vec(rng))));
    const Mat j = standard_J();
    const Vec v = V({1, 0.5, -0.25, 2}), w = V({0, 0, 1, 0});
    const auto p = plane(v, j * v + 1e-3 * w);
    EXPECT_TRUE(wirtinger_check(s, p));
    const double d = kahler_defect(s, p);
    EXPECT_GT(d, 0.0);
    EXPECT_LT(d, 1e-5);  // O(delta^2)
}

TEST(VerifyStructure, StandardPasses) {
    auto r = verify_structure(HermitianStructure::standard(), 10000, 1);
    EXPECT_TRUE(r.ok);
    EXPECT_LE(r.worst_j_squared, 1e-14);
    EXPECT_LE(r.worst_compatibility, 1e-14);
    EXPECT_LE(r.worst_metric_asymmetry, 1e-14);
    EXPECT_NEAR(r.min_metric_eigenvalue, 1.0, 1e-14);
}

TEST(VerifyStructure, FlippedBlockFailsTaming) {
    const Mat flipped = chains::elementary_form(4, 0, 1) - chains::elementary_form(4, 2, 3);
    const auto s = HermitianStructure::constant(standard_J(), flipped);
    auto r = verify_structure(s, 1000, 2);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.failed_identity, "taming");
    const Vec v = r.witness_vector;
    EXPECT_LT(v.dot(flipped * (standard_J() * v)), 0.0);
    // Explicit counterexample e_{x2}.
    const Vec e = V({0, 0, 1, 0});
    EXPECT_LT(e.dot(flipped * (standard_J() * e)), 0.0);
    try {
        require_valid(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "StructureInvalid");
    }
}

TEST(VerifyStructure, RotatedStructurePasses) {
    const auto s = rotated_standard();
    auto r = verify_structure(s, 2000, 3, 1e-10);
    EXPECT_TRUE(r.ok) << r.failed_identity;
    // Genuinely non-constant.
    EXPECT_GT((s.J(V({0.5, 0.5, 0.5, 0.5})) - s.J(V({0, 0, 0, 0}))).norm(), 0.1);
}

TEST(VerifyStructure, PlaneComplexStructureHolomorphic) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const Vec u = random_vec(rng), v = random_vec(rng);
        const Mat j = plane_complex_structure(u, v);
        const auto s = HermitianStructure::constant(j, Mat(j.transpose()));
        EXPECT_TRUE(verify_structure(s, 50, i).ok);
        EXPECT_LE(kahler_defect(s, plane(u, v)), 1e-12);
        // Same orientation class as J0: the blend of two such structures stays a complex structure.
        const Mat m = j + standard_J();
        const Mat m2 = m * m;
        EXPECT_NEAR((m2 - m2(0, 0) * Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    }
}

TEST(PositiveForm, Examples) {
    const auto s = HermitianStructure::standard();
    const auto w0 = chains::SampledTwoForm::constant(chains::standard_omega());
    EXPECT_TRUE(is_positive_form(w0, s, 200, 1).positive);
    auto neg = is_positive_form(chains::SampledTwoForm::constant(-chains::standard_omega()), s, 200, 1);
    EXPECT_FALSE(neg.positive);
    const Vec v = neg.witness_vector;
    EXPECT_LT(v.dot(-chains::standard_omega() * (standard_J() * v)), 0.0);
    const auto w = chains::SampledTwoForm::constant(chains::standard_omega() + 0.5 * chains::elementary_form(4, 0, 2));
    auto r = is_positive_form(w, s, 200, 1);
    EXPECT_TRUE(r.positive);
    // Oracle: sym(A J) = I + 0.5 sym(E02 J0); E02 J0 = E21 - E03, whose symmetric part has
    // eigenvalues +-1/2, so the minimum over unit v is 1 - 1/4.
    EXPECT_NEAR(r.min_value, 0.75, 1e-12);
}

TEST(FaceAdapted, FacesAreHolomorphicAwayFromEdges) {
    auto s = holosurf::testing::tetra_boundary({holosurf::testing::P({0, 0, 0, 0}), holosurf::testing::P({1, 0, 0, 0}),
                                                holosurf::testing::P({0, 1, 0, 0}), holosurf::testing::P({0, 0, 1, 0})});
    const auto h = face_adapted(s, 0.02);
    EXPECT_TRUE(verify_structure(h, 2000, 5, 1e-10).ok);
    for (const auto& t : s.terms) {
        auto p = s.simplex_vecs(t);
        const Vec c = (p[0] + p[1] + p[2]) / 3.0;
        Vec u = p[1] - p[0], v = p[2] - p[0];
        if (sgn(t.coeff) < 0) std::swap(u, v);
        EXPECT_LE(kahler_defect(h, {c, u, v}), 1e-12);
        EXPECT_NEAR(kahler_defect(h, {c, v, u}), 2.0, 1e-12);
    }
    // On a shared edge the structure is a compromise: both adjacent faces have positive defect.
    const Vec mid = V({0.5, 0, 0, 0});
    EXPECT_GT(kahler_defect(h, {mid, V({1, 0, 0, 0}), V({0, -1, 0, 0})}), 1e-3);
}
