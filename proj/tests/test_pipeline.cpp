#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "holosurf/norms/comass.hpp"
#include "holosurf/pipeline/pipeline.hpp"
#include "test_support.hpp"

using namespace holosurf;
using namespace holosurf::pipeline;
using namespace holosurf::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HOLOSURF_FIXTURE_DIR;

chains::PolyhedralChain fixture(const std::string& name) { return io::chain_from_json(io::read_json_file(kFixtures / name)); }

hermitian::HermitianStructure structure(const std::string& name) {
    return io::structure_from_json(io::read_json_file(kFixtures / name), kFixtures);
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("holosurf_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::vector<RationalPoint> kTetra{P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 0, 0}), P({0, 0, 1, 1}, 2)};

}  // namespace

TEST(ClearDenominators, Examples) {
    std::vector<RationalPoint> other{P({3, 0, 0, 0}), P({4, 0, 0, 0}), P({3, 1, 0, 0}), P({3, 0, 1, 0})};
    auto mixed = chains::combine(tetra_boundary(kTetra, Rational(1, 2)), 1, tetra_boundary(other, Rational(1, 3)), 1);
    auto r = clear_denominators(mixed);
    EXPECT_EQ(r.c, Rational(1, 6));
    std::set<Rational> coeffs;
    for (const auto& t : r.integral.terms) coeffs.insert(abs(t.coeff));
    EXPECT_EQ(coeffs, (std::set<Rational>{2, 3}));
    EXPECT_TRUE(chains::canonicalize(chains::combine(chains::scale(r.integral, r.c), 1, mixed, -1)).empty());

    auto whole = clear_denominators(tetra_boundary(kTetra, 2));
    EXPECT_EQ(whole.c, 1);
    EXPECT_EQ(clear_denominators(tetra_boundary(kTetra, Rational(2, 4))).c, Rational(1, 2));

    auto open = tetra_boundary(kTetra);
    open.terms.pop_back();
    EXPECT_THROW(clear_denominators(open), ValidationError);
}

TEST(Pipeline, ZeroCycle) {
    auto rep = run(chains::PolyhedralChain(4, 2), hermitian::HermitianStructure::standard(), {});
    EXPECT_EQ(rep.status, "zero cycle");
    EXPECT_TRUE(rep.stages.empty());
}

TEST(Pipeline, ConfigValidation) {
    PipelineConfig c;
    c.perturbation_magnitudes = {0.001, 0.01};
    EXPECT_THROW(c.validate(), ValidationError);
    c.perturbation_magnitudes = {};
    EXPECT_THROW(c.validate(), ValidationError);
    c.perturbation_magnitudes = {0.01};
    c.surgery_budgets = {-1};
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Pipeline, HolomorphicCycle) {
    const auto P = fixture("holo_cycle.json");
    const auto st = structure("holo_adapted.json");
    const auto dir = scratch("holo");
    const auto rep = run(P, st, {}, dir);
    ASSERT_EQ(rep.status, "ok") << (rep.error ? rep.error->message : "");
    EXPECT_EQ(rep.c, Rational(1, 2));
    ASSERT_EQ(rep.stages.size(), 9u);
    double last_eps = 1e9, last_flat = 1e9;
    for (const auto& s : rep.stages) {
        EXPECT_LE(s.identity_residual, 1e-8) << s.name;
        EXPECT_TRUE(fs::exists(dir / s.mesh));
        if (s.name == "glue") {
            EXPECT_NEAR(s.mass, rep.input_mass, 1e-12);
            EXPECT_EQ(s.flat_distance, 0.0);
            EXPECT_LE(s.epsilon, 1e-6);
        }
        if (s.name != "surgery") continue;
        EXPECT_EQ(s.genus, std::vector<int>{0});
        // Embedded: re-check the written mesh independently.
        const auto m = io::map_from_json(io::read_json_file(dir / ("stage_" + std::to_string(s.index) + "_surgery.json")));
        EXPECT_TRUE(surfaces::self_intersections(m).empty());
        EXPECT_LE(s.epsilon, last_eps + 1e-3);
        EXPECT_LE(s.flat_distance, last_flat + 1e-3);
        last_eps = s.epsilon;
        last_flat = s.flat_distance;
        if (s.entry == 0) EXPECT_LE(s.epsilon, 0.05);
        // Closed constant forms: pairing drift bounded by the flat certificate times the comass.
        std::mt19937_64 rng(s.index);
        std::normal_distribution<double> g;
        for (int k = 0; k < 5; ++k) {
            Mat a = Mat::Zero(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) a(j, i) = -(a(i, j) = g(rng));
            const auto w = chains::SampledTwoForm::constant(a);
            const double drift = std::fabs(to_double(s.c) * surfaces::pushforward_evaluate(m, w) - chains::evaluate(P, w));
            EXPECT_LE(drift, s.flat_distance * norms::comass_of_matrix(a) + 1e-9);
        }
    }
    const auto again = scratch("holo_again");
    run(P, st, {}, again);
    EXPECT_EQ(slurp(dir / "report.json"), slurp(again / "report.json"));
}

TEST(Pipeline, LagrangianTorusStaysLagrangian) {
    PipelineConfig cfg;
    cfg.perturbation_magnitudes = {0.003};
    const auto rep = run(fixture("lagrangian_torus.json"), structure("std_c2.json"), cfg);
    ASSERT_EQ(rep.status, "ok");
    EXPECT_NEAR(rep.stages.front().epsilon, 1.0, 1e-10);
    for (const auto& s : rep.stages) {
        EXPECT_NEAR(s.epsilon, 1.0, 0.05) << s.name;
        EXPECT_EQ(s.genus, std::vector<int>{1});
    }
}

TEST(Pipeline, SurgeryJoinsTwoSpheres) {
    PipelineConfig cfg;
    cfg.perturbation_magnitudes = {0.001};
    const auto rep = run(fixture("two_spheres.json"), hermitian::HermitianStructure::standard(), cfg);
    ASSERT_EQ(rep.status, "ok") << (rep.error ? rep.error->message : "");
    const auto& glue = rep.stages.front();
    EXPECT_EQ(glue.genus, (std::vector<int>{0, 0}));
    const auto& last = rep.stages.back();
    EXPECT_EQ(last.name, "surgery");
    EXPECT_EQ(last.surgeries.size(), 2u);
    EXPECT_EQ(last.genus, std::vector<int>{1});
    // Surgery adds at most its budget to the perturbation certificate.
    EXPECT_LE(last.flat_distance, rep.stages[1].flat_distance + 0.01);
    EXPECT_GT(last.flat_distance, rep.stages[1].flat_distance);
}

TEST(Pipeline, PartialReport) {
    PipelineConfig cfg;
    cfg.perturbation_magnitudes = {0.001};
    cfg.surgery_budgets = {1e-12};
    const auto rep = run(fixture("two_spheres.json"), hermitian::HermitianStructure::standard(), cfg);
    EXPECT_EQ(rep.status, "partial");
    ASSERT_TRUE(rep.error.has_value());
    EXPECT_EQ(rep.error->code, "BudgetExhausted");
    EXPECT_EQ(rep.error->stage, "surgery");
    EXPECT_EQ(rep.stages.size(), 2u);
}
