#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "holosurf/io/json.hpp"
#include "holosurf/norms/deform.hpp"
#include "holosurf/parameterize/glue.hpp"
#include "holosurf/surfaces/certificates.hpp"
#include "holosurf/surfaces/intersect.hpp"
#include "holosurf/surfaces/smoothing.hpp"
#include "holosurf/surgery/resolve.hpp"

namespace holosurf::pipeline {

struct ClearedChain {
    Rational c;
    chains::PolyhedralChain integral;  ///< c * integral = P
};

/// P = c P' with c = 1 / lcm of the coefficient denominators.
inline ClearedChain clear_denominators(const chains::PolyhedralChain& P) {
    auto k = chains::canonicalize(P);
    if (!chains::is_cycle(k)) throw ValidationError("NotACycle", "chain has nonzero boundary");
    mpz_class l = 1;
    for (auto& t : k.terms) {
        t.coeff.canonicalize();
        l = lcm(l, t.coeff.get_den());
    }
    ClearedChain out{Rational(mpz_class(1), l), chains::scale(k, Rational(l))};
    out.c.canonicalize();
    out.integral.reduced_position = P.reduced_position;
    return out;
}

/// Schedules have one entry per pipeline run; lists of length 1 apply to every entry.
/// Empty smoothing_deltas / grid_sizes switch those stages off.
struct PipelineConfig {
    std::vector<double> perturbation_magnitudes{0.01, 0.003, 0.001};
    std::vector<double> surgery_budgets{0.01};
    std::vector<double> surgery_radii{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625};
    std::vector<double> smoothing_deltas;
    std::vector<Rational> grid_sizes;
    RationalPoint grid_lo, grid_hi;
    int quadrature_order = chains::kDefaultQuadratureOrder;
    std::uint64_t seed = 1;
    parameterize::PairingStrategy pairing = parameterize::PairingStrategy::first_fit;
    int annulus_n_theta = 16;
    int annulus_n_t = 8;

    std::size_t entries() const { return perturbation_magnitudes.size(); }

    void validate() const {
        auto bad = [](const std::string& m) { throw ValidationError("BadConfig", m); };
        const std::size_t n = entries();
        if (n == 0) bad("perturbation_magnitudes must be nonempty");
        auto check = [&](const auto& list, const std::string& name, bool optional, bool descending) {
            if (list.empty() && !optional) bad(name + " must be nonempty");
            if (!list.empty() && list.size() != 1 && list.size() != n && name != "surgery_radii")
                bad(name + " must have 1 or " + std::to_string(n) + " entries");
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (!(list[i] > 0)) bad(name + " entries must be positive");
                if (descending && i > 0 && list[i] > list[i - 1]) bad(name + " must be descending");
            }
        };
        check(perturbation_magnitudes, "perturbation_magnitudes", false, true);
        check(surgery_budgets, "surgery_budgets", false, false);
        check(surgery_radii, "surgery_radii", false, true);
        check(smoothing_deltas, "smoothing_deltas", true, true);
        check(grid_sizes, "grid_sizes", true, true);
        if (!grid_sizes.empty() && (grid_lo.empty() || grid_lo.size() != grid_hi.size())) bad("grid_sizes need grid_lo and grid_hi");
        if (annulus_n_theta < 8 || annulus_n_t < 4) bad("annulus resolution too small");
    }
};

struct StageRecord {
    int index = 0;   ///< global stage number, used in mesh file names
    int entry = 0;   ///< schedule entry
    std::string name;
    std::string status = "ok";  ///< ok, skipped
    std::string note;
    Rational c = 1;
    double mass = 0.0;           ///< mass of c * g_* S
    double flat_distance = 0.0;  ///< certified upper bound on F(c g_* S - P)
    double epsilon = 0.0;
    double identity_residual = 0.0;  ///< |c area (1 - eps) - c int omega|
    int euler_characteristic = 0;
    std::vector<int> genus;          ///< per component
    int boundary_loops = 0;
    std::size_t faces = 0;
    int self_intersections = -1;     ///< -1 when not computed
    std::vector<surgery::SurgeryRecord> surgeries;
    std::string mesh;
};

struct PipelineError {
    std::string code, message, stage;
    bool internal = false;
};

struct ApproximationReport {
    std::string status = "ok";  ///< ok, partial, zero cycle
    Rational c = 1;
    double input_mass = 0.0;
    std::vector<StageRecord> stages;
    std::optional<PipelineError> error;
};

namespace detail {

inline StageRecord measure(const std::string& name, int entry, const surfaces::SurfaceMap& g, const Rational& c, double flat,
                           const hermitian::HermitianStructure& st, int order, std::vector<double>* face_defect = nullptr) {
    StageRecord r;
    r.name = name;
    r.entry = entry;
    r.c = c;
    const double cd = to_double(c);
    r.mass = cd * surfaces::area_of_map(g, order);
    r.flat_distance = flat;
    const auto d = surfaces::coarse_defect(g, st, order);
    r.epsilon = d.epsilon;
    r.identity_residual = std::fabs(cd * d.area * (1 - d.epsilon) - cd * d.omega_integral);
    if (face_defect) *face_defect = d.face_defect;
    const auto diag = surfaces::check_surface(g.surface(), true);
    r.euler_characteristic = diag.euler_characteristic;
    for (const auto& comp : diag.components) {
        r.genus.push_back(comp.genus);
        r.boundary_loops += comp.boundary_loops;
    }
    r.faces = g.surface().face_count();
    return r;
}

template <class T>
const T& pick(const std::vector<T>& v, std::size_t i) {
    return v[std::min(i, v.size() - 1)];
}

}  // namespace detail

inline io::Json report_to_json(const ApproximationReport& rep) {
    io::Json j;
    j["status"] = rep.status;
    j["c"] = to_string(rep.c);
    j["input_mass"] = rep.input_mass;
    j["stages"] = io::Json::array();
    for (const auto& s : rep.stages) {
        io::Json x{{"index", s.index},
                   {"entry", s.entry},
                   {"name", s.name},
                   {"status", s.status},
                   {"c", to_string(s.c)},
                   {"mass", s.mass},
                   {"flat_distance", s.flat_distance},
                   {"epsilon", s.epsilon},
                   {"identity_residual", s.identity_residual},
                   {"euler_characteristic", s.euler_characteristic},
                   {"genus", s.genus},
                   {"boundary_loops", s.boundary_loops},
                   {"faces", s.faces},
                   {"self_intersections", s.self_intersections}};
        if (!s.note.empty()) x["note"] = s.note;
        if (!s.mesh.empty()) x["mesh"] = s.mesh;
        if (s.name == "surgery") {
            x["surgeries"] = io::Json::array();
            for (const auto& r : s.surgeries)
                x["surgeries"].push_back({{"point", io::point_to_json(r.point)},
                                          {"r", r.r},
                                          {"area_delta", r.area_delta},
                                          {"flat_delta", r.flat_delta},
                                          {"distortion", r.distortion}});
        }
        j["stages"].push_back(std::move(x));
    }
    if (rep.error)
        j["error"] = {{"code", rep.error->code}, {"message", rep.error->message}, {"stage", rep.error->stage}, {"internal", rep.error->internal}};
    return j;
}

/// Runs every schedule entry: [deform ->] clear denominators -> glue [-> smooth] -> perturb ->
/// surgery. Flat distances accumulate certificates along the stages of an entry. With `out_dir`
/// set, each stage writes stage_<i>_<name>.off plus a JSON sidecar, and report.json is written
/// at the end. Stage errors stop the run and mark the report partial.
inline ApproximationReport run(const chains::PolyhedralChain& P, const hermitian::HermitianStructure& st, const PipelineConfig& cfg,
                               const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
    cfg.validate();
    ApproximationReport rep;
    const auto canon = chains::canonicalize(P);
    if (!chains::is_cycle(canon)) throw ValidationError("NotACycle", "chain has nonzero boundary");
    rep.input_mass = chains::mass(canon);
    int index = 0;
    auto emit = [&](StageRecord r, const surfaces::SurfaceMap& g, const std::vector<double>& fd) {
        r.index = index++;
        if (out_dir) {
            const std::string stem = "stage_" + std::to_string(r.index) + "_" + r.name;
            io::write_text(*out_dir / (stem + ".off"), io::to_off(g));
            io::write_text(*out_dir / (stem + ".json"), io::map_to_json(g, fd).dump(1));
            r.mesh = stem + ".off";
        }
        rep.stages.push_back(std::move(r));
    };
    std::string stage = "clear";
    try {
        if (canon.empty()) {
            rep.status = "zero cycle";
        } else {
            for (std::size_t e = 0; e < cfg.entries(); ++e) {
                const int entry = static_cast<int>(e);
                const std::uint64_t seed = cfg.seed + e;
                double flat = 0.0;
                chains::PolyhedralChain input = P;
                if (!cfg.grid_sizes.empty()) {
                    stage = "deform";
                    const auto grid = norms::GridSpec::from_box(cfg.grid_lo, cfg.grid_hi, detail::pick(cfg.grid_sizes, e));
                    auto d = norms::deform_to_grid(P, grid, seed, false);
                    flat += d.flat_bound;
                    input = d.output;
                    chains::mark_reduced_position(input);
                }
                stage = "clear";
                const auto cleared = clear_denominators(input);
                rep.c = cleared.c;
                const double c = to_double(cleared.c);

                stage = "glue";
                auto glued = parameterize::realize(cleared.integral, cfg.pairing, seed);
                auto g = glued.map;
                std::vector<double> fd;
                auto rec = detail::measure("glue", entry, g, cleared.c, flat, st, cfg.quadrature_order, &fd);
                if (!glued.area_exact) rec.note = "area check not exact";
                emit(rec, g, fd);

                if (!cfg.smoothing_deltas.empty()) {
                    stage = "smooth";
                    try {
                        auto s = surfaces::smooth_map(g, detail::pick(cfg.smoothing_deltas, e));
                        flat += c * s.flat_estimate;
                        g = s.proxy;
                        emit(detail::measure("smooth", entry, g, cleared.c, flat, st, cfg.quadrature_order, &fd), g, fd);
                    } catch (const ValidationError& err) {
                        if (err.code() != "DeltaTooLarge" && err.code() != "NotFlatAtlas") throw;
                        auto r = detail::measure("smooth", entry, g, cleared.c, flat, st, cfg.quadrature_order, &fd);
                        r.status = "skipped";
                        r.note = err.what();
                        emit(r, g, fd);
                    }
                }

                stage = "perturb";
                auto pr = surfaces::perturb_generic(g, detail::pick(cfg.perturbation_magnitudes, e), seed);
                flat += c * surfaces::homotopy_certificate(g, pr.map).value;
                g = pr.map;
                rec = detail::measure("perturb", entry, g, cleared.c, flat, st, cfg.quadrature_order, &fd);
                rec.self_intersections = static_cast<int>(pr.intersections.size());
                emit(rec, g, fd);

                stage = "surgery";
                surgery::SurgeryOptions opt;
                opt.n_theta = cfg.annulus_n_theta;
                opt.n_t = cfg.annulus_n_t;
                auto res = surgery::resolve_all(g, cfg.surgery_radii, detail::pick(cfg.surgery_budgets, e), opt);
                flat += c * res.total_flat_delta;
                g = res.map;
                rec = detail::measure("surgery", entry, g, cleared.c, flat, st, cfg.quadrature_order, &fd);
                rec.self_intersections = 0;
                rec.surgeries = res.records;
                emit(rec, g, fd);
            }
        }
    } catch (const ValidationError& err) {
        rep.status = "partial";
        rep.error = PipelineError{err.code(), err.what(), stage, false};
    } catch (const InternalError& err) {
        rep.status = "partial";
        rep.error = PipelineError{err.code(), err.what(), stage, true};
    }
    if (out_dir) io::write_text(*out_dir / "report.json", report_to_json(rep).dump(2) + "\n");
    return rep;
}

inline PipelineConfig config_from_json(const io::Json& j) {
    PipelineConfig c;
    try {
        if (j.contains("perturbation_magnitudes")) c.perturbation_magnitudes = j["perturbation_magnitudes"].get<std::vector<double>>();
        if (j.contains("surgery_budgets")) c.surgery_budgets = j["surgery_budgets"].get<std::vector<double>>();
        if (j.contains("surgery_radii")) c.surgery_radii = j["surgery_radii"].get<std::vector<double>>();
        if (j.contains("smoothing_deltas")) c.smoothing_deltas = j["smoothing_deltas"].get<std::vector<double>>();
        if (j.contains("grid_sizes"))
            for (const auto& h : j["grid_sizes"]) c.grid_sizes.push_back(io::rational_from_json(h));
        if (j.contains("grid_lo")) c.grid_lo = io::point_from_json(j["grid_lo"]);
        if (j.contains("grid_hi")) c.grid_hi = io::point_from_json(j["grid_hi"]);
        c.quadrature_order = j.value("quadrature_order", c.quadrature_order);
        c.seed = j.value("seed", c.seed);
        const std::string p = j.value("pairing", std::string("first_fit"));
        if (p == "seeded_random") c.pairing = parameterize::PairingStrategy::seeded_random;
        else if (p != "first_fit") throw ValidationError("BadConfig", "unknown pairing strategy '" + p + "'");
        c.annulus_n_theta = j.value("annulus_n_theta", c.annulus_n_theta);
        c.annulus_n_t = j.value("annulus_n_t", c.annulus_n_t);
    } catch (const io::Json::exception& e) {
        throw ValidationError("BadConfig", std::string("malformed config JSON: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace holosurf::pipeline
