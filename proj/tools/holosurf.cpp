// Command-line front end: JSON in, JSON (stdout) and OFF/JSON files (--out-dir) out.
// Exit codes: 0 success, 1 validation error, 2 internal error; errors go to stderr as JSON.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "holosurf/norms/distance.hpp"
#include "holosurf/pipeline/pipeline.hpp"

using namespace holosurf;
namespace fs = std::filesystem;
using io::Json;

namespace {

struct Options {
    std::string input;
    std::string structure, grid, form, config;
    std::string strategy = "first_fit";
    std::vector<double> radii{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
    double budget = 0.01;
    int order = chains::kDefaultQuadratureOrder;
    std::string grid_h;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::size_t samples = 10000;
};

chains::PolyhedralChain load_chain(const std::string& path) { return io::chain_from_json(io::read_json_file(path)); }

hermitian::HermitianStructure load_structure(const std::string& path) {
    if (path.empty()) return hermitian::HermitianStructure::standard();
    return io::structure_from_json(io::read_json_file(path), fs::path(path).parent_path());
}

/// Grid from --grid, or a box around the chain padded by one cell of size --grid-h.
norms::GridSpec make_grid(const Options& o, const chains::PolyhedralChain& c) {
    if (!o.grid.empty()) return io::grid_from_json(io::read_json_file(o.grid));
    if (o.grid_h.empty()) throw ValidationError("BadArguments", "pass --grid or --grid-h");
    const Rational h = parse_rational(o.grid_h);
    if (h <= 0) throw ValidationError("BadGrid", "grid mesh size must be positive");
    if (c.points.empty()) throw ValidationError("EmptyChain", "cannot size a grid around an empty chain");
    RationalPoint lo = c.points.front(), hi = lo;
    for (const auto& p : c.points)
        for (std::size_t d = 0; d < p.size(); ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    for (std::size_t d = 0; d < lo.size(); ++d) {
        lo[d] = Rational(floor(lo[d] / h) - 1) * h;
        hi[d] = Rational(floor(hi[d] / h) + 2) * h;
    }
    return norms::GridSpec::from_box(lo, hi, h);
}

chains::SampledTwoForm load_form(const Options& o, int dim) {
    if (o.form.empty()) {
        if (dim != 4) throw ValidationError("BadArguments", "pass --form for ambient dimension other than 4");
        return chains::SampledTwoForm::constant(chains::standard_omega());
    }
    const auto j = io::read_json_file(o.form);
    return chains::SampledTwoForm::constant(io::matrix_from_json(j.contains("matrix") ? j.at("matrix") : j));
}

/// Map JSON (vertices/faces) as is; a chain becomes one face per term, oriented by the sign.
surfaces::SurfaceMap load_surface(const std::string& path, std::vector<double>* weights) {
    const auto j = io::read_json_file(path);
    if (j.contains("faces")) return io::map_from_json(j);
    const auto c = chains::canonicalize(io::chain_from_json(j));
    std::vector<RationalPoint> img;
    std::vector<surfaces::Face> faces;
    for (const auto& t : c.terms) {
        auto pts = c.simplex_points(t);
        if (t.coeff < 0) std::swap(pts[1], pts[2]);
        const int b = static_cast<int>(img.size());
        img.insert(img.end(), pts.begin(), pts.end());
        faces.push_back({b, b + 1, b + 2});
        if (weights) weights->push_back(to_double(abs(t.coeff)));
    }
    surfaces::AbstractSurface s(static_cast<int>(img.size()), std::move(faces));
    return surfaces::SurfaceMap::piecewise_affine(std::move(s), std::move(img));
}

void write_map(const Options& o, const std::string& stem, const surfaces::SurfaceMap& m, const std::vector<double>& fd = {}) {
    if (o.out_dir.empty()) return;
    io::write_text(fs::path(o.out_dir) / (stem + ".off"), io::to_off(m));
    io::write_text(fs::path(o.out_dir) / (stem + ".json"), io::map_to_json(m, fd).dump(1));
}

int run_command(const std::string& cmd, const Options& o) {
    Json out;
    if (cmd == "boundary") {
        out = io::chain_to_json(chains::canonicalize(chains::boundary(load_chain(o.input))));
    } else if (cmd == "mass") {
        out["mass"] = chains::mass(chains::canonicalize(load_chain(o.input)));
    } else if (cmd == "evaluate") {
        const auto c = load_chain(o.input);
        out["value"] = chains::evaluate(c, load_form(o, c.ambient_dim), o.order);
    } else if (cmd == "flatnorm") {
        const auto c = chains::canonicalize(load_chain(o.input));
        const auto grid = make_grid(o, c);
        const auto def = norms::deform_to_grid(c, grid, o.seed, false);
        const auto d = norms::flat_norm_local(def.output, grid);
        out = io::decomposition_to_json(d);
        out["deformation_bound"] = def.flat_bound;
        out["upper_bound"] = d.value + def.flat_bound;
    } else if (cmd == "deform") {
        const auto c = load_chain(o.input);
        const auto def = norms::deform_to_grid(c, make_grid(o, chains::canonicalize(c)), o.seed);
        out = {{"output", io::chain_to_json(def.output)},
               {"input_mass", def.input_mass},
               {"output_mass", def.output_mass},
               {"mass_ratio", def.mass_ratio},
               {"flat_bound", def.flat_bound},
               {"retries", def.retries},
               {"seed_used", def.seed_used}};
    } else if (cmd == "defect") {
        std::vector<double> w;
        const auto m = load_surface(o.input, &w);
        const auto d = surfaces::coarse_defect(m, load_structure(o.structure), o.order);
        double area = d.area, omega = d.omega_integral;
        if (!w.empty()) {
            // Chain input: weight each face by |coefficient|.
            area = omega = 0.0;
            for (std::size_t f = 0; f < w.size(); ++f) {
                const double a = surfaces::area_of_map(surfaces::SurfaceMap::piecewise_affine(
                    surfaces::AbstractSurface(3, {{0, 1, 2}}),
                    {m.images()[static_cast<std::size_t>(3 * f)], m.images()[static_cast<std::size_t>(3 * f + 1)],
                     m.images()[static_cast<std::size_t>(3 * f + 2)]}));
                area += w[f] * a;
                omega += w[f] * a * (1 - d.face_defect[f]);
            }
        }
        out = {{"area", area},
               {"omega_integral", omega},
               {"epsilon", area > 0 ? 1 - omega / area : 0.0},
               {"face_defect", d.face_defect},
               {"histogram", d.histogram},
               {"identity_residual", d.identity_residual}};
        write_map(o, "defect", m, d.face_defect);
    } else if (cmd == "parameterize") {
        const auto strategy = o.strategy == "seeded_random" ? parameterize::PairingStrategy::seeded_random
                                                            : parameterize::PairingStrategy::first_fit;
        if (o.strategy != "seeded_random" && o.strategy != "first_fit")
            throw ValidationError("BadArguments", "unknown strategy '" + o.strategy + "'");
        const auto P = load_chain(o.input);
        const auto pool = parameterize::expand(P);
        const auto pairing = parameterize::pair_edges(pool, strategy, o.seed);
        const auto g = parameterize::glue(pool, pairing);
        Json comps = Json::array();
        for (const auto& c : g.diagnostic.components)
            comps.push_back({{"faces", c.faces}, {"euler_characteristic", c.euler_characteristic}, {"genus", c.genus}});
        out = {{"faces", g.map.surface().face_count()},
               {"manifold", g.diagnostic.ok},
               {"closed", g.diagnostic.closed},
               {"euler_characteristic", g.diagnostic.euler_characteristic},
               {"components", comps},
               {"split_vertices", g.split_vertices},
               {"subdivided", g.subdivided},
               {"area", surfaces::area_of_map(g.map, o.order)},
               {"mass", chains::mass(pool.source)},
               {"area_exact", g.area_exact}};
        write_map(o, "surface", g.map);
        if (!o.out_dir.empty()) {
            Json pairs = Json::array();
            for (const auto& [a, b] : pairing.pairs) pairs.push_back({{a.triangle, a.edge}, {b.triangle, b.edge}});
            io::write_text(fs::path(o.out_dir) / "pairing.json", Json{{"strategy", o.strategy}, {"seed", o.seed}, {"pairs", pairs}}.dump(1));
        }
    } else if (cmd == "surgery") {
        const auto m = load_surface(o.input, nullptr);
        const auto rep = surgery::resolve_all(m, o.radii, o.budget);
        out["intersections"] = Json::array();
        for (const auto& r : rep.records)
            out["intersections"].push_back({{"point", io::point_to_json(r.point)},
                                            {"r", r.r},
                                            {"area_delta", r.area_delta},
                                            {"flat_delta", r.flat_delta},
                                            {"distortion", r.distortion}});
        out["total_area_delta"] = rep.total_area_delta;
        out["total_flat_delta"] = rep.total_flat_delta;
        write_map(o, "resolved", rep.map);
    } else if (cmd == "pipeline") {
        auto cfg = o.config.empty() ? pipeline::PipelineConfig{} : pipeline::config_from_json(io::read_json_file(o.config));
        cfg.quadrature_order = o.order;
        if (o.seed != 1 || o.config.empty()) cfg.seed = o.seed;
        const auto rep = pipeline::run(load_chain(o.input), load_structure(o.structure), cfg,
                                       o.out_dir.empty() ? std::nullopt : std::optional<fs::path>(o.out_dir));
        std::cout << pipeline::report_to_json(rep).dump(2) << "\n";
        if (rep.error) {
            std::cerr << Json{{"error", rep.error->code}, {"message", rep.error->message}, {"stage", rep.error->stage}}.dump() << "\n";
            return rep.error->internal ? 2 : 1;
        }
        return 0;
    } else if (cmd == "verify-structure") {
        const auto r = hermitian::verify_structure(load_structure(o.input), o.samples, o.seed);
        out = {{"ok", r.ok},
               {"failed_identity", r.failed_identity},
               {"worst_j_squared", r.worst_j_squared},
               {"min_taming", r.min_taming},
               {"worst_compatibility", r.worst_compatibility},
               {"worst_metric_asymmetry", r.worst_metric_asymmetry},
               {"min_metric_eigenvalue", r.min_metric_eigenvalue},
               {"samples", r.samples}};
        auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        if (!r.ok) out["witness"] = {{"point", vec(r.witness_point)}, {"vector", vec(r.witness_vector)}};
        std::cout << out.dump(2) << "\n";
        return r.ok ? 0 : 1;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holosurf: polyhedral 2-cycles to embedded coarsely holomorphic surfaces"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--quadrature-order", o.order, "triangle quadrature order")->check(CLI::Range(1, 8));
    app.add_option("--grid-h", o.grid_h, "grid mesh size, e.g. 1/10");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--out-dir", o.out_dir, "directory for meshes and reports");

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"boundary", "boundary of a chain"},
                        {"mass", "mass of a chain"},
                        {"evaluate", "pair a chain with a constant 2-form (default: standard omega)"},
                        {"flatnorm", "flat norm upper bound with LP certificate"},
                        {"deform", "push a chain onto the grid 2-skeleton"},
                        {"defect", "coarse Kahler defect of a chain or mapped surface"},
                        {"parameterize", "glue an integral cycle into a mapped surface"},
                        {"surgery", "resolve transverse self-intersections of a mapped surface"},
                        {"pipeline", "full cycle-to-surface pipeline"},
                        {"verify-structure", "sample-check an almost Hermitian structure"}};
    for (const auto& s : subs) {
        auto* c = app.add_subcommand(s.name, s.help);
        c->add_option("input", o.input, "input JSON")->required()->check(CLI::ExistingFile);
        const std::string n = s.name;
        if (n == "defect" || n == "pipeline") c->add_option("--structure", o.structure, "structure JSON (default: standard)");
        if (n == "flatnorm" || n == "deform") c->add_option("--grid", o.grid, "grid JSON");
        if (n == "evaluate") c->add_option("--form", o.form, "constant form JSON {\"matrix\": ...}");
        if (n == "pipeline") c->add_option("--config", o.config, "pipeline config JSON");
        if (n == "parameterize") c->add_option("--strategy", o.strategy, "first_fit or seeded_random");
        if (n == "surgery") {
            c->add_option("--radii", o.radii, "surgery radii, tried in order");
            c->add_option("--budget", o.budget, "total area and flat budget");
        }
        if (n == "verify-structure") c->add_option("--samples", o.samples, "sample count");
        // Global flags are accepted after the subcommand as well.
        c->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << Json{{"error", "BadArguments"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    try {
        return run_command(app.get_subcommands().front()->get_name(), o);
    } catch (const ValidationError& e) {
        std::cerr << Json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const InternalError& e) {
        std::cerr << Json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }
}
