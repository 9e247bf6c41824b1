// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "holosurf/norms/flat.hpp"
#include "holosurf/pipeline/pipeline.hpp"
#include "surface_fixtures.hpp"

using namespace holosurf;
using namespace holosurf::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HOLOSURF_FIXTURE_DIR;

/// Collects failed conditions for one criterion; the first few are printed.
struct Check {
    std::vector<std::string> failures;
    std::string summary;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

Mat random_skew(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Mat a = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) a(j, i) = -(a(i, j) = g(rng));
    return a;
}

Vec random_vec(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v(4);
    for (int i = 0; i < 4; ++i) v[i] = g(rng);
    return v;
}

chains::PolyhedralChain load_chain(const std::string& name) { return io::chain_from_json(io::read_json_file(kFixtures / name)); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void ac1(Check& c) {
    std::mt19937_64 rng(101);
    const auto w = chains::SampledTwoForm::constant(chains::standard_omega() - 0.7 * chains::elementary_form(4, 1, 3));
    const auto w3 = chains::SampledTwoForm::constant(chains::elementary_form(3, 0, 1) + 0.5 * chains::elementary_form(3, 1, 2));
    for (int i = 0; i < 200; ++i) {
        const int n = i % 2 ? 4 : 3;
        const auto k = chains::canonicalize(random_chain(rng, n, 2, 6));
        c.expect(chains::boundary(chains::boundary(k)).empty(), "dd != 0 on chain " + std::to_string(i));
        const auto kk = chains::canonicalize(k);
        bool same = kk.points == k.points && kk.terms.size() == k.terms.size();
        for (std::size_t j = 0; same && j < k.terms.size(); ++j)
            same = kk.terms[j].coeff == k.terms[j].coeff && kk.terms[j].vertices == k.terms[j].vertices;
        c.expect(same, "canonicalize not idempotent on chain " + std::to_string(i));
    }
    // Pairing preserved by canonicalization of the raw chains.
    for (int i = 0; i < 200; ++i) {
        const int n = i % 2 ? 4 : 3;
        const auto raw = random_chain(rng, n, 2, 6);
        const auto& form = n == 4 ? w : w3;
        c.expect(std::fabs(chains::evaluate(raw, form) - chains::evaluate(chains::canonicalize(raw), form)) <= 1e-12,
                 "pairing changed on chain " + std::to_string(i));
    }
    c.summary = "200 chains";
}

void ac2(Check& c) {
    const auto s = hermitian::HermitianStructure::standard();
    std::mt19937_64 rng(202);
    double worst_excess = -1e9, lo = 1e9, hi = -1e9;
    for (int i = 0; i < 100000; ++i) {
        const Vec u = random_vec(rng), v = random_vec(rng);
        // omega_0(u, v) against the area of the parallelogram, computed directly.
        const double om = u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2];
        const double vol = std::sqrt(std::max(0.0, u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2)));
        worst_excess = std::max(worst_excess, om - vol);
        const double d = hermitian::kahler_defect(s, {Vec::Zero(4), u, v});
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        if (i < 1000) {
            const double r = hermitian::kahler_defect(s, {Vec::Zero(4), v, u});
            c.expect(std::fabs(r - (2 - d)) <= 1e-12, "reversal d -> 2 - d off by " + fmt(r - (2 - d)));
        }
    }
    c.expect(worst_excess <= 1e-12, "Wirtinger excess " + fmt(worst_excess));
    c.expect(lo >= -1e-10 && hi <= 2 + 1e-10, "defect outside [0, 2]: " + fmt(lo) + " " + fmt(hi));
    const Mat J = hermitian::standard_J();
    double worst_inv = 0;
    std::uniform_real_distribution<double> coef(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        const Vec v = random_vec(rng);
        // Random positively oriented basis of span(v, Jv).
        double a, b, cc, d;
        do {
            a = coef(rng), b = coef(rng), cc = coef(rng), d = coef(rng);
        } while (a * d - b * cc < 0.1);
        const Vec e1 = a * v + b * (J * v), e2 = cc * v + d * (J * v);
        worst_inv = std::max(worst_inv, std::fabs(hermitian::kahler_defect(s, {Vec::Zero(4), e1, e2})));
    }
    c.expect(worst_inv <= 1e-12, "J-invariant plane defect " + fmt(worst_inv));
    c.summary = "max omega - vol " + fmt(worst_excess) + ", max J-invariant defect " + fmt(worst_inv);
}

void ac3(Check& c) {
    const auto single = load_chain("tetra.json");
    const auto doubled = chains::scale(single, 2);
    std::mt19937_64 rng(303);
    std::vector<chains::SampledTwoForm> forms;
    for (int i = 0; i < 20; ++i) forms.push_back(chains::SampledTwoForm::constant(random_skew(rng)));
    for (const auto* P : {&single, &doubled}) {
        const auto r = parameterize::realize(*P);
        c.expect(r.diagnostic.ok && r.diagnostic.closed, "glue output is not a closed manifold");
        c.expect(r.area_exact, "area(g) != M(P) in exact comparison");
        for (const auto& w : forms) {
            const double e = std::fabs(surfaces::pushforward_evaluate(r.map, w) - chains::evaluate(*P, w));
            c.expect(e <= 1e-10, "g_*S differs from P on a constant form by " + fmt(e));
        }
    }
    const auto pool = parameterize::expand(doubled);
    int bad = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = parameterize::glue(pool, parameterize::pair_edges(pool, parameterize::PairingStrategy::seeded_random, seed));
        if (!r.diagnostic.ok) ++bad;
    }
    c.expect(bad == 0, std::to_string(bad) + " non-manifold outputs in the seed sweep");
    c.summary = "mass " + fmt(chains::mass(single)) + ", 100 seeds";
}

void ac4(Check& c) {
    std::string vals;
    for (auto h : {make_rational(1, 2), Rational(1), Rational(20)}) {
        std::vector<RationalPoint> v{P({0, 0, 0}), P({1, 0, 0}), P({1, 1, 0}), P({1, 1, 1})};
        for (auto& p : v)
            for (auto& x : p) x *= h;
        const auto T = tetra_boundary(v);
        const double hd = h.get_d();
        // Two faces are right triangles with legs h, two have legs h and h sqrt 2.
        const double area = hd * hd * (1.0 + std::sqrt(2.0));
        const double vol = hd * hd * hd / 6.0;
        double scan = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 100; ++i) scan = std::min(scan, (1 - i / 100.0) * area + i / 100.0 * vol);
        const auto grid = norms::SimplicialGrid(norms::GridSpec::from_box(RationalPoint(3, Rational(0)), RationalPoint(3, 2 * h), h));
        const auto f = norms::flat_norm_simplicial(T, grid);
        c.expect(std::fabs(f.value - scan) <= 1e-9, "h=" + fmt(hd) + ": LP " + fmt(f.value) + " vs scan " + fmt(scan));
        c.expect(f.value <= chains::mass(T) + 1e-12, "LP exceeds mass");
        c.expect(f.verified, "certificate re-verification failed at h=" + fmt(hd));
        c.expect(chains::difference(T, chains::combine(f.A, 1, chains::boundary(f.B), 1)).empty(), "T != A + dB");
        vals += (vals.empty() ? "" : ", ") + fmt(f.value);
    }
    c.summary = "optima " + vals;
}

/// Every term is a triangle with lattice vertices inside a single grid square.
bool on_two_skeleton(const chains::PolyhedralChain& k, const Rational& h) {
    for (const auto& t : k.terms) {
        const auto pts = k.simplex_points(t);
        std::set<std::size_t> axes;
        for (const auto& p : pts)
            for (std::size_t d = 0; d < p.size(); ++d) {
                const Rational q = p[d] / h;
                if (q.get_den() != 1) return false;
                const Rational diff = abs(p[d] - pts[0][d]);
                if (diff != 0 && diff != h) return false;
                if (diff != 0) axes.insert(d);
            }
        if (axes.size() != 2) return false;
    }
    return true;
}

void ac5(Check& c) {
    std::mt19937_64 rng(2024);
    double lo = 9, hi = 0;
    for (int k = 0; k < 20; ++k) {
        std::vector<RationalPoint> v;
        for (;;) {
            v.clear();
            for (int i = 0; i < 4; ++i) v.push_back(random_point(rng, 4, 12, 106, 97));
            if (exact::affine_rank(v) != 3) continue;
            const auto tb = tetra_boundary(v);
            bool ok = true;
            for (const auto& t : tb.terms) ok = ok && chains::simplex_volume(tb, t) >= 0.1;
            if (ok) break;
        }
        const auto cyc = tetra_boundary(v);
        double prev = 0;
        for (auto h : {make_rational(1, 5), make_rational(1, 10), make_rational(1, 20)}) {
            const auto g = norms::GridSpec::from_box(RationalPoint(4, Rational(0)), RationalPoint(4, make_rational(6, 5)), h);
            const auto r = norms::deform_to_grid(cyc, g, 7, false);
            c.expect(chains::is_cycle(r.output), "output not a cycle");
            c.expect(on_two_skeleton(r.output, h), "output term off the 2-skeleton");
            if (prev > 0) {
                const double q = prev / r.flat_bound;
                lo = std::min(lo, q);
                hi = std::max(hi, q);
                c.expect(q >= 1.5 && q <= 3.0, "cycle " + std::to_string(k) + " ratio " + fmt(q));
            }
            prev = r.flat_bound;
        }
    }
    c.summary = "ratios in [" + fmt(lo) + ", " + fmt(hi) + "]";
}

surfaces::SurfaceMap fan_disk(int m, int i, int j, double ax, double ay) {
    std::vector<RationalPoint> img;
    auto at = [&](double x, double y) {
        RationalPoint p(4, Rational(0));
        p[static_cast<std::size_t>(i)] = rationalize(x, 1 << 20);
        p[static_cast<std::size_t>(j)] = rationalize(y, 1 << 20);
        return p;
    };
    img.push_back(at(ax, ay));
    for (int k = 0; k < m; ++k) img.push_back(at(std::cos(2 * std::numbers::pi * k / m), std::sin(2 * std::numbers::pi * k / m)));
    std::vector<surfaces::Face> f;
    for (int k = 0; k < m; ++k) f.push_back({0, 1 + k, 1 + (k + 1) % m});
    return surfaces::SurfaceMap::piecewise_affine(surfaces::AbstractSurface(m + 1, std::move(f)), img);
}

void ac6(Check& c) {
    // Richardson limit of fine meshes of the unscaled annulus.
    constexpr double kRef = 0.89901;
    const auto g = disjoint_union({fan_disk(16, 0, 1, 0.13, 0.07), fan_disk(16, 2, 3, -0.11, 0.05)});
    const auto xs = surfaces::self_intersections(g);
    c.expect(xs.size() == 1, "expected one crossing, found " + std::to_string(xs.size()));
    if (xs.size() != 1) return;
    double last = std::numeric_limits<double>::infinity();
    std::string flats;
    for (double r : {0.1, 0.05, 0.025}) {
        const auto res = surgery::resolve_one(g, xs[0], r);
        c.expect(surfaces::self_intersections(res.map).empty(), "self-intersections remain at r=" + fmt(r));
        const double da = surfaces::area_of_map(res.map) - surfaces::area_of_map(g);
        c.expect(da <= r * r * kRef + 1e-6, "area increase " + fmt(da) + " at r=" + fmt(r));
        c.expect(res.record.flat_delta < last, "flat distance not decreasing at r=" + fmt(r));
        last = res.record.flat_delta;
        flats += (flats.empty() ? "" : ", ") + fmt(res.record.flat_delta);
    }
    const auto a = surgery::annulus_mesh(32, 16);
    const double ie = std::exp(-1.0);
    c.expect(surgery::annulus_max_norm(a) <= ie + 1e-9, "annulus leaves the ball of radius 1/e");
    for (int k = 0; k < a.n_theta; ++k) {
        const auto& b = a.points[static_cast<std::size_t>(a.first_circle(k))];
        const auto& e = a.points[static_cast<std::size_t>(a.last_circle(k))];
        c.expect(b[0] == 0 && b[1] == 0 && std::fabs(b.norm() - ie) <= 1e-12, "first boundary circle off its plane");
        c.expect(e[2] == 0 && e[3] == 0 && std::fabs(e.norm() - ie) <= 1e-12, "last boundary circle off its plane");
    }
    c.summary = "flat " + flats;
}

void ac7(Check& c) {
    const auto st = hermitian::HermitianStructure::standard();
    const auto holo = sheet(4, P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 0, 0}));
    const auto lag = sheet(4, P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 0, 1, 0}));
    const auto half = disjoint_union({sheet(3, P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 0, 0})),
                                      sheet(3, P({1, 0, 0, 0}), P({0, 0, 1, 0}), P({0, 1, 0, 0}))});
    const auto w0 = chains::SampledTwoForm::constant(chains::standard_omega());
    const double target[] = {0.0, 1.0, 0.5}, tol[] = {1e-10, 1e-10, 1e-9};
    const surfaces::SurfaceMap* maps[] = {&holo, &lag, &half};
    std::string eps;
    for (int i = 0; i < 3; ++i) {
        const auto d = surfaces::coarse_defect(*maps[i], st);
        c.expect(std::fabs(d.epsilon - target[i]) <= tol[i], "epsilon " + fmt(d.epsilon) + " vs " + fmt(target[i]));
        // Identity checked with area and omega computed separately from the defect routine.
        const double area = surfaces::area_of_map(*maps[i]), om = surfaces::pushforward_evaluate(*maps[i], w0);
        c.expect(std::fabs(area * (1 - d.epsilon) - om) <= 1e-9, "area (1 - eps) != integral of omega");
        eps += (eps.empty() ? "" : ", ") + fmt(d.epsilon);
    }
    c.summary = "epsilon " + eps;
}

void ac8(Check& c) {
    const auto P = load_chain("holo_cycle.json");
    const auto st = io::structure_from_json(io::read_json_file(kFixtures / "holo_adapted.json"), kFixtures);
    pipeline::PipelineConfig cfg;
    cfg.perturbation_magnitudes = {0.01, 0.003, 0.001};
    cfg.seed = 1;
    const auto dir = fs::temp_directory_path() / "holosurf_acceptance_8a";
    const auto dir2 = fs::temp_directory_path() / "holosurf_acceptance_8b";
    fs::remove_all(dir);
    fs::remove_all(dir2);
    const auto rep = pipeline::run(P, st, cfg, dir);
    c.expect(rep.status == "ok", "pipeline status " + rep.status + (rep.error ? ": " + rep.error->message : ""));
    std::vector<double> eps;
    for (const auto& s : rep.stages) {
        if (s.name != "surgery") continue;
        const auto m = io::map_from_json(io::read_json_file(dir / ("stage_" + std::to_string(s.index) + "_surgery.json")));
        c.expect(surfaces::self_intersections(m).empty(), "entry " + std::to_string(s.entry) + " not embedded");
        c.expect(surfaces::check_surface(m.surface()).ok, "entry " + std::to_string(s.entry) + " not a surface");
        eps.push_back(s.epsilon);
    }
    c.expect(eps.size() == 3, "expected 3 surgery outputs, got " + std::to_string(eps.size()));
    if (eps.size() == 3) {
        c.expect(eps[0] <= 0.05, "epsilon at magnitude 0.01 is " + fmt(eps[0]));
        c.expect(eps[1] < eps[0] && eps[2] < eps[1], "epsilon not decreasing");
    }
    pipeline::run(P, st, cfg, dir2);
    c.expect(slurp(dir / "report.json") == slurp(dir2 / "report.json"), "report differs between runs");
    std::string e;
    for (double x : eps) e += (e.empty() ? "" : ", ") + fmt(x);
    c.summary = "epsilon " + e;
}

/// Smooth, bounded-gradient displacement field.
RationalPoint displaced(const RationalPoint& p, double delta) {
    const double x = p[0].get_d(), y = p[1].get_d(), z = p[2].get_d(), w = p[3].get_d();
    const double d[4] = {std::sin(3 * y + w), std::cos(2 * x - z), std::sin(x + 2 * w), std::cos(3 * z + y)};
    RationalPoint q = p;
    for (int i = 0; i < 4; ++i) q[static_cast<std::size_t>(i)] += rationalize(0.5 * delta * d[i], 1 << 24);
    return q;
}

void ac9(Check& c) {
    const std::vector<std::pair<std::string, surfaces::SurfaceMap>> family{
        {"torus", clifford_torus(8)},
        {"octahedron", octahedron_map(4)},
        {"sheet", sheet(4, P({0, 0, 0, 0}), P({1, 0, 0, 0}), P({0, 1, 1, 0}))}};
    std::string out;
    for (const auto& [name, f] : family) {
        double prev = std::numeric_limits<double>::infinity();
        for (double delta : {0.1, 0.05, 0.025}) {
            std::vector<RationalPoint> img;
            for (const auto& p : f.images()) img.push_back(displaced(p, delta));
            const auto g = surfaces::SurfaceMap::piecewise_affine(f.surface(), img);
            double c0 = 0;
            for (std::size_t v = 0; v < img.size(); ++v) c0 = std::max(c0, (g.image(static_cast<int>(v)) - f.image(static_cast<int>(v))).norm());
            c.expect(c0 <= delta + 1e-12, name + ": C0 distance " + fmt(c0) + " exceeds " + fmt(delta));
            const double flat = surfaces::homotopy_certificate(f, g).value;
            c.expect(flat < prev, name + ": flat distance not decreasing at delta " + fmt(delta));
            prev = flat;
            out += " " + fmt(flat);
        }
        out += ";";
    }
    c.summary = "flat" + out;
}

}  // namespace

int main() {
    const std::vector<std::tuple<std::string, double, std::function<void(Check&)>>> criteria{
        {"AC1 chain algebra exactness", 5, ac1},
        {"AC2 Wirtinger suite", 10, ac2},
        {"AC3 parameterization", 30, ac3},
        {"AC4 flat norm LP vs scan oracle", 60, ac4},
        {"AC5 deformation convergence", 120, ac5},
        {"AC6 surgery correctness", 60, ac6},
        {"AC7 coarse-defect calibration", 10, ac7},
        {"AC8 end-to-end pipeline", 300, ac8},
        {"AC9 flat continuity", 60, ac9}};
    int failed = 0;
    for (const auto& [name, limit, fn] : criteria) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= limit) c.failures.push_back("runtime " + fmt(secs) + " s over " + fmt(limit) + " s");
        const bool ok = c.failures.empty();
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << fmt(secs) << " s)";
        if (!c.summary.empty()) std::cout << ": " << c.summary;
        std::cout << "\n";
        for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::cout << "    " << c.failures[i] << "\n";
        std::cout.flush();
    }
    return failed ? 1 : 0;
}
