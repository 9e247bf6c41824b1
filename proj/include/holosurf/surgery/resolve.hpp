#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "holosurf/core/exact_linalg.hpp"
#include "holosurf/hermitian/adapted.hpp"
#include "holosurf/surfaces/certificates.hpp"
#include "holosurf/surfaces/intersect.hpp"
#include "holosurf/surgery/annulus.hpp"

namespace holosurf::surgery {

struct SurgeryOptions {
    int n_theta = 32;
    int n_t = 16;
    double t_min = 1.0 / 64;
    double margin = 0.05;  ///< relative clearance between the cut and the patch
};

struct SurgeryRecord {
    RationalPoint point;
    double r = 0.0;
    double area_delta = 0.0;
    double flat_delta = 0.0;     ///< cone certificate for output - input
    double distortion = 1.0;     ///< condition number of the chart frame
    int faces_removed = 0;
    double annulus_area = 0.0;   ///< area of the stitched annulus in R^n
    double removed_disk_area = 0.0;  ///< area of the two round disks of radius r/e
};

struct SurgeryResult {
    surfaces::SurfaceMap map;
    SurgeryRecord record;
};

namespace detail {

inline std::string point_text(const RationalPoint& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + std::to_string(p[i].get_d());
    return s + ")";
}

/// Nearest multiple of 2^-40; keeps the exact intersection tests cheap.
inline Rational dyadic(double x) {
    const mpz_class den = mpz_class(1) << 40;
    Rational q(mpz_class(static_cast<long>(std::llround(std::ldexp(x, 40)))), den);
    q.canonicalize();
    return q;
}

/// Sheet around the intersection: the plane of one face, its removed faces and the cut loop.
struct Sheet {
    int face = -1;
    RationalPoint e1, e2;   ///< rational basis of the tangent plane (face edges)
    Vec u, v;               ///< orthonormal, same orientation as (e1, e2)
    std::set<int> removed;
    std::vector<int> loop;  ///< cut polygon, counterclockwise in (u, v)
};

inline double point_face_distance(const Vec& x, const surfaces::SurfaceMap& m, int f) {
    const auto& t = m.surface().faces()[static_cast<std::size_t>(f)];
    return hermitian::point_triangle_distance(x, m.image(t[0]), m.image(t[1]), m.image(t[2]));
}

/// Exact: all vertices of face f lie in the plane p + span(e1, e2) and the face is positively
/// oriented with respect to (e1, e2).
inline bool coplanar_same_orientation(const surfaces::SurfaceMap& m, int f, const RationalPoint& p, const RationalPoint& e1,
                                      const RationalPoint& e2, bool check_orientation) {
    const auto& t = m.surface().faces()[static_cast<std::size_t>(f)];
    std::vector<std::array<Rational, 2>> coords;
    for (int v : t) {
        const auto& x = m.images()[static_cast<std::size_t>(v)];
        exact::Matrix a(x.size(), exact::Row(2));
        exact::Row b(x.size());
        for (std::size_t d = 0; d < x.size(); ++d) {
            a[d][0] = e1[d];
            a[d][1] = e2[d];
            b[d] = x[d] - p[d];
        }
        auto c = exact::solve_overdetermined(a, b);
        if (!c) return false;
        coords.push_back({(*c)[0], (*c)[1]});
    }
    if (!check_orientation) return true;
    const Rational det = (coords[1][0] - coords[0][0]) * (coords[2][1] - coords[0][1]) -
                         (coords[1][1] - coords[0][1]) * (coords[2][0] - coords[0][0]);
    return det > 0;
}

inline Sheet build_sheet(const surfaces::SurfaceMap& m, int face, const RationalPoint& p, double cut_radius) {
    Sheet s;
    s.face = face;
    const auto& t = m.surface().faces()[static_cast<std::size_t>(face)];
    const auto& img = m.images();
    s.e1 = s.e2 = img[static_cast<std::size_t>(t[0])];
    for (std::size_t d = 0; d < s.e1.size(); ++d) {
        s.e1[d] = img[static_cast<std::size_t>(t[1])][d] - img[static_cast<std::size_t>(t[0])][d];
        s.e2[d] = img[static_cast<std::size_t>(t[2])][d] - img[static_cast<std::size_t>(t[0])][d];
    }
    const Vec a = to_vec(to_double(s.e1)), b = to_vec(to_double(s.e2));
    s.u = a.normalized();
    s.v = (b - b.dot(s.u) * s.u).normalized();
    const Vec pd = to_vec(to_double(p));

    // Faces meeting the cut ball, grown from `face` across shared edges.
    std::map<int, std::vector<int>> nb;
    for (const auto& [e, uses] : m.surface().edges())
        for (const auto& x : uses)
            for (const auto& y : uses)
                if (x.face != y.face) nb[x.face].push_back(y.face);
    std::vector<int> stack{face};
    s.removed.insert(face);
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        for (int g : nb[f])
            if (!s.removed.count(g) && point_face_distance(pd, m, g) < cut_radius) {
                s.removed.insert(g);
                stack.push_back(g);
            }
    }
    for (int f : s.removed)
        if (!coplanar_same_orientation(m, f, p, s.e1, s.e2, true))
            throw ValidationError("NotLocallyFlat", "surface is not a single flat sheet near " + point_text(p));

    // Boundary of the removed set, oriented by its faces.
    std::map<int, int> next;
    std::map<surfaces::EdgeKey, int> count;
    for (int f : s.removed) {
        const auto& q = m.surface().faces()[static_cast<std::size_t>(f)];
        for (int k = 0; k < 3; ++k) {
            const int x = q[static_cast<std::size_t>(k)], y = q[static_cast<std::size_t>((k + 1) % 3)];
            ++count[{std::min(x, y), std::max(x, y)}];
        }
    }
    for (int f : s.removed) {
        const auto& q = m.surface().faces()[static_cast<std::size_t>(f)];
        for (int k = 0; k < 3; ++k) {
            const int x = q[static_cast<std::size_t>(k)], y = q[static_cast<std::size_t>((k + 1) % 3)];
            if (count[{std::min(x, y), std::max(x, y)}] != 1) continue;
            if (next.count(x)) throw ValidationError("NotLocallyFlat", "cut region is not a disk near " + point_text(p));
            next[x] = y;
        }
    }
    if (next.empty()) throw ValidationError("NotLocallyFlat", "cut region has no boundary near " + point_text(p));
    int start = next.begin()->first, cur = start;
    do {
        s.loop.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end() || s.loop.size() > next.size())
            throw ValidationError("NotLocallyFlat", "cut region boundary is not a single loop near " + point_text(p));
        cur = it->second;
    } while (cur != start);
    if (s.loop.size() != next.size())
        throw ValidationError("NotLocallyFlat", "cut region boundary has several loops near " + point_text(p));
    return s;
}

/// Angle of x - p in the sheet's (u, v) coordinates.
inline double sheet_angle(const Sheet& s, const Vec& x, const Vec& p) { return std::atan2((x - p).dot(s.v), (x - p).dot(s.u)); }

/// Triangulates the planar ring between the cut loop and inner circle vertices, both given in
/// counterclockwise order. Triangles are oriented like the sheet.
inline void zip_ring(const Sheet& s, const std::vector<int>& inner, const std::vector<Vec>& pos, const Vec& p,
                     std::vector<surfaces::Face>& out) {
    const auto& outer = s.loop;
    const double base = sheet_angle(s, pos[static_cast<std::size_t>(outer[0])], p);
    auto rel = [&](int v) {
        double a = sheet_angle(s, pos[static_cast<std::size_t>(v)], p) - base;
        while (a < 0) a += 2 * std::numbers::pi;
        while (a >= 2 * std::numbers::pi) a -= 2 * std::numbers::pi;
        return a;
    };
    for (std::size_t i = 1; i < outer.size(); ++i)
        if (rel(outer[i]) <= rel(outer[i - 1]))
            throw ValidationError("NotLocallyFlat", "cut polygon is not star-shaped around the intersection point");
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < inner.size(); ++j)
        if (rel(inner[j]) < rel(inner[j0])) j0 = j;
    const std::size_t m = outer.size(), n = inner.size();
    auto oa = [&](std::size_t i) { return i == m ? 2 * std::numbers::pi : rel(outer[i]); };
    auto ia = [&](std::size_t j) { return j == n ? rel(inner[j0]) + 2 * std::numbers::pi : rel(inner[(j0 + j) % n]); };
    auto orient = [&](int a, int b, int c) {
        const Vec x = pos[static_cast<std::size_t>(a)], y = pos[static_cast<std::size_t>(b)], z = pos[static_cast<std::size_t>(c)];
        return (y - x).dot(s.u) * (z - x).dot(s.v) - (y - x).dot(s.v) * (z - x).dot(s.u);
    };
    // Greedy zipper by angle, overridden when the preferred triangle would fold over.
    std::size_t i = 0, j = 0;
    while (i < m || j < n) {
        const int o = outer[i % m], c = inner[(j0 + j) % n];
        const int o2 = outer[(i + 1) % m], c2 = inner[(j0 + j + 1) % n];
        const bool outer_ok = i < m && orient(o, o2, c) > 0;
        const bool inner_ok = j < n && orient(o, c2, c) > 0;
        const bool prefer_outer = j == n || (i < m && oa(i + 1) <= ia(j + 1));
        if (outer_ok && (prefer_outer || !inner_ok)) {
            out.push_back({o, o2, c});
            ++i;
        } else if (inner_ok) {
            out.push_back({o, c2, c});
            ++j;
        } else {
            throw ValidationError("NotLocallyFlat", "cut polygon cannot be joined to the patch boundary");
        }
    }
}

}  // namespace detail

/// Replaces the two sheets' disks of radius r/e around a transverse double point by the
/// r-scaled exponential annulus, joined to the cut polygons by planar rings.
inline SurgeryResult resolve_one(const surfaces::SurfaceMap& map, const surfaces::SelfIntersection& x, double r,
                                 const SurgeryOptions& opt = {}) {
    if (map.dim() != 4) throw ValidationError("DimensionMismatch", "surgery works in R^4");
    if (!x.isolated || !x.transverse || !x.interior || x.faces.size() != 1)
        throw ValidationError("TransversalityFailure", "self-intersection at " + detail::point_text(x.point) + " is not a transverse double point");
    if (!(r > 0)) throw ValidationError("BadRadius", "surgery radius must be positive");
    const double rho = r * std::exp(-1.0);
    const double cut = rho * (1 + opt.margin);
    const Vec p = to_vec(to_double(x.point));
    auto A = detail::build_sheet(map, x.faces[0].first, x.point, cut);
    auto B = detail::build_sheet(map, x.faces[0].second, x.point, cut);
    for (int f : A.removed)
        if (B.removed.count(f)) throw ValidationError("RadiusTooLarge", "sheets share faces inside the surgery ball");

    // Chart frame: sheet A -> (x1, x2) with reversed second axis, sheet B -> (x3, x4); this
    // matches the patch boundary orientation to the cut disks.
    Eigen::Matrix4d frame;
    frame.col(0) = A.u;
    frame.col(1) = -A.v;
    frame.col(2) = B.u;
    frame.col(3) = B.v;
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(frame);
    const double distortion = svd.singularValues()[0] / svd.singularValues()[3];
    const double reach = rho * svd.singularValues()[0] * (1 + opt.margin);
    for (int f = 0; f < static_cast<int>(map.surface().face_count()); ++f) {
        if (A.removed.count(f) || B.removed.count(f)) continue;
        if (detail::point_face_distance(p, map, f) >= reach) continue;
        if (detail::coplanar_same_orientation(map, f, x.point, A.e1, A.e2, false) ||
            detail::coplanar_same_orientation(map, f, x.point, B.e1, B.e2, false))
            continue;
        throw ValidationError("RadiusTooLarge", "another sheet passes within the surgery ball at " + detail::point_text(x.point));
    }

    // New vertices: interior annulus rows and the two boundary circles.
    std::vector<RationalPoint> images = map.images();
    std::vector<Vec> pos;
    for (const auto& q : images) pos.push_back(to_vec(to_double(q)));
    auto coeffs = [](const RationalPoint& e1, const RationalPoint& e2, const Vec& w) {
        // w in span(e1, e2): least-squares coefficients.
        const Vec a = to_vec(to_double(e1)), b = to_vec(to_double(e2));
        Eigen::Matrix<double, 4, 2> m;
        m.col(0) = a;
        m.col(1) = b;
        const Eigen::Vector2d c = (m.transpose() * m).ldlt().solve(m.transpose() * Eigen::Vector4d(w));
        return c;
    };
    const auto patch = annulus_mesh(opt.n_theta, opt.n_t, opt.t_min);
    std::vector<int> id(patch.points.size());
    for (std::size_t k = 0; k < patch.points.size(); ++k) {
        const Vec y = r * patch.points[k];
        RationalPoint q = x.point;
        const Eigen::Vector2d ca = coeffs(A.e1, A.e2, frame.leftCols(2) * Eigen::Vector2d(y[0], y[1]));
        const Eigen::Vector2d cb = coeffs(B.e1, B.e2, frame.rightCols(2) * Eigen::Vector2d(y[2], y[3]));
        const Rational a0 = detail::dyadic(ca[0]), a1 = detail::dyadic(ca[1]);
        const Rational b0 = detail::dyadic(cb[0]), b1 = detail::dyadic(cb[1]);
        for (std::size_t d = 0; d < 4; ++d) q[d] += a0 * A.e1[d] + a1 * A.e2[d] + b0 * B.e1[d] + b1 * B.e2[d];
        id[k] = static_cast<int>(images.size());
        pos.push_back(to_vec(to_double(q)));
        images.push_back(std::move(q));
    }

    std::vector<surfaces::Face> faces;
    for (int f = 0; f < static_cast<int>(map.surface().face_count()); ++f)
        if (!A.removed.count(f) && !B.removed.count(f)) faces.push_back(map.surface().faces()[static_cast<std::size_t>(f)]);
    for (const auto& f : patch.surface.faces())
        faces.push_back({id[static_cast<std::size_t>(f[0])], id[static_cast<std::size_t>(f[1])], id[static_cast<std::size_t>(f[2])]});
    // Inner circles in counterclockwise order of their sheets: the t = 1 circle runs clockwise
    // in (u, v) because of the reversed axis.
    std::vector<int> ca, cb;
    for (int k = 0; k < patch.n_theta; ++k) {
        ca.push_back(id[static_cast<std::size_t>(patch.last_circle(-k))]);
        cb.push_back(id[static_cast<std::size_t>(patch.first_circle(k))]);
    }
    detail::zip_ring(A, ca, pos, p, faces);
    detail::zip_ring(B, cb, pos, p, faces);

    // Drop vertices no longer used.
    std::vector<int> remap(images.size(), -1);
    std::vector<RationalPoint> kept;
    for (auto& f : faces)
        for (auto& v : f) {
            if (remap[static_cast<std::size_t>(v)] < 0) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(kept.size());
                kept.push_back(images[static_cast<std::size_t>(v)]);
            }
            v = remap[static_cast<std::size_t>(v)];
        }
    surfaces::AbstractSurface out_surface(static_cast<int>(kept.size()), std::move(faces));
    SurgeryResult res{surfaces::SurfaceMap::piecewise_affine(std::move(out_surface), std::move(kept))};
    auto& rec = res.record;
    rec.point = x.point;
    rec.r = r;
    rec.distortion = distortion;
    rec.faces_removed = static_cast<int>(A.removed.size() + B.removed.size());
    rec.area_delta = surfaces::area_of_map(res.map) - surfaces::area_of_map(map);
    rec.removed_disk_area = 2 * std::numbers::pi * rho * rho;
    for (const auto& f : patch.surface.faces())
        rec.annulus_area += 0.5 * parallelogram_area(pos[static_cast<std::size_t>(id[static_cast<std::size_t>(f[1])])] - pos[static_cast<std::size_t>(id[static_cast<std::size_t>(f[0])])],
                                                     pos[static_cast<std::size_t>(id[static_cast<std::size_t>(f[2])])] - pos[static_cast<std::size_t>(id[static_cast<std::size_t>(f[0])])]);
    const auto diff = chains::difference(res.map.to_chain(), map.to_chain());
    rec.flat_delta = surfaces::cone_certificate(diff, x.point).value;
    return res;
}

struct ResolveReport {
    surfaces::SurfaceMap map;
    std::vector<SurgeryRecord> records;
    double total_area_delta = 0.0;
    double total_flat_delta = 0.0;
};

/// Resolves self-intersections one at a time, taking for each the first radius of the schedule
/// that succeeds and keeps the running |area| and flat increments within the budget.
inline ResolveReport resolve_all(const surfaces::SurfaceMap& map, const std::vector<double>& r_schedule, double epsilon_budget,
                                 const SurgeryOptions& opt = {}) {
    ResolveReport rep{map};
    for (int guard = 0; guard < 1000; ++guard) {
        const auto xs = surfaces::self_intersections(rep.map);
        if (xs.empty()) return rep;
        for (const auto& x : xs)
            if (!x.isolated || !x.transverse || !x.interior || x.faces.size() != 1)
                throw ValidationError("TransversalityFailure",
                                      "self-intersection at " + detail::point_text(x.point) + " is not a transverse double point");
        bool done = false;
        std::string last;
        for (double r : r_schedule) {
            try {
                auto step = resolve_one(rep.map, xs.front(), r, opt);
                const double area = rep.total_area_delta + std::fabs(step.record.area_delta);
                const double flat = rep.total_flat_delta + step.record.flat_delta;
                if (area > epsilon_budget || flat > epsilon_budget) {
                    last = "budget";
                    continue;
                }
                rep.total_area_delta = area;
                rep.total_flat_delta = flat;
                rep.records.push_back(step.record);
                rep.map = std::move(step.map);
                done = true;
                break;
            } catch (const ValidationError& e) {
                if (e.code() != "RadiusTooLarge" && e.code() != "NotLocallyFlat") throw;
                last = e.what();
            }
        }
        if (!done)
            throw ValidationError("BudgetExhausted", "no radius in the schedule resolves the point at " + detail::point_text(xs.front().point) +
                                                         " within the budget (" + last + ")");
    }
    throw InternalError("SurgeryDiverged", "surgery did not terminate");
}

}  // namespace holosurf::surgery
