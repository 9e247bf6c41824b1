#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "holosurf/chains/chain.hpp"
#include "holosurf/hermitian/adapted.hpp"
#include "holosurf/norms/flat.hpp"
#include "holosurf/surfaces/map.hpp"

namespace holosurf::io {

using Json = nlohmann::json;

/// Rationals are written as "p/q" (or "p") strings. Strings may also be decimals, read exactly.
/// Integers are accepted; binary floats are not, since they would silently round.
inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(mpz_class(j.dump(), 10));
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
        if (j[1].get<long long>() == 0) throw ValidationError("BadRational", "zero denominator");
        return make_rational(j[0].get<long>(), j[1].get<long>());
    }
    throw ValidationError("BadRational", "expected a rational string such as \"3/4\", got " + j.dump());
}

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json point_to_json(const RationalPoint& p) {
    Json a = Json::array();
    for (const auto& x : p) a.push_back(to_string(x));
    return a;
}

inline RationalPoint point_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("BadJson", "point must be an array");
    RationalPoint p;
    for (const auto& x : j) p.push_back(rational_from_json(x));
    return p;
}

inline Json chain_to_json(const chains::PolyhedralChain& c) {
    Json j;
    j["ambient_dim"] = c.ambient_dim;
    j["degree"] = c.degree;
    j["points"] = Json::array();
    for (const auto& p : c.points) j["points"].push_back(point_to_json(p));
    j["terms"] = Json::array();
    for (const auto& t : c.terms) j["terms"].push_back({{"coeff", to_string(t.coeff)}, {"simplex", t.vertices}});
    if (c.reduced_position) j["reduced_position"] = true;
    return j;
}

inline chains::PolyhedralChain chain_from_json(const Json& j) {
    try {
        chains::PolyhedralChain c(j.at("ambient_dim").get<int>(), j.value("degree", 2));
        if (c.ambient_dim < 1 || c.ambient_dim > chains::kMaxAmbientDim)
            throw ValidationError("DimensionMismatch", "ambient dimension must be 1..4");
        for (const auto& p : j.at("points")) c.add_point(point_from_json(p));
        for (const auto& t : j.at("terms")) {
            chains::Term term{rational_from_json(t.at("coeff")), t.at("simplex").get<std::vector<std::size_t>>()};
            c.terms.push_back(std::move(term));
        }
        c.reduced_position = j.value("reduced_position", false);
        chains::detail::validate_shape(c);
        return c;
    } catch (const Json::exception& e) {
        throw ValidationError("BadJson", std::string("malformed chain JSON: ") + e.what());
    }
}

inline Json matrix_to_json(const Mat& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        a.push_back(row);
    }
    return a;
}

inline Mat matrix_from_json(const Json& j) {
    const auto n = static_cast<int>(j.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(j[static_cast<std::size_t>(i)].size()) != n) throw ValidationError("DimensionMismatch", "matrix must be square");
        for (int k = 0; k < n; ++k) {
            const auto& x = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            m(i, k) = x.is_string() ? to_double(parse_rational(x.get<std::string>())) : x.get<double>();
        }
    }
    return m;
}

inline Json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("FileNotFound", "cannot open " + p.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("BadJson", p.string() + ": " + e.what());
    }
}

/// {"J": n x n, "omega": n x n} for a constant structure; {"kind": "standard"}; or
/// {"kind": "adapted", "surface": chain or file name, "sigma": s}. Relative file names are
/// resolved against `base`.
inline hermitian::HermitianStructure structure_from_json(const Json& j, const std::filesystem::path& base = {}) {
    try {
        const std::string kind = j.value("kind", j.contains("J") ? "constant" : "standard");
        if (kind == "standard") return hermitian::HermitianStructure::standard();
        if (kind == "constant") return hermitian::HermitianStructure::constant(matrix_from_json(j.at("J")), matrix_from_json(j.at("omega")));
        if (kind == "adapted") {
            const auto& s = j.at("surface");
            const auto chain = s.is_string() ? chain_from_json(read_json_file(base / s.get<std::string>())) : chain_from_json(s);
            return hermitian::face_adapted(chain, j.value("sigma", 0.002));
        }
        throw ValidationError("BadJson", "unknown structure kind '" + kind + "'");
    } catch (const Json::exception& e) {
        throw ValidationError("BadJson", std::string("malformed structure JSON: ") + e.what());
    }
}

/// {"lo": [...], "hi": [...], "h": "1/10"}
inline norms::GridSpec grid_from_json(const Json& j) {
    try {
        return norms::GridSpec::from_box(point_from_json(j.at("lo")), point_from_json(j.at("hi")), rational_from_json(j.at("h")));
    } catch (const Json::exception& e) {
        throw ValidationError("BadJson", std::string("malformed grid JSON: ") + e.what());
    }
}

inline Json decomposition_to_json(const norms::FlatDecomposition& d) {
    return {{"value", d.value},
            {"lp_value", d.lp_value},
            {"dual_value", d.dual_value},
            {"duality_gap", d.duality_gap},
            {"verified", d.verified},
            {"iterations", d.iterations},
            {"A", chain_to_json(d.A)},
            {"B", chain_to_json(d.B)}};
}

/// Piecewise-affine map: exact vertex images, faces and optional per-face defect.
inline Json map_to_json(const surfaces::SurfaceMap& m, const std::vector<double>& face_defect = {}) {
    Json j;
    j["ambient_dim"] = m.dim();
    j["vertices"] = Json::array();
    for (const auto& p : m.images()) j["vertices"].push_back(point_to_json(p));
    j["faces"] = Json::array();
    for (const auto& f : m.surface().faces()) j["faces"].push_back({f[0], f[1], f[2]});
    if (!face_defect.empty()) j["face_defect"] = face_defect;
    return j;
}

inline surfaces::SurfaceMap map_from_json(const Json& j) {
    try {
        std::vector<RationalPoint> img;
        for (const auto& p : j.at("vertices")) img.push_back(point_from_json(p));
        std::vector<surfaces::Face> faces;
        for (const auto& f : j.at("faces")) faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
        surfaces::AbstractSurface s(static_cast<int>(img.size()), std::move(faces));
        return surfaces::SurfaceMap::piecewise_affine(std::move(s), std::move(img));
    } catch (const Json::exception& e) {
        throw ValidationError("BadJson", std::string("malformed map JSON: ") + e.what());
    }
}

/// OFF text; the header names the vertex dimension when it is not 3 ("4OFF").
inline std::string to_off(const surfaces::SurfaceMap& m) {
    std::ostringstream out;
    out.precision(17);
    out << (m.dim() == 3 ? "OFF" : std::to_string(m.dim()) + "OFF") << "\n";
    out << m.images().size() << ' ' << m.surface().face_count() << " 0\n";
    for (std::size_t v = 0; v < m.images().size(); ++v) {
        const Vec x = m.image(static_cast<int>(v));
        for (int d = 0; d < x.size(); ++d) out << (d ? " " : "") << x[d];
        out << '\n';
    }
    for (const auto& f : m.surface().faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return out.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ValidationError("IoError", "cannot write " + p.string());
    out << text;
}

}  // namespace holosurf::io
