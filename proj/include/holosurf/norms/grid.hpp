#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "holosurf/chains/chain.hpp"

namespace holosurf::norms {

/// Axis-aligned cubical lattice lo + k h, 0 <= k_i <= cells_i.
struct GridSpec {
    int dim = 4;
    RationalPoint lo;
    Rational h;
    std::vector<long> cells;

    /// Smallest grid with spacing h starting at lo that covers hi.
    static GridSpec from_box(const RationalPoint& lo, const RationalPoint& hi, const Rational& h) {
        if (lo.size() != hi.size() || lo.empty() || lo.size() > 4)
            throw ValidationError("DimensionMismatch", "grid box corners must have the same dimension (1..4)");
        if (h <= 0) throw ValidationError("BadGrid", "grid mesh size must be positive");
        GridSpec g;
        g.dim = static_cast<int>(lo.size());
        g.lo = lo;
        g.h = h;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (hi[i] <= lo[i]) throw ValidationError("BadGrid", "grid box must have positive extent");
            Rational n = (hi[i] - lo[i]) / h;
            mpz_class c = holosurf::floor(n);
            if (c < n) c += 1;
            g.cells.push_back(c.get_si());
        }
        return g;
    }

    Rational coord(int axis, long k) const { return lo[static_cast<std::size_t>(axis)] + h * k; }

    RationalPoint hi() const {
        RationalPoint p(lo.size());
        for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = coord(i, cells[static_cast<std::size_t>(i)]);
        return p;
    }

    RationalPoint point(std::span<const long> k) const {
        RationalPoint p(lo.size());
        for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = coord(i, k[static_cast<std::size_t>(i)]);
        return p;
    }

    /// Lattice index of a coordinate on the axis, if it is a grid value.
    std::optional<long> lattice_index(int axis, const Rational& x) const {
        Rational k = (x - lo[static_cast<std::size_t>(axis)]) / h;
        if (k.get_den() != 1) return std::nullopt;
        return k.get_num().get_si();
    }

    bool strictly_contains(const RationalPoint& p) const {
        const auto top = hi();
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!(p[i] > lo[i] && p[i] < top[i])) return false;
        return true;
    }
};

/// Kuhn (Freudenthal) triangulation of the cubical lattice: the k-simplices are
/// (v0, v0 + 1_{S1}, ..., v0 + 1_{Sk}) for strictly increasing coordinate sets S1 < ... < Sk.
/// Vertices are listed in ascending (lexicographic) order, which is also the canonical orientation.
class SimplicialGrid {
public:
    struct Incidence {
        std::size_t face;
        int sign;
    };

    explicit SimplicialGrid(GridSpec spec) : spec_(std::move(spec)) {
        const int n = spec_.dim;
        if (n < 2 || n > 4) throw ValidationError("DimensionMismatch", "simplicial grids need dimension 2..4");
        stride_.assign(static_cast<std::size_t>(n), 1);
        for (int i = n - 2; i >= 0; --i)
            stride_[static_cast<std::size_t>(i)] = stride_[static_cast<std::size_t>(i + 1)] * (spec_.cells[static_cast<std::size_t>(i + 1)] + 1);
        vertex_count_ = stride_[0] * static_cast<std::size_t>(spec_.cells[0] + 1);
        if (vertex_count_ >= (std::size_t{1} << 21)) throw ValidationError("GridTooLarge", "grid has too many vertices");
        enumerate(1, edges_);
        enumerate(2, triangles_);
        if (n >= 3) enumerate(3, tets_);
        for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_.emplace(key(edges_[i]), i);
        for (std::size_t i = 0; i < triangles_.size(); ++i) triangle_index_.emplace(key(triangles_[i]), i);
        boundary2_ = boundary_of(triangles_, edge_index_);
        boundary3_ = boundary_of(tets_, triangle_index_);
        for (const auto& t : triangles_) triangle_area_.push_back(std::sqrt(squared_volume(t).get_d()));
        for (const auto& t : tets_) tet_volume_.push_back(std::sqrt(squared_volume(t).get_d()));
    }

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    const std::vector<std::vector<std::size_t>>& edges() const noexcept { return edges_; }
    const std::vector<std::vector<std::size_t>>& triangles() const noexcept { return triangles_; }
    const std::vector<std::vector<std::size_t>>& tets() const noexcept { return tets_; }
    /// Per triangle, its three boundary edges with signs.
    const std::vector<std::vector<Incidence>>& boundary2() const noexcept { return boundary2_; }
    /// Per tetrahedron, its four boundary triangles with signs.
    const std::vector<std::vector<Incidence>>& boundary3() const noexcept { return boundary3_; }
    double triangle_area(std::size_t i) const { return triangle_area_[i]; }
    double tet_volume(std::size_t i) const { return tet_volume_[i]; }

    std::vector<long> lattice(std::size_t id) const {
        std::vector<long> k(static_cast<std::size_t>(spec_.dim));
        for (int i = 0; i < spec_.dim; ++i) {
            k[static_cast<std::size_t>(i)] = static_cast<long>(id / stride_[static_cast<std::size_t>(i)]);
            id %= stride_[static_cast<std::size_t>(i)];
        }
        return k;
    }

    std::size_t vertex_id(std::span<const long> k) const {
        std::size_t id = 0;
        for (int i = 0; i < spec_.dim; ++i) id += static_cast<std::size_t>(k[static_cast<std::size_t>(i)]) * stride_[static_cast<std::size_t>(i)];
        return id;
    }

    RationalPoint vertex_point(std::size_t id) const { return spec_.point(lattice(id)); }

    std::optional<std::size_t> vertex_of(const RationalPoint& p) const {
        std::vector<long> k(p.size());
        for (int i = 0; i < spec_.dim; ++i) {
            auto idx = spec_.lattice_index(i, p[static_cast<std::size_t>(i)]);
            if (!idx || *idx < 0 || *idx > spec_.cells[static_cast<std::size_t>(i)]) return std::nullopt;
            k[static_cast<std::size_t>(i)] = *idx;
        }
        return vertex_id(k);
    }

    std::optional<std::size_t> find_triangle(std::vector<std::size_t> ids) const {
        std::sort(ids.begin(), ids.end());
        auto it = triangle_index_.find(key(ids));
        if (it == triangle_index_.end()) return std::nullopt;
        return it->second;
    }

    Rational squared_volume(const std::vector<std::size_t>& simplex) const {
        std::vector<RationalPoint> pts;
        for (auto v : simplex) pts.push_back(vertex_point(v));
        Rational g = exact::gram_determinant(pts);
        Rational f = 1;
        for (std::size_t i = 2; i < simplex.size(); ++i) f *= static_cast<long>(i);
        return g / (f * f);
    }

    /// Coefficient vector of a 2-chain made of grid triangles; throws NotOnGrid otherwise.
    std::vector<Rational> triangle_coefficients(const chains::PolyhedralChain& t) const {
        if (t.degree != 2 || t.ambient_dim != spec_.dim) throw ValidationError("DimensionMismatch", "grid chain must be a 2-chain in the grid's dimension");
        std::vector<Rational> c(triangles_.size(), Rational(0));
        const auto k = chains::canonicalize(t);
        for (const auto& term : k.terms) {
            std::vector<std::size_t> ids;
            for (auto v : term.vertices) {
                auto id = vertex_of(k.points[v]);
                if (!id) throw ValidationError("NotOnGrid", "chain vertex is not a grid vertex");
                ids.push_back(*id);
            }
            std::vector<std::size_t> sorted = ids;
            const int parity = chains::detail::sort_with_parity(sorted);
            auto tri = find_triangle(sorted);
            if (!tri) throw ValidationError("NotOnGrid", "chain simplex is not a triangle of the grid");
            c[*tri] += parity * term.coeff;
        }
        return c;
    }

    chains::PolyhedralChain chain_from(const std::vector<Rational>& coeff, int degree) const {
        const auto& cells = degree == 2 ? triangles_ : tets_;
        chains::PolyhedralChain out(spec_.dim, degree);
        std::unordered_map<std::size_t, std::size_t> local;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (coeff[i] == 0) continue;
            chains::Term t{coeff[i], {}};
            for (auto v : cells[i]) {
                auto [it, fresh] = local.emplace(v, out.points.size());
                if (fresh) out.points.push_back(vertex_point(v));
                t.vertices.push_back(it->second);
            }
            out.terms.push_back(std::move(t));
        }
        out.reduced_position = true;
        return out;
    }

private:
    static std::uint64_t key(const std::vector<std::size_t>& ids) {
        std::uint64_t k = 0;
        for (auto v : ids) k = (k << 21) | static_cast<std::uint64_t>(v);
        return k;
    }

    /// All k-simplices: label each axis 0..k (0 = unused); block j collects the axes labelled j.
    void enumerate(int k, std::vector<std::vector<std::size_t>>& out) const {
        const int n = spec_.dim;
        std::size_t labelings = 1;
        for (int i = 0; i < n; ++i) labelings *= static_cast<std::size_t>(k + 1);
        std::vector<std::vector<int>> chains_of_blocks;
        for (std::size_t code = 0; code < labelings; ++code) {
            std::vector<int> label(static_cast<std::size_t>(n));
            std::size_t c = code;
            std::vector<int> used(static_cast<std::size_t>(k + 1), 0);
            for (int i = 0; i < n; ++i) {
                label[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::size_t>(k + 1));
                c /= static_cast<std::size_t>(k + 1);
                used[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] = 1;
            }
            bool ok = true;
            for (int j = 1; j <= k; ++j) ok = ok && used[static_cast<std::size_t>(j)];
            if (ok) chains_of_blocks.push_back(label);
        }
        for (std::size_t v0 = 0; v0 < vertex_count_; ++v0) {
            const auto base = lattice(v0);
            for (const auto& label : chains_of_blocks) {
                bool inside = true;
                for (int i = 0; i < n; ++i)
                    if (label[static_cast<std::size_t>(i)] > 0 && base[static_cast<std::size_t>(i)] + 1 > spec_.cells[static_cast<std::size_t>(i)]) inside = false;
                if (!inside) continue;
                std::vector<std::size_t> simplex{v0};
                auto cur = base;
                for (int j = 1; j <= k; ++j) {
                    for (int i = 0; i < n; ++i)
                        if (label[static_cast<std::size_t>(i)] == j) cur[static_cast<std::size_t>(i)] += 1;
                    simplex.push_back(vertex_id(cur));
                }
                out.push_back(std::move(simplex));
            }
        }
    }

    static std::vector<std::vector<Incidence>> boundary_of(const std::vector<std::vector<std::size_t>>& cells,
                                                          const std::unordered_map<std::uint64_t, std::size_t>& faces) {
        std::vector<std::vector<Incidence>> out;
        out.reserve(cells.size());
        for (const auto& s : cells) {
            std::vector<Incidence> b;
            for (std::size_t omit = 0; omit < s.size(); ++omit) {
                std::vector<std::size_t> f;
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != omit) f.push_back(s[j]);
                b.push_back({faces.at(key(f)), omit % 2 == 0 ? 1 : -1});
            }
            out.push_back(std::move(b));
        }
        return out;
    }

    GridSpec spec_;
    std::vector<std::size_t> stride_;
    std::size_t vertex_count_ = 0;
    std::vector<std::vector<std::size_t>> edges_, triangles_, tets_;
    std::unordered_map<std::uint64_t, std::size_t> edge_index_, triangle_index_;
    std::vector<std::vector<Incidence>> boundary2_, boundary3_;
    std::vector<double> triangle_area_, tet_volume_;
};

}  // namespace holosurf::norms
