#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "holosurf/core/errors.hpp"

namespace holosurf::surfaces {

using Face = std::array<int, 3>;
using EdgeKey = std::pair<int, int>;  ///< (min, max) vertex ids

/// One face using an edge; `forward` is true when the face traverses it as min -> max.
struct EdgeUse {
    int face;
    bool forward;
};

/// Oriented triangle list over vertices 0..vertex_count-1.
class AbstractSurface {
public:
    AbstractSurface() = default;
    AbstractSurface(int vertex_count, std::vector<Face> faces) : n_(vertex_count), faces_(std::move(faces)) {
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            const auto& t = faces_[f];
            for (int v : t)
                if (v < 0 || v >= n_) throw ValidationError("BadFace", "face references a vertex outside 0..vertex_count-1");
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                throw ValidationError("BadFace", "face repeats a vertex");
            for (int k = 0; k < 3; ++k) {
                const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
                edges_[{std::min(a, b), std::max(a, b)}].push_back({static_cast<int>(f), a < b});
            }
        }
    }

    int vertex_count() const noexcept { return n_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }
    std::size_t face_count() const noexcept { return faces_.size(); }
    const std::map<EdgeKey, std::vector<EdgeUse>>& edges() const noexcept { return edges_; }

    /// Faces containing vertex v.
    std::vector<int> star(int v) const {
        std::vector<int> out;
        for (std::size_t f = 0; f < faces_.size(); ++f)
            if (std::find(faces_[f].begin(), faces_[f].end(), v) != faces_[f].end()) out.push_back(static_cast<int>(f));
        return out;
    }

    /// Same triangles with every orientation flipped.
    AbstractSurface reversed() const {
        auto f = faces_;
        for (auto& t : f) std::swap(t[1], t[2]);
        return {n_, std::move(f)};
    }

private:
    int n_ = 0;
    std::vector<Face> faces_;
    std::map<EdgeKey, std::vector<EdgeUse>> edges_;
};

struct ComponentInfo {
    std::vector<int> faces;
    int vertices = 0, edges = 0, boundary_edges = 0, boundary_loops = 0;
    int euler_characteristic = 0;
    int genus = 0;  ///< from chi = 2 - 2g - b
};

struct SurfaceDiagnostic {
    bool ok = true;
    bool closed = true;
    std::vector<std::pair<EdgeKey, std::string>> bad_edges;  ///< edge and reason
    std::vector<std::pair<int, std::string>> bad_vertices;
    int euler_characteristic = 0;
    std::vector<ComponentInfo> components;
};

namespace detail {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[static_cast<std::size_t>(x)] != x) x = p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
        return x;
    }
    void unite(int a, int b) { p[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace detail

/// Link of vertex v as a list of edges between its neighbours (one per incident face).
inline std::vector<std::pair<int, int>> vertex_link(const AbstractSurface& s, int v) {
    std::vector<std::pair<int, int>> out;
    for (int f : s.star(v)) {
        const auto& t = s.faces()[static_cast<std::size_t>(f)];
        int k = 0;
        while (t[static_cast<std::size_t>(k)] != v) ++k;
        out.push_back({t[static_cast<std::size_t>((k + 1) % 3)], t[static_cast<std::size_t>((k + 2) % 3)]});
    }
    return out;
}

/// Connected components of a link (as an undirected graph on the neighbour ids).
inline int link_components(const std::vector<std::pair<int, int>>& link) {
    std::map<int, int> id;
    for (auto [a, b] : link) {
        id.emplace(a, static_cast<int>(id.size()));
        id.emplace(b, static_cast<int>(id.size()));
    }
    detail::UnionFind uf(static_cast<int>(id.size()));
    for (auto [a, b] : link) uf.unite(id[a], id[b]);
    int c = 0;
    for (int i = 0; i < static_cast<int>(id.size()); ++i)
        if (uf.find(i) == i) ++c;
    return c;
}

/// Closed/oriented/manifold check. With `boundary_ok`, edges used once are allowed and boundary
/// vertex links may be single paths instead of cycles.
inline SurfaceDiagnostic check_surface(const AbstractSurface& s, bool boundary_ok = false) {
    SurfaceDiagnostic d;
    std::vector<char> on_boundary(static_cast<std::size_t>(s.vertex_count()), 0);
    for (const auto& [e, uses] : s.edges()) {
        if (uses.size() == 1) {
            d.closed = false;
            on_boundary[static_cast<std::size_t>(e.first)] = on_boundary[static_cast<std::size_t>(e.second)] = 1;
            if (!boundary_ok) d.bad_edges.push_back({e, "used by one face"});
        } else if (uses.size() > 2) {
            d.bad_edges.push_back({e, "used by " + std::to_string(uses.size()) + " faces"});
        } else if (uses[0].forward == uses[1].forward) {
            d.bad_edges.push_back({e, "both faces induce the same orientation"});
        }
    }
    for (int v = 0; v < s.vertex_count(); ++v) {
        const auto link = vertex_link(s, v);
        if (link.empty()) continue;  // isolated vertex ids are ignored
        std::map<int, int> deg;
        for (auto [a, b] : link) {
            ++deg[a];
            ++deg[b];
        }
        const int comps = link_components(link);
        int odd = 0;
        bool high = false;
        for (auto [u, k] : deg) {
            if (k % 2) ++odd;
            if (k > 2) high = true;
        }
        if (comps > 1) d.bad_vertices.push_back({v, "link has " + std::to_string(comps) + " components"});
        else if (high) d.bad_vertices.push_back({v, "link is not a simple cycle or path"});
        else if (odd != 0 && !(boundary_ok && on_boundary[static_cast<std::size_t>(v)] && odd == 2))
            d.bad_vertices.push_back({v, "link is an open path"});
    }
    d.ok = d.bad_edges.empty() && d.bad_vertices.empty();

    // Components by union-find over faces sharing an edge.
    const int nf = static_cast<int>(s.face_count());
    detail::UnionFind uf(nf);
    for (const auto& [e, uses] : s.edges())
        for (std::size_t i = 1; i < uses.size(); ++i) uf.unite(uses[0].face, uses[i].face);
    std::map<int, std::size_t> comp_of;
    for (int f = 0; f < nf; ++f) {
        auto [it, fresh] = comp_of.emplace(uf.find(f), d.components.size());
        if (fresh) d.components.emplace_back();
        d.components[it->second].faces.push_back(f);
    }
    for (auto& c : d.components) {
        std::vector<int> verts;
        std::map<EdgeKey, int> edge_count;
        for (int f : c.faces) {
            const auto& t = s.faces()[static_cast<std::size_t>(f)];
            verts.insert(verts.end(), t.begin(), t.end());
            for (int k = 0; k < 3; ++k) {
                int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        c.vertices = static_cast<int>(verts.size());
        c.edges = static_cast<int>(edge_count.size());
        // Boundary loops: components of the graph of boundary edges.
        std::vector<std::pair<int, int>> bedges;
        for (auto [e, k] : edge_count)
            if (k == 1) bedges.push_back(e);
        c.boundary_edges = static_cast<int>(bedges.size());
        c.boundary_loops = bedges.empty() ? 0 : link_components(bedges);
        c.euler_characteristic = c.vertices - c.edges + static_cast<int>(c.faces.size());
        c.genus = (2 - c.boundary_loops - c.euler_characteristic) / 2;
        d.euler_characteristic += c.euler_characteristic;
    }
    return d;
}

}  // namespace holosurf::surfaces
