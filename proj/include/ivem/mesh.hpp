#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "ivem/geometry.hpp"

namespace ivem {

struct Rect {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
};

/// One deduplicated mesh edge, directed from the lower to the higher vertex index.
struct MeshEdge {
    int v0 = -1;           // v0 < v1
    int v1 = -1;
    int tri[2] = {-1, -1}; // adjacent triangles; tri[1] == -1 on the boundary

    bool on_boundary() const { return tri[1] < 0; }
};

struct BackgroundMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;       // counterclockwise vertex indices
    std::vector<MeshEdge> edges;
    std::vector<std::array<int, 3>> triangle_edges;  // edge index of (v0v1, v1v2, v2v0)
    double h = 0.0;                                  // max triangle diameter

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    Vec2 triangle_centroid(int t) const {
        const auto& tri = triangles[t];
        return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
    }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        return ivem::triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }

    void build_edges() {
        edges.clear();
        triangle_edges.assign(triangles.size(), {-1, -1, -1});
        std::map<std::pair<int, int>, int> index;
        for (int t = 0; t < n_triangles(); ++t) {
            const auto& tri = triangles[t];
            for (int k = 0; k < 3; ++k) {
                int a = tri[k], b = tri[(k + 1) % 3];
                auto key = std::minmax(a, b);
                auto it = index.find(key);
                if (it == index.end()) {
                    MeshEdge e;
                    e.v0 = key.first;
                    e.v1 = key.second;
                    e.tri[0] = t;
                    index.emplace(key, n_edges());
                    triangle_edges[t][k] = n_edges();
                    edges.push_back(e);
                } else {
                    MeshEdge& e = edges[it->second];
                    if (e.tri[1] >= 0)
                        throw std::runtime_error("build_edges: edge shared by >2 triangles");
                    e.tri[1] = t;
                    triangle_edges[t][k] = it->second;
                }
            }
        }
    }
};

/// Uniform right-triangle split of an n-by-n grid over `domain`.
/// h is the diagonal length; every triangle is counterclockwise.
inline BackgroundMesh build_uniform_mesh(const Rect& domain, int n) {
    if (n < 2) throw std::invalid_argument("build_uniform_mesh: n must be >= 2");
    BackgroundMesh m;
    double dx = (domain.hi.x - domain.lo.x) / n;
    double dy = (domain.hi.y - domain.lo.y) / n;
    if (dx <= 0.0 || dy <= 0.0)
        throw std::invalid_argument("build_uniform_mesh: empty domain");
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({domain.lo.x + i * dx, domain.lo.y + j * dy});
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j);
            int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    m.build_edges();
    m.h = std::sqrt(dx * dx + dy * dy);
    return m;
}

}  // namespace ivem
