#pragma once

// Test-only auxiliary FEM oracle: a fitted P1 discretization of one cut
// element, refined uniformly, used to realize genuinely virtual functions
// (harmonic extensions / local curl solutions) and check the projections'
// orthogonality relations against them.

#include <map>
#include <utility>
#include <vector>

#include "ivem/assembly.hpp"
#include "ivem/cut_topology.hpp"
#include "ivem/ife_local.hpp"
#include "ivem/projection.hpp"

namespace ivem::testing {

struct FittedMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> region;  // +1 / -1 per triangle
    std::vector<std::array<int, 2>> boundary_edges;  // fine edges on the element boundary
};

inline FittedMesh build_fitted(const CutTopology& cut, int depth) {
    FittedMesh fm;
    std::map<std::pair<double, double>, int> index;
    auto add_vertex = [&](const Vec2& p) {
        auto key = std::make_pair(p.x, p.y);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(fm.vertices.size());
        fm.vertices.push_back(p);
        index.emplace(key, id);
        return id;
    };

    for (int region : {1, -1}) {
        const Polygon& poly = region > 0 ? cut.sub_plus : cut.sub_minus;
        for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
            fm.triangles.push_back(
                {add_vertex(poly[0]), add_vertex(poly[i]), add_vertex(poly[i + 1])});
            fm.region.push_back(region);
        }
    }

    for (int d = 0; d < depth; ++d) {
        std::vector<std::array<int, 3>> tris;
        std::vector<int> regs;
        for (std::size_t t = 0; t < fm.triangles.size(); ++t) {
            auto [a, b, c] = fm.triangles[t];
            int ab = add_vertex(0.5 * (fm.vertices[a] + fm.vertices[b]));
            int bc = add_vertex(0.5 * (fm.vertices[b] + fm.vertices[c]));
            int ca = add_vertex(0.5 * (fm.vertices[c] + fm.vertices[a]));
            tris.push_back({a, ab, ca});
            tris.push_back({ab, b, bc});
            tris.push_back({ca, bc, c});
            tris.push_back({ab, bc, ca});
            for (int k = 0; k < 4; ++k) regs.push_back(fm.region[t]);
        }
        fm.triangles = std::move(tris);
        fm.region = std::move(regs);
    }

    // boundary fine edges: appear in exactly one triangle
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : fm.triangles)
        for (int k = 0; k < 3; ++k) {
            auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
            ++edge_count[key];
        }
    for (const auto& [key, count] : edge_count)
        if (count == 1) fm.boundary_edges.push_back({key.first, key.second});
    return fm;
}

inline std::vector<bool> boundary_vertices(const FittedMesh& fm) {
    std::vector<bool> b(fm.vertices.size(), false);
    for (const auto& e : fm.boundary_edges) {
        b[e[0]] = true;
        b[e[1]] = true;
    }
    return b;
}

/// P1 stiffness triplets with a per-region coefficient.
inline std::vector<Triplet> fitted_stiffness(const FittedMesh& fm, double w_plus,
                                             double w_minus) {
    std::vector<Triplet> ts;
    for (std::size_t t = 0; t < fm.triangles.size(); ++t) {
        const auto& tri = fm.triangles[t];
        P1Element el({fm.vertices[tri[0]], fm.vertices[tri[1]], fm.vertices[tri[2]]});
        double w = fm.region[t] > 0 ? w_plus : w_minus;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                ts.push_back({tri[i], tri[j], w * el.area * dot(el.grad[i], el.grad[j])});
    }
    return ts;
}

/// -div(beta grad u) = 0 with Dirichlet data g on the element boundary.
inline std::vector<double> solve_dirichlet(const FittedMesh& fm, const CoefficientPair& coef,
                                           const std::function<double(const Vec2&)>& g) {
    auto ts = fitted_stiffness(fm, coef.beta_plus, coef.beta_minus);
    std::vector<bool> bdry = boundary_vertices(fm);
    std::vector<double> bvals(fm.vertices.size(), 0.0);
    for (std::size_t v = 0; v < fm.vertices.size(); ++v)
        if (bdry[v]) bvals[v] = g(fm.vertices[v]);
    GlobalSystem sys = GlobalSystem::build(static_cast<int>(fm.vertices.size()), ts,
                                           std::vector<double>(fm.vertices.size(), 0.0),
                                           bdry, bvals);
    return solve_system(sys, 1e-12).dofs;
}

/// -div(beta^{-1} grad phi) = f (per-region constant) with the Neumann flux
/// beta^{-1} dphi/dn = -g on the boundary; one node is pinned, the data must
/// be compatible. Returns the nodal potential.
inline std::vector<double> solve_neumann(const FittedMesh& fm, const CoefficientPair& coef,
                                         double f_plus, double f_minus,
                                         const std::function<double(const Vec2&)>& g) {
    auto ts = fitted_stiffness(fm, 1.0 / coef.beta_plus, 1.0 / coef.beta_minus);
    std::vector<double> load(fm.vertices.size(), 0.0);
    for (std::size_t t = 0; t < fm.triangles.size(); ++t) {
        const auto& tri = fm.triangles[t];
        double area = triangle_area(fm.vertices[tri[0]], fm.vertices[tri[1]],
                                    fm.vertices[tri[2]]);
        double f = fm.region[t] > 0 ? f_plus : f_minus;
        for (int i = 0; i < 3; ++i) load[tri[i]] += f * area / 3.0;
    }
    for (const auto& e : fm.boundary_edges) {
        const Vec2& a = fm.vertices[e[0]];
        const Vec2& b = fm.vertices[e[1]];
        double len = norm(b - a);
        double gm = g(0.5 * (a + b));  // g is constant per pentagon sub-edge
        load[e[0]] -= 0.5 * len * gm;
        load[e[1]] -= 0.5 * len * gm;
    }

    std::vector<bool> pin(fm.vertices.size(), false);
    pin[0] = true;
    GlobalSystem sys = GlobalSystem::build(static_cast<int>(fm.vertices.size()), ts,
                                           std::move(load), pin,
                                           std::vector<double>(fm.vertices.size(), 0.0));
    return solve_system(sys, 1e-12).dofs;
}

/// Per-fine-triangle gradient of a nodal field.
inline std::vector<Vec2> fitted_gradients(const FittedMesh& fm, const std::vector<double>& u) {
    std::vector<Vec2> g(fm.triangles.size());
    for (std::size_t t = 0; t < fm.triangles.size(); ++t) {
        const auto& tri = fm.triangles[t];
        P1Element el({fm.vertices[tri[0]], fm.vertices[tri[1]], fm.vertices[tri[2]]});
        Vec2 s{0.0, 0.0};
        for (int i = 0; i < 3; ++i) s += u[tri[i]] * el.grad[i];
        g[t] = s;
    }
    return g;
}

/// Piecewise-linear hat of pentagon node j, evaluated on the boundary ring.
inline double pentagon_hat(const CutTopology& cut, std::size_t j, const Vec2& x) {
    for (const SubEdge& se : cut.sub_edges) {
        const Vec2& a = cut.nodes[se.a].pos;
        const Vec2& b = cut.nodes[se.b].pos;
        Vec2 d = b - a;
        double t = dot(x - a, d) / dot(d, d);
        if (t < -1e-12 || t > 1.0 + 1e-12) continue;
        if (norm(a + t * d - x) > 1e-10 * se.length) continue;
        if (se.a == static_cast<int>(j)) return 1.0 - t;
        if (se.b == static_cast<int>(j)) return t;
        return 0.0;
    }
    return 0.0;
}

}  // namespace ivem::testing
