#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <vector>

#include "ivem/cut_topology.hpp"
#include "ivem/ife_local.hpp"

namespace ivem {

/// Scalar field with a per-region branch; the branches agree on the interface.
using BranchScalar = std::function<double(const Vec2&, int region)>;
using BranchField = std::function<Vec2(const Vec2&, int region)>;

/// Global numbering of the nodal DoFs: mesh vertices first, then one canonical
/// DoF per cut point (owned by its background edge).
struct NodalDofMap {
    int n_dofs = 0;
    std::vector<int> vertex_dof;              // per mesh vertex
    std::vector<int> cut_dof;                 // per background edge, -1 if uncut
    std::vector<bool> boundary;               // per dof
    std::vector<Vec2> position;               // per dof
    std::vector<int> region;                  // +1/-1 branch at the node, 0 on the interface
    std::vector<std::vector<int>> element_dofs;  // local (N_K order) -> global
};

/// Global numbering of the edge DoFs: one per unsplit background edge, two per
/// split edge (lower-vertex..cut, cut..higher-vertex), all directed along the
/// global lower->higher orientation of the host edge.
struct EdgeDofMap {
    int n_dofs = 0;
    std::vector<std::array<int, 2>> edge_dof;  // per background edge: {whole-or-half0, half1}
    std::vector<bool> boundary;
    std::vector<Vec2> seg_a, seg_b;            // dof segment endpoints, global direction
    std::vector<int> region;                   // side of the sub-edge
    std::vector<std::vector<int>> element_dofs;
    std::vector<std::vector<int>> element_signs;  // ccw traversal vs global direction
};

struct DofMaps {
    NodalDofMap nodal;
    EdgeDofMap edge;
};

inline DofMaps build_dof_maps(const CutMesh& cm) {
    const BackgroundMesh& mesh = cm.mesh;
    DofMaps dm;
    NodalDofMap& nd = dm.nodal;
    EdgeDofMap& ed = dm.edge;

    std::vector<bool> vertex_on_boundary(mesh.n_vertices(), false);
    for (const MeshEdge& e : mesh.edges)
        if (e.on_boundary()) {
            vertex_on_boundary[e.v0] = true;
            vertex_on_boundary[e.v1] = true;
        }

    nd.vertex_dof.resize(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        nd.vertex_dof[v] = nd.n_dofs++;
        nd.position.push_back(mesh.vertices[v]);
        nd.boundary.push_back(vertex_on_boundary[v]);
        nd.region.push_back(detail::sign_of(cm.vertex_phi[v] != 0.0 ? cm.vertex_phi[v] : 1.0));
    }
    nd.cut_dof.assign(mesh.n_edges(), -1);
    ed.edge_dof.assign(mesh.n_edges(), {-1, -1});

    // Only cut edges referenced by an interface element carry extra DoFs; cuts
    // dropped by snapping are not in any element's node ring.
    std::vector<bool> edge_active(mesh.n_edges(), false);
    for (const CutTopology& ct : cm.cuts)
        for (const LocalNode& n : ct.nodes)
            if (n.is_cut()) edge_active[n.host_edge] = true;

    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& me = mesh.edges[e];
        const Vec2& p0 = mesh.vertices[me.v0];
        const Vec2& p1 = mesh.vertices[me.v1];
        if (cm.edge_cuts[e].cut && edge_active[e]) {
            nd.cut_dof[e] = nd.n_dofs++;
            nd.position.push_back(cm.edge_cuts[e].point);
            nd.boundary.push_back(me.on_boundary());
            nd.region.push_back(0);

            int s0 = detail::sign_of(cm.vertex_phi[me.v0]);
            int s1 = detail::sign_of(cm.vertex_phi[me.v1]);
            ed.edge_dof[e][0] = ed.n_dofs++;
            ed.seg_a.push_back(p0);
            ed.seg_b.push_back(cm.edge_cuts[e].point);
            ed.region.push_back(s0);
            ed.boundary.push_back(me.on_boundary());
            ed.edge_dof[e][1] = ed.n_dofs++;
            ed.seg_a.push_back(cm.edge_cuts[e].point);
            ed.seg_b.push_back(p1);
            ed.region.push_back(s1);
            ed.boundary.push_back(me.on_boundary());
        } else {
            ed.edge_dof[e][0] = ed.n_dofs++;
            ed.seg_a.push_back(p0);
            ed.seg_b.push_back(p1);
            ed.region.push_back(detail::sign_of(cm.level_set(0.5 * (p0 + p1))));
            ed.boundary.push_back(me.on_boundary());
        }
    }

    nd.element_dofs.resize(mesh.n_triangles());
    ed.element_dofs.resize(mesh.n_triangles());
    ed.element_signs.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (!cm.is_interface(t)) {
            const auto& tri = mesh.triangles[t];
            for (int k = 0; k < 3; ++k) {
                nd.element_dofs[t].push_back(nd.vertex_dof[tri[k]]);
                int e = mesh.triangle_edges[t][k];
                if (ed.edge_dof[e][1] >= 0)
                    throw std::logic_error(
                        "build_dof_maps: edge " + std::to_string(e) +
                        " is split by a neighbor but whole in element " + std::to_string(t));
                ed.element_dofs[t].push_back(ed.edge_dof[e][0]);
                ed.element_signs[t].push_back(mesh.edges[e].v0 == tri[k] ? 1 : -1);
            }
            continue;
        }
        const CutTopology& ct = cm.cut(t);
        for (const LocalNode& n : ct.nodes) {
            int dof = n.is_cut() ? nd.cut_dof[n.host_edge] : nd.vertex_dof[n.global_vertex];
            if (dof < 0)
                throw std::logic_error("build_dof_maps: dangling cut point on edge " +
                                       std::to_string(n.host_edge));
            nd.element_dofs[t].push_back(dof);
        }
        for (const SubEdge& se : ct.sub_edges) {
            int half = se.half < 0 ? 0 : se.half;
            int dof = ed.edge_dof[se.host_edge][half];
            if (se.half >= 0 && ed.edge_dof[se.host_edge][1] < 0)
                throw std::logic_error("build_dof_maps: split sub-edge on an unsplit edge " +
                                       std::to_string(se.host_edge));
            ed.element_dofs[t].push_back(dof);
            ed.element_signs[t].push_back(se.orient);
        }
    }
    return dm;
}

/// Lagrange interpolation: nodal values of u, branch chosen by the node's side.
inline std::vector<double> interpolate_nodal(const NodalDofMap& nd, const BranchScalar& u) {
    std::vector<double> dofs(nd.n_dofs);
    for (int i = 0; i < nd.n_dofs; ++i) {
        int r = nd.region[i] == 0 ? -1 : nd.region[i];
        dofs[i] = u(nd.position[i], r);
    }
    return dofs;
}

/// Edge interpolation: average tangential component over each (sub-)edge,
/// taken along the global direction of the host edge.
inline std::vector<double> interpolate_edge(const EdgeDofMap& ed, const BranchField& u,
                                            int quad_degree = 9) {
    std::vector<double> dofs(ed.n_dofs);
    for (int i = 0; i < ed.n_dofs; ++i) {
        Vec2 a = ed.seg_a[i], b = ed.seg_b[i];
        double len = norm(b - a);
        if (len == 0.0) {
            dofs[i] = 0.0;
            continue;
        }
        Vec2 t = (b - a) / len;
        int r = ed.region[i];
        QuadratureRule q = edge_quadrature(a, b, quad_degree);
        double circ = q.integrate([&](const Vec2& x) { return dot(u(x, r), t); });
        dofs[i] = circ / len;
    }
    return dofs;
}

/// Weighted-average data that maps an element boundary circulation to the two
/// one-sided curl constants.
struct ElementCurlData {
    double alpha_K = 1.0;
    double factor_plus = 1.0;   // curl+ = factor_plus  * circulation
    double factor_minus = 1.0;  // curl- = factor_minus * circulation

    static ElementCurlData from(const CutTopology& cut, const CoefficientPair& coef) {
        ElementCurlData d;
        d.alpha_K = (cut.area_plus * coef.alpha_minus + cut.area_minus * coef.alpha_plus) /
                    cut.area;
        d.factor_plus = coef.alpha_minus / (cut.area * d.alpha_K);
        d.factor_minus = coef.alpha_plus / (cut.area * d.alpha_K);
        return d;
    }
};

/// Boundary circulation of the local edge DoFs, oriented counterclockwise.
inline double element_circulation(const CutTopology& cut, const std::vector<double>& local_dofs) {
    double circ = 0.0;
    for (std::size_t k = 0; k < cut.sub_edges.size(); ++k)
        circ += cut.sub_edges[k].orient * cut.sub_edges[k].length * local_dofs[k];
    return circ;
}

/// The two one-sided curls of a virtual H(curl) function, straight from its
/// DoFs; alpha+ curl+ = alpha- curl- holds identically.
inline std::pair<double, double> curl_from_dofs(const CutTopology& cut,
                                                const CoefficientPair& coef,
                                                const std::vector<double>& local_dofs) {
    ElementCurlData d = ElementCurlData::from(cut, coef);
    double circ = element_circulation(cut, local_dofs);
    return {d.factor_plus * circ, d.factor_minus * circ};
}

/// Flat text serialization of a DoF vector, one value per line.
inline void dump_dof_vector(const std::vector<double>& v, std::ostream& os) {
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        os << buf;
    }
}

}  // namespace ivem
