#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivem/level_set.hpp"
#include "ivem/mesh.hpp"

namespace ivem {

/// The interface violates the two-cuts-on-two-edges mesh assumption.
struct assumption_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ElementLabel { Minus, Plus, Interface };

/// Relative parameter tolerance of the cut-point bisection.
inline constexpr double kRootTol = 1e-13;
/// Cut points closer than this (relative to edge length) to a vertex are snapped.
inline constexpr double kSnapTol = 1e-10;

/// Canonical cut record of one background edge, parameterized along v0 -> v1.
struct EdgeCut {
    bool cut = false;
    double t = 0.0;
    Vec2 point{};
};

struct LocalNode {
    Vec2 pos{};
    int global_vertex = -1;  // set for triangle vertices
    int host_edge = -1;      // set for cut points

    bool is_cut() const { return host_edge >= 0; }
};

/// One piece of the element boundary, between consecutive members of the local
/// node ring. `a -> b` follows the counterclockwise traversal of the boundary.
struct SubEdge {
    int a = -1, b = -1;   // local node indices
    int host_edge = -1;   // background edge
    int half = -1;        // -1 whole edge, 0 lower-vertex..cut, 1 cut..higher-vertex
    int region = 0;       // +1 / -1, side of the approximate interface
    int orient = 0;       // +1 if a->b matches the global (lower->higher) direction
    double length = 0.0;
};

struct CutTopology {
    int element = -1;
    LocalNode cut_nodes[2];        // b1, b2 with host edges
    Vec2 x_m{};                    // midpoint of the interface segment b1-b2
    Vec2 n_bar{}, t_bar{};         // unit normal (minus -> plus) and its ccw rotation
    Polygon sub_plus, sub_minus;   // convex, counterclockwise
    double area_plus = 0.0, area_minus = 0.0;
    double area = 0.0;             // |K|
    double h_K = 0.0;              // triangle diameter
    std::vector<LocalNode> nodes;  // N_K, counterclockwise boundary ring
    std::vector<SubEdge> sub_edges;  // E_K, same traversal order

    double gamma_length() const { return norm(cut_nodes[1].pos - cut_nodes[0].pos); }

    /// +1 / -1 by containment in the plus / minus sub-polygon.
    int region_of(const Vec2& x) const {
        double dplus = dot(x - x_m, n_bar);
        return dplus >= 0.0 ? 1 : -1;
    }
};

namespace detail {

inline int sign_of(double v) { return v < 0.0 ? -1 : 1; }

inline double bisect_edge(const LevelSetInterface& ls, const Vec2& p0, const Vec2& p1,
                          double f0, double f1) {
    if (f0 == 0.0) return 0.0;
    if (f1 == 0.0) return 1.0;
    if ((f0 < 0.0) == (f1 < 0.0))
        throw geometry_error("bisect_edge: endpoints do not bracket a root");
    double a = 0.0, b = 1.0, fa = f0;
    while (b - a > kRootTol) {
        double m = 0.5 * (a + b);
        double fm = ls(p0 + m * (p1 - p0));
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Detect a sign flip in the open interior of an edge whose endpoints agree in
/// sign; such a double crossing violates the mesh assumption.
inline bool interior_sign_flip(const LevelSetInterface& ls, const Vec2& p0, const Vec2& p1,
                               int end_sign, int samples = 16) {
    for (int i = 1; i < samples; ++i) {
        double t = static_cast<double>(i) / samples;
        if (sign_of(ls(p0 + t * (p1 - p0))) != end_sign) return true;
    }
    return false;
}

}  // namespace detail

/// Background mesh + interface classification + per-element cut topology.
/// Cut points are computed once per background edge and shared, so neighboring
/// elements see bit-identical coordinates.
struct CutMesh {
    BackgroundMesh mesh;
    LevelSetInterface level_set;
    std::vector<double> vertex_phi;
    std::vector<ElementLabel> labels;
    std::vector<EdgeCut> edge_cuts;   // canonical per-edge cache
    std::vector<int> cut_index;       // per triangle, -1 if uncut
    std::vector<CutTopology> cuts;

    bool is_interface(int t) const { return labels[t] == ElementLabel::Interface; }

    /// +1 / -1 for non-interface elements.
    int side(int t) const {
        if (is_interface(t)) throw std::logic_error("side: interface element");
        return labels[t] == ElementLabel::Plus ? 1 : -1;
    }

    const CutTopology& cut(int t) const {
        int c = cut_index[t];
        if (c < 0) throw std::logic_error("cut: element is not an interface element");
        return cuts[c];
    }
};

namespace detail {

inline CutTopology make_cut_topology(const BackgroundMesh& mesh, int t,
                                     const LevelSetInterface& ls,
                                     const std::vector<EdgeCut>& edge_cuts) {
    const auto& tri = mesh.triangles[t];
    CutTopology ct;
    ct.element = t;
    ct.area = mesh.triangle_area(t);

    // Walk the boundary counterclockwise, inserting cached cut points.
    std::vector<int> cut_positions;
    for (int k = 0; k < 3; ++k) {
        int va = tri[k];
        LocalNode vn;
        vn.pos = mesh.vertices[va];
        vn.global_vertex = va;
        ct.nodes.push_back(vn);

        int e = mesh.triangle_edges[t][k];
        const EdgeCut& ec = edge_cuts[e];
        if (ec.cut) {
            LocalNode cn;
            cn.pos = ec.point;
            cn.host_edge = e;
            cut_positions.push_back(static_cast<int>(ct.nodes.size()));
            ct.nodes.push_back(cn);
        }
    }
    if (cut_positions.size() != 2)
        throw assumption_violation("triangle " + std::to_string(t) + ": expected 2 cut points, found " +
                                   std::to_string(cut_positions.size()));

    const int n = static_cast<int>(ct.nodes.size());
    const int p = cut_positions[0], q = cut_positions[1];
    ct.cut_nodes[0] = ct.nodes[p];
    ct.cut_nodes[1] = ct.nodes[q];
    ct.x_m = 0.5 * (ct.cut_nodes[0].pos + ct.cut_nodes[1].pos);

    // The two boundary chains between the cut points; each closes to a convex
    // counterclockwise polygon through the interface segment. Region signs
    // come from the chain vertices (a near-vertex cut can place a sub-polygon
    // centroid inside the chord-arc mismatch lens, so centroid signs are not
    // reliable there).
    Polygon chain_a, chain_b;
    int sign_a = 0, sign_b = 0;
    for (int i = p; i != (q + 1) % n; i = (i + 1) % n) {
        chain_a.push_back(ct.nodes[i].pos);
        if (!ct.nodes[i].is_cut()) {
            int s = sign_of(ls(ct.nodes[i].pos));
            if (sign_a != 0 && s != sign_a)
                throw geometry_error("triangle " + std::to_string(t) +
                                     ": inconsistent vertex signs in one sub-polygon");
            sign_a = s;
        }
    }
    for (int i = q; i != (p + 1) % n; i = (i + 1) % n) {
        chain_b.push_back(ct.nodes[i].pos);
        if (!ct.nodes[i].is_cut()) {
            int s = sign_of(ls(ct.nodes[i].pos));
            if (sign_b != 0 && s != sign_b)
                throw geometry_error("triangle " + std::to_string(t) +
                                     ": inconsistent vertex signs in one sub-polygon");
            sign_b = s;
        }
    }
    if (sign_a == 0 || sign_b == 0 || sign_a == sign_b)
        throw geometry_error("triangle " + std::to_string(t) +
                             ": sub-polygons do not straddle the interface");
    bool a_is_plus = sign_a > 0;
    ct.sub_plus = a_is_plus ? chain_a : chain_b;
    ct.sub_minus = a_is_plus ? chain_b : chain_a;
    ct.area_plus = signed_area(ct.sub_plus);
    ct.area_minus = signed_area(ct.sub_minus);
    if (ct.area_plus <= 0.0 || ct.area_minus <= 0.0)
        throw geometry_error("triangle " + std::to_string(t) + ": non-positive sub-polygon area");
    if (std::abs(ct.area_plus + ct.area_minus - ct.area) > 1e-12 * ct.area)
        throw geometry_error("triangle " + std::to_string(t) + ": sub-polygon areas do not sum to |K|");

    Vec2 seg = ct.cut_nodes[1].pos - ct.cut_nodes[0].pos;
    ct.n_bar = normalized(rot90ccw(seg));
    if (dot(ct.n_bar, centroid(ct.sub_plus) - centroid(ct.sub_minus)) < 0.0)
        ct.n_bar = -ct.n_bar;
    ct.t_bar = rot90ccw(ct.n_bar);

    ct.h_K = diameter({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]});

    // Region tagging per chain membership: positions strictly between p and q
    // (cyclically) belong to chain_a, the rest to chain_b.
    auto in_chain_a = [&](int i, int j) {
        // sub-edge (i, j) lies in chain_a iff both ends lie in [p, q]
        auto pos_in = [&](int i2) {
            int d = (i2 - p + n) % n;
            return d <= (q - p + n) % n;
        };
        return pos_in(i) && pos_in(j);
    };

    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        SubEdge se;
        se.a = i;
        se.b = j;
        const LocalNode& na = ct.nodes[i];
        const LocalNode& nb = ct.nodes[j];
        se.length = norm(nb.pos - na.pos);
        int chain_sign = a_is_plus ? 1 : -1;
        se.region = in_chain_a(i, j) ? chain_sign : -chain_sign;
        if (na.is_cut() || nb.is_cut()) {
            se.host_edge = na.is_cut() ? na.host_edge : nb.host_edge;
            const MeshEdge& he = mesh.edges[se.host_edge];
            // a->b runs lower->higher iff the vertex end is v0 (before the cut)
            // or v1 (after the cut)
            if (na.is_cut() && nb.is_cut())
                throw geometry_error("triangle " + std::to_string(t) +
                                     ": two cut points on one edge");
            int vert = na.is_cut() ? nb.global_vertex : na.global_vertex;
            bool vert_is_lower = (vert == he.v0);
            se.half = vert_is_lower ? 0 : 1;
            se.orient = (na.is_cut() == vert_is_lower) ? -1 : 1;
        } else {
            int e = -1;
            for (int k = 0; k < 3; ++k) {
                int ea = tri[k], eb = tri[(k + 1) % 3];
                if ((ea == na.global_vertex && eb == nb.global_vertex) ||
                    (eb == na.global_vertex && ea == nb.global_vertex))
                    e = mesh.triangle_edges[t][k];
            }
            se.host_edge = e;
            se.half = -1;
            se.orient = (mesh.edges[e].v0 == na.global_vertex) ? 1 : -1;
        }
        ct.sub_edges.push_back(se);
    }
    return ct;
}

}  // namespace detail

/// Classify every triangle by the vertex signs of phi. Under the mesh
/// assumption a triangle is an interface element iff phi changes sign strictly
/// across one of its vertex pairs. Hidden double crossings (an edge whose
/// endpoints agree in sign but whose interior does not) are rejected.
inline std::vector<ElementLabel> classify_elements(const BackgroundMesh& mesh,
                                                   const LevelSetInterface& ls) {
    std::vector<double> phi(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) phi[v] = ls(mesh.vertices[v]);

    std::vector<ElementLabel> labels(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        bool change = false;
        for (int k = 0; k < 3; ++k) {
            double fa = phi[tri[k]], fb = phi[tri[(k + 1) % 3]];
            if (fa * fb < 0.0) change = true;
            if (fa * fb >= 0.0 && (fa != 0.0 || fb != 0.0)) {
                int s = detail::sign_of(fa != 0.0 ? fa : fb);
                if (detail::interior_sign_flip(ls, mesh.vertices[tri[k]],
                                               mesh.vertices[tri[(k + 1) % 3]], s))
                    throw assumption_violation(
                        "triangle " + std::to_string(t) +
                        ": interface crosses one edge twice (assumption violated)");
            }
        }
        if (change)
            labels[t] = ElementLabel::Interface;
        else
            labels[t] = ls(mesh.triangle_centroid(t)) > 0.0 ? ElementLabel::Plus
                                                            : ElementLabel::Minus;
    }
    return labels;
}

/// Populate the canonical per-edge cut cache. Roots are bisected along the
/// global lower->higher direction once per edge; near-vertex roots are snapped
/// away (the owning elements get reclassified instead).
inline std::vector<EdgeCut> compute_edge_cuts(const BackgroundMesh& mesh,
                                              const LevelSetInterface& ls,
                                              const std::vector<double>& vertex_phi) {
    std::vector<EdgeCut> cuts(mesh.n_edges());
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const MeshEdge& me = mesh.edges[e];
        double f0 = vertex_phi[me.v0], f1 = vertex_phi[me.v1];
        if (f0 * f1 >= 0.0) continue;
        const Vec2& p0 = mesh.vertices[me.v0];
        const Vec2& p1 = mesh.vertices[me.v1];
        double t = detail::bisect_edge(ls, p0, p1, f0, f1);
        if (t < kSnapTol || t > 1.0 - kSnapTol) continue;  // snapped to a vertex
        cuts[e] = {true, t, p0 + t * (p1 - p0)};
    }
    return cuts;
}

/// Full geometry pipeline: classification, canonical cuts, snap-driven
/// reclassification, per-element cut topology.
inline CutMesh build_cut_mesh(BackgroundMesh mesh, LevelSetInterface ls) {
    CutMesh cm;
    cm.mesh = std::move(mesh);
    cm.level_set = std::move(ls);
    cm.vertex_phi.resize(cm.mesh.n_vertices());
    for (int v = 0; v < cm.mesh.n_vertices(); ++v)
        cm.vertex_phi[v] = cm.level_set(cm.mesh.vertices[v]);
    cm.labels = classify_elements(cm.mesh, cm.level_set);
    cm.edge_cuts = compute_edge_cuts(cm.mesh, cm.level_set, cm.vertex_phi);

    cm.cut_index.assign(cm.mesh.n_triangles(), -1);
    for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
        if (cm.labels[t] != ElementLabel::Interface) continue;
        int ncut = 0;
        for (int k = 0; k < 3; ++k)
            if (cm.edge_cuts[cm.mesh.triangle_edges[t][k]].cut) ++ncut;
        if (ncut < 2) {
            // a cut point snapped onto a vertex: treat as uncut
            cm.labels[t] = cm.level_set(cm.mesh.triangle_centroid(t)) > 0.0
                               ? ElementLabel::Plus
                               : ElementLabel::Minus;
            continue;
        }
        if (ncut > 2)
            throw assumption_violation("triangle " + std::to_string(t) +
                                       ": more than two cut edges");
        cm.cut_index[t] = static_cast<int>(cm.cuts.size());
        cm.cuts.push_back(detail::make_cut_topology(cm.mesh, t, cm.level_set, cm.edge_cuts));
    }
    return cm;
}

/// Standalone cut computation for one interface triangle.
inline CutTopology compute_cut(const BackgroundMesh& mesh, int t, const LevelSetInterface& ls) {
    std::vector<double> phi(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) phi[v] = ls(mesh.vertices[v]);
    auto edge_cuts = compute_edge_cuts(mesh, ls, phi);
    return detail::make_cut_topology(mesh, t, ls, edge_cuts);
}

/// Plain-text mesh dump: `v x y`, `t i j k`, and `cut t bx1 by1 bx2 by2` lines.
inline void dump_mesh(const CutMesh& cm, std::ostream& os) {
    char buf[160];
    for (const Vec2& v : cm.mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    for (const auto& t : cm.mesh.triangles) {
        std::snprintf(buf, sizeof buf, "t %d %d %d\n", t[0], t[1], t[2]);
        os << buf;
    }
    for (const CutTopology& ct : cm.cuts) {
        std::snprintf(buf, sizeof buf, "cut %d %.17g %.17g %.17g %.17g\n", ct.element,
                      ct.cut_nodes[0].pos.x, ct.cut_nodes[0].pos.y, ct.cut_nodes[1].pos.x,
                      ct.cut_nodes[1].pos.y);
        os << buf;
    }
}

}  // namespace ivem
