#pragma once

#include <vector>

#include "ivem/assembly.hpp"
#include "ivem/dof_map.hpp"
#include "ivem/projection.hpp"

namespace ivem {

enum class StabilizationVariant { O1, SqrtH };

struct LocalSystemCurl {
    int element = -1;
    std::vector<std::vector<double>> A;
    std::vector<double> load;
};

struct CurlOperators {
    std::vector<CurlProjectionOperator> ops;

    static CurlOperators build(const CutMesh& cm, const CoefficientPair& coef) {
        CurlOperators all;
        all.ops.resize(cm.mesh.n_triangles());
        for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
            if (cm.is_interface(t)) {
                all.ops[t] = build_curl_projection(cm.cut(t), coef);
            } else {
                all.ops[t].element = t;
                all.ops[t].identity = true;
            }
        }
        return all;
    }
};

inline Nd0Element make_nd0_element(const CutMesh& cm, const DofMaps& dm, int t) {
    const auto& tri = cm.mesh.triangles[t];
    const auto& signs = dm.edge.element_signs[t];
    return Nd0Element({cm.mesh.vertices[tri[0]], cm.mesh.vertices[tri[1]],
                       cm.mesh.vertices[tri[2]]},
                      {signs[0], signs[1], signs[2]});
}

/// Interface-element matrix: exact curl-curl from the DoF circulation, the
/// projected beta-mass term, and the tangential-trace stabilization. All three
/// pieces integrate piecewise constants, so no quadrature is involved.
inline LocalSystemCurl local_curl_matrix(const CutTopology& cut, const CoefficientPair& coef,
                                         const CurlProjectionOperator& op,
                                         StabilizationVariant variant = StabilizationVariant::O1) {
    const std::size_t N = cut.sub_edges.size();
    LocalSystemCurl ls;
    ls.element = cut.element;
    ls.A.assign(N, std::vector<double>(N, 0.0));
    ls.load.assign(N, 0.0);

    const ElementCurlData& cd = op.curl_data;
    double curl_scale = coef.alpha_plus * cut.area_plus * cd.factor_plus * cd.factor_plus +
                        coef.alpha_minus * cut.area_minus * cd.factor_minus * cd.factor_minus;
    std::vector<double> circ(N);
    for (std::size_t i = 0; i < N; ++i)
        circ[i] = cut.sub_edges[i].orient * cut.sub_edges[i].length;

    SymMat2 G = detail::beta_gradient_gram(cut, coef, op.M);

    // tangential component of each projected basis along each sub-edge
    // (traversal direction; the stabilization product is direction-free)
    std::vector<std::vector<double>> proj_t(N, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i) {
        Vec2 vm = op.coef_col[i];
        Vec2 vp = op.M.apply(vm);
        for (std::size_t e = 0; e < N; ++e) {
            const SubEdge& se = cut.sub_edges[e];
            Vec2 tau = (cut.nodes[se.b].pos - cut.nodes[se.a].pos) / se.length;
            proj_t[i][e] = dot(se.region > 0 ? vp : vm, tau);
        }
    }

    double stab_weight = variant == StabilizationVariant::SqrtH ? std::sqrt(cut.h_K) : 1.0;
    for (std::size_t i = 0; i < N; ++i) {
        Vec2 Gai = G.apply(op.coef_col[i]);
        for (std::size_t j = i; j < N; ++j) {
            double a = curl_scale * circ[i] * circ[j];
            a += dot(Gai, op.coef_col[j]);
            for (std::size_t e = 0; e < N; ++e) {
                const SubEdge& se = cut.sub_edges[e];
                double di = (e == i ? se.orient : 0.0) - proj_t[i][e];
                double dj = (e == j ? se.orient : 0.0) - proj_t[j][e];
                a += stab_weight * coef.beta(se.region) * se.length * di * dj;
            }
            ls.A[i][j] = a;
            ls.A[j][i] = a;
        }
    }
    return ls;
}

inline void local_curl_load(const CutTopology& cut, const CoefficientPair& coef,
                            const BranchField& f, const CurlProjectionOperator& op,
                            LocalSystemCurl& ls, int degree = 4) {
    const std::size_t N = cut.sub_edges.size();
    ls.load.assign(N, 0.0);
    (void)coef;
    for (int region : {1, -1}) {
        const Polygon& poly = region > 0 ? cut.sub_plus : cut.sub_minus;
        QuadratureRule q = polygon_quadrature(poly, degree);
        Vec2 f_int{0.0, 0.0};
        for (std::size_t k = 0; k < q.points.size(); ++k)
            f_int += q.weights[k] * f(q.points[k], region);
        for (std::size_t i = 0; i < N; ++i) {
            Vec2 vi = region > 0 ? op.M.apply(op.coef_col[i]) : op.coef_col[i];
            ls.load[i] += dot(f_int, vi);
        }
    }
}

inline LocalSystemCurl local_curl_noninterface(const CutMesh& cm, const DofMaps& dm, int t,
                                               const CoefficientPair& coef,
                                               const BranchField& f, int degree = 4) {
    Nd0Element el = make_nd0_element(cm, dm, t);
    int side = cm.side(t);
    LocalSystemCurl ls;
    ls.element = t;
    auto C = nd0_curl_curl(el, coef.alpha(side));
    auto Mm = nd0_mass(el, coef.beta(side));
    ls.A.assign(3, std::vector<double>(3, 0.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ls.A[i][j] = C[i][j] + Mm[i][j];
    ls.load.assign(3, 0.0);
    if (f) {
        QuadratureRule q = triangle_quadrature(el.p1.p[0], el.p1.p[1], el.p1.p[2], degree);
        for (std::size_t k = 0; k < q.points.size(); ++k)
            for (int i = 0; i < 3; ++i)
                ls.load[i] += q.weights[k] * dot(f(q.points[k], side), el.basis(i, q.points[k]));
    }
    return ls;
}

inline GlobalSystem assemble_hcurl(const CutMesh& cm, const DofMaps& dm,
                                   const CoefficientPair& coef, const BranchField& f,
                                   const BranchField& tangential_data,
                                   const CurlOperators& ops,
                                   StabilizationVariant variant = StabilizationVariant::O1,
                                   int quad_degree = 4, int edge_degree = 9) {
    const EdgeDofMap& ed = dm.edge;
    std::vector<Triplet> triplets;
    std::vector<double> load(ed.n_dofs, 0.0);

    for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
        LocalSystemCurl ls;
        if (cm.is_interface(t)) {
            ls = local_curl_matrix(cm.cut(t), coef, ops.ops[t], variant);
            if (f) local_curl_load(cm.cut(t), coef, f, ops.ops[t], ls, quad_degree);
        } else {
            ls = local_curl_noninterface(cm, dm, t, coef, f, quad_degree);
        }
        const auto& gdofs = ed.element_dofs[t];
        for (std::size_t i = 0; i < gdofs.size(); ++i) {
            load[gdofs[i]] += ls.load[i];
            for (std::size_t j = 0; j < gdofs.size(); ++j)
                triplets.push_back({gdofs[i], gdofs[j], ls.A[i][j]});
        }
    }

    // inhomogeneous tangential data by edge-average substitution
    std::vector<double> bvals(ed.n_dofs, 0.0);
    if (tangential_data)
        for (int i = 0; i < ed.n_dofs; ++i)
            if (ed.boundary[i]) {
                Vec2 a = ed.seg_a[i], b = ed.seg_b[i];
                double len = norm(b - a);
                Vec2 tau = (b - a) / len;
                QuadratureRule q = edge_quadrature(a, b, edge_degree);
                double circ = q.integrate(
                    [&](const Vec2& x) { return dot(tangential_data(x, ed.region[i]), tau); });
                bvals[i] = circ / len;
            }
    return GlobalSystem::build(ed.n_dofs, triplets, std::move(load), ed.boundary,
                               std::move(bvals));
}

inline SchemeSolution assemble_and_solve_curl(const CutMesh& cm, const DofMaps& dm,
                                              const CoefficientPair& coef, const BranchField& f,
                                              const BranchField& tangential_data,
                                              const CurlOperators& ops,
                                              StabilizationVariant variant = StabilizationVariant::O1,
                                              double tol = 1e-10, bool use_dense = false) {
    GlobalSystem g = assemble_hcurl(cm, dm, coef, f, tangential_data, ops, variant);
    return solve_system(g, tol, use_dense);
}

}  // namespace ivem
