#pragma once

#include <vector>

#include "ivem/assembly.hpp"
#include "ivem/dof_map.hpp"
#include "ivem/projection.hpp"

namespace ivem {

struct LocalSystemH1 {
    int element = -1;
    std::vector<std::vector<double>> A;
    std::vector<double> load;
};

/// Per-element projection operators; identity on non-interface elements.
struct H1Operators {
    std::vector<H1ProjectionOperator> ops;  // per element

    static H1Operators build(const CutMesh& cm, const CoefficientPair& coef) {
        H1Operators all;
        all.ops.resize(cm.mesh.n_triangles());
        for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
            if (cm.is_interface(t)) {
                all.ops[t] = build_h1_projection(cm.cut(t), coef);
            } else {
                all.ops[t].element = t;
                all.ops[t].identity = true;
            }
        }
        return all;
    }
};

/// Nodal values of the projections of the local virtual basis; rows are basis
/// functions, columns the element nodes. Used by the stabilization term.
inline std::vector<std::vector<double>> projected_node_values(const CutTopology& cut,
                                                              const H1ProjectionOperator& op) {
    const std::size_t N = cut.nodes.size();
    std::vector<std::vector<double>> val(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
        IfeH1Function pf;
        pf.x_m = op.x_m;
        pf.M = op.M;
        pf.c = op.grad_col[i];
        pf.c0 = op.c0_col[i];
        for (std::size_t m = 0; m < N; ++m) {
            const LocalNode& node = cut.nodes[m];
            int region = node.is_cut() ? -1 : cut.region_of(node.pos);
            val[i][m] = pf.value(node.pos, region);
        }
    }
    return val;
}

/// Local matrix of the interface bilinear form: the projected energy term plus
/// the DoF-endpoint stabilization on the non-projected part.
inline LocalSystemH1 local_h1_matrix(const CutTopology& cut, const CoefficientPair& coef,
                                     const H1ProjectionOperator& op) {
    const std::size_t N = cut.nodes.size();
    LocalSystemH1 ls;
    ls.element = cut.element;
    ls.A.assign(N, std::vector<double>(N, 0.0));
    ls.load.assign(N, 0.0);

    // assemble each unordered pair once and mirror: the form is symmetric and
    // the global matrix comes out bitwise symmetric
    SymMat2 G = detail::beta_gradient_gram(cut, coef, op.M);
    auto pv = projected_node_values(cut, op);
    for (std::size_t i = 0; i < N; ++i) {
        Vec2 Gci = G.apply(op.grad_col[i]);
        for (std::size_t j = i; j < N; ++j) {
            double a = dot(Gci, op.grad_col[j]);
            // stabilization: sum_e beta_e (w_i(b_e) - w_i(a_e)) (w_j(b_e) - w_j(a_e))
            // with w = (I - Pi) basis, known at the nodes
            for (const SubEdge& se : cut.sub_edges) {
                double di = (se.b == static_cast<int>(i) ? 1.0 : 0.0) -
                            (se.a == static_cast<int>(i) ? 1.0 : 0.0) -
                            (pv[i][se.b] - pv[i][se.a]);
                double dj = (se.b == static_cast<int>(j) ? 1.0 : 0.0) -
                            (se.a == static_cast<int>(j) ? 1.0 : 0.0) -
                            (pv[j][se.b] - pv[j][se.a]);
                a += coef.beta(se.region) * di * dj;
            }
            ls.A[i][j] = a;
            ls.A[j][i] = a;
        }
    }
    return ls;
}

/// load_i = (f, Pi phi_i) by sub-polygon quadrature.
inline void local_h1_load(const CutTopology& cut, const CoefficientPair& coef,
                          const BranchScalar& f, const H1ProjectionOperator& op,
                          LocalSystemH1& ls, int degree = 4) {
    const std::size_t N = cut.nodes.size();
    ls.load.assign(N, 0.0);
    (void)coef;
    for (int region : {1, -1}) {
        const Polygon& poly = region > 0 ? cut.sub_plus : cut.sub_minus;
        QuadratureRule q = polygon_quadrature(poly, degree);
        for (std::size_t k = 0; k < q.points.size(); ++k) {
            double fw = q.weights[k] * f(q.points[k], region);
            for (std::size_t i = 0; i < N; ++i) {
                Vec2 g = region > 0 ? op.M.apply(op.grad_col[i]) : op.grad_col[i];
                ls.load[i] += fw * (dot(g, q.points[k] - cut.x_m) + op.c0_col[i]);
            }
        }
    }
}

inline LocalSystemH1 local_h1_noninterface(const CutMesh& cm, int t,
                                           const CoefficientPair& coef, const BranchScalar& f,
                                           int degree = 4) {
    const auto& tri = cm.mesh.triangles[t];
    P1Element el({cm.mesh.vertices[tri[0]], cm.mesh.vertices[tri[1]], cm.mesh.vertices[tri[2]]});
    int side = cm.side(t);
    LocalSystemH1 ls;
    ls.element = t;
    auto K = p1_stiffness(el, coef.beta(side));
    ls.A.assign(3, std::vector<double>(3, 0.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ls.A[i][j] = K[i][j];
    ls.load.assign(3, 0.0);
    if (f) {
        QuadratureRule q = triangle_quadrature(el.p[0], el.p[1], el.p[2], degree);
        for (std::size_t k = 0; k < q.points.size(); ++k) {
            double fw = q.weights[k] * f(q.points[k], side);
            for (int i = 0; i < 3; ++i) ls.load[i] += fw * el.hat(i, q.points[k]);
        }
    }
    return ls;
}

inline GlobalSystem assemble_h1(const CutMesh& cm, const DofMaps& dm,
                                const CoefficientPair& coef, const BranchScalar& f,
                                const BranchScalar& dirichlet, const H1Operators& ops,
                                int quad_degree = 4) {
    const NodalDofMap& nd = dm.nodal;
    std::vector<Triplet> triplets;
    std::vector<double> load(nd.n_dofs, 0.0);

    for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
        LocalSystemH1 ls;
        if (cm.is_interface(t)) {
            ls = local_h1_matrix(cm.cut(t), coef, ops.ops[t]);
            if (f) local_h1_load(cm.cut(t), coef, f, ops.ops[t], ls, quad_degree);
        } else {
            ls = local_h1_noninterface(cm, t, coef, f, quad_degree);
        }
        const auto& gdofs = nd.element_dofs[t];
        for (std::size_t i = 0; i < gdofs.size(); ++i) {
            load[gdofs[i]] += ls.load[i];
            for (std::size_t j = 0; j < gdofs.size(); ++j)
                triplets.push_back({gdofs[i], gdofs[j], ls.A[i][j]});
        }
    }

    std::vector<double> bvals(nd.n_dofs, 0.0);
    if (dirichlet)
        for (int i = 0; i < nd.n_dofs; ++i)
            if (nd.boundary[i]) {
                int r = nd.region[i] == 0 ? -1 : nd.region[i];
                bvals[i] = dirichlet(nd.position[i], r);
            }
    return GlobalSystem::build(nd.n_dofs, triplets, std::move(load), nd.boundary,
                               std::move(bvals));
}

inline SchemeSolution assemble_and_solve_h1(const CutMesh& cm, const DofMaps& dm,
                                            const CoefficientPair& coef, const BranchScalar& f,
                                            const BranchScalar& dirichlet,
                                            const H1Operators& ops, double tol = 1e-10,
                                            bool use_dense = false) {
    GlobalSystem g = assemble_h1(cm, dm, coef, f, dirichlet, ops);
    return solve_system(g, tol, use_dense);
}

}  // namespace ivem
