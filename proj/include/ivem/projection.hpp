#pragma once

#include <array>
#include <vector>

#include "ivem/dof_map.hpp"
#include "ivem/ife_local.hpp"

namespace ivem {

namespace detail {

/// Exact integral of a piecewise-linear function over a convex polygon
/// (fan decomposition, centroid rule per triangle).
template <typename F>
double integrate_linear(const Polygon& poly, F&& f) {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        double a = triangle_area(poly[0], poly[i], poly[i + 1]);
        s += a * f((poly[0] + poly[i] + poly[i + 1]) / 3.0);
    }
    return s;
}

/// beta-weighted gradient Gram of the H1 IFE gradient basis {grad chi_1, grad chi_2}
/// (minus-side coordinates e_1, e_2); exact since gradients are piecewise constant.
inline SymMat2 beta_gradient_gram(const CutTopology& cut, const CoefficientPair& coef,
                                  const JumpMatrix& M) {
    Vec2 m1 = M.apply({1.0, 0.0});
    Vec2 m2 = M.apply({0.0, 1.0});
    double bp = coef.beta_plus * cut.area_plus;
    double bm = coef.beta_minus * cut.area_minus;
    return {bp * dot(m1, m1) + bm, bp * dot(m1, m2), bp * dot(m2, m2) + bm};
}

}  // namespace detail

/// Energy projection from the local H1 virtual space onto the IFE space,
/// computable from nodal DoFs alone. On non-interface elements the projection
/// is the identity and downstream assembly uses exact P1 matrices.
struct H1ProjectionOperator {
    int element = -1;
    bool identity = false;
    JumpMatrix M;
    Vec2 x_m{};
    std::vector<Vec2> grad_col;   // column j: c of the projection of basis DoF j
    std::vector<double> c0_col;   // column j: c0 of the same
    double gram_cond = 1.0;
    bool ill_conditioned = false;

    std::size_t size() const { return grad_col.size(); }

    IfeH1Function apply(const std::vector<double>& dofs) const {
        IfeH1Function f;
        f.x_m = x_m;
        f.M = M;
        for (std::size_t j = 0; j < grad_col.size(); ++j) {
            f.c += dofs[j] * grad_col[j];
            f.c0 += dofs[j] * c0_col[j];
        }
        return f;
    }
};

inline H1ProjectionOperator build_h1_projection(const CutTopology& cut,
                                                const CoefficientPair& coef) {
    H1ProjectionOperator op;
    op.element = cut.element;
    op.M = jump_matrix(cut.n_bar, coef.rho());
    op.x_m = cut.x_m;

    SymMat2 G = detail::beta_gradient_gram(cut, coef, op.M);
    op.gram_cond = cond_spd2(G);
    op.ill_conditioned = op.gram_cond > 1e12;

    const std::size_t N = cut.nodes.size();
    Vec2 g_basis[2] = {{1.0, 0.0}, {0.0, 1.0}};

    // r_i per basis DoF = boundary integral of beta u_h (grad chi_i . n); u_h is the
    // piecewise-linear trace, grad chi_i is constant per sub-edge, so the
    // trapezoid value is exact.
    std::vector<Vec2> rhs(N, Vec2{0.0, 0.0});
    for (const SubEdge& se : cut.sub_edges) {
        const Vec2& a = cut.nodes[se.a].pos;
        const Vec2& b = cut.nodes[se.b].pos;
        Vec2 n_out = rot90cw((b - a) / se.length);
        double be = coef.beta(se.region);
        for (int i = 0; i < 2; ++i) {
            Vec2 gi = se.region > 0 ? op.M.apply(g_basis[i]) : g_basis[i];
            double flux = be * dot(gi, n_out) * 0.5 * se.length;
            // trace of the hat at node j contributes (delta_ja + delta_jb)/2 * |e|
            Vec2& ra = rhs[se.a];
            Vec2& rb = rhs[se.b];
            if (i == 0) {
                ra.x += flux;
                rb.x += flux;
            } else {
                ra.y += flux;
                rb.y += flux;
            }
        }
    }

    op.grad_col.resize(N);
    op.c0_col.assign(N, 0.0);
    for (std::size_t j = 0; j < N; ++j) op.grad_col[j] = solve_spd2(G, rhs[j]);

    // c0 from the boundary-mean condition: mean of (u_h - gradient part) on dK
    double perimeter = 0.0;
    for (const SubEdge& se : cut.sub_edges) perimeter += se.length;
    for (const SubEdge& se : cut.sub_edges) {
        const Vec2& a = cut.nodes[se.a].pos;
        const Vec2& b = cut.nodes[se.b].pos;
        for (std::size_t j = 0; j < N; ++j) {
            double trace = 0.5 * se.length *
                           ((se.a == static_cast<int>(j) ? 1.0 : 0.0) +
                            (se.b == static_cast<int>(j) ? 1.0 : 0.0));
            Vec2 g = se.region > 0 ? op.M.apply(op.grad_col[j]) : op.grad_col[j];
            double lin = 0.5 * se.length * (dot(g, a - cut.x_m) + dot(g, b - cut.x_m));
            op.c0_col[j] += (trace - lin) / perimeter;
        }
    }
    return op;
}

inline IfeH1Function apply_h1_projection(const H1ProjectionOperator& op,
                                         const std::vector<double>& dofs) {
    return op.apply(dofs);
}

/// Weighted-L2 projection from the local H(curl) virtual space onto grad S,
/// computable from edge DoFs via the rotated potentials.
struct CurlProjectionOperator {
    int element = -1;
    bool identity = false;
    JumpMatrix M;
    ElementCurlData curl_data;
    std::vector<Vec2> coef_col;  // column j: minus-side field coefficients
    double gram_cond = 1.0;
    bool ill_conditioned = false;

    std::size_t size() const { return coef_col.size(); }

    /// Minus-side value of the projected field; plus side is M times it.
    Vec2 apply_minus(const std::vector<double>& dofs) const {
        Vec2 v{0.0, 0.0};
        for (std::size_t j = 0; j < coef_col.size(); ++j) v += dofs[j] * coef_col[j];
        return v;
    }
    Vec2 apply(const std::vector<double>& dofs, int region) const {
        Vec2 vm = apply_minus(dofs);
        return region > 0 ? M.apply(vm) : vm;
    }
};

inline CurlProjectionOperator build_curl_projection(const CutTopology& cut,
                                                    const CoefficientPair& coef) {
    CurlProjectionOperator op;
    op.element = cut.element;
    op.M = jump_matrix(cut.n_bar, coef.rho());
    op.curl_data = ElementCurlData::from(cut, coef);

    SymMat2 G = detail::beta_gradient_gram(cut, coef, op.M);
    op.gram_cond = cond_spd2(G);
    op.ill_conditioned = op.gram_cond > 1e12;

    const std::size_t N = cut.sub_edges.size();
    IfeRotH1Function phi[2] = {rot_h1_potential({1.0, 0.0}, cut, coef),
                               rot_h1_potential({0.0, 1.0}, cut, coef)};

    // Per-region integrals of the potentials (piecewise linear, exact).
    double vol_int[2][2];  // [i][plus?]
    for (int i = 0; i < 2; ++i) {
        vol_int[i][1] = detail::integrate_linear(cut.sub_plus,
                                                 [&](const Vec2& x) { return phi[i].value(x, 1); });
        vol_int[i][0] = detail::integrate_linear(cut.sub_minus,
                                                 [&](const Vec2& x) { return phi[i].value(x, -1); });
    }

    op.coef_col.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        const SubEdge& se = cut.sub_edges[j];
        double circ = se.orient * se.length;  // circulation of the DoF-j basis
        double curl_p = op.curl_data.factor_plus * circ;
        double curl_m = op.curl_data.factor_minus * circ;

        Vec2 r{};
        for (int i = 0; i < 2; ++i) {
            double volume_term = curl_p * vol_int[i][1] + curl_m * vol_int[i][0];
            const Vec2& a = cut.nodes[se.a].pos;
            const Vec2& b = cut.nodes[se.b].pos;
            double boundary_term = se.orient * 0.5 * se.length *
                                   (phi[i].value(a, se.region) + phi[i].value(b, se.region));
            double ri = volume_term - boundary_term;
            if (i == 0)
                r.x = ri;
            else
                r.y = ri;
        }
        op.coef_col[j] = solve_spd2(G, r);
    }
    return op;
}

inline Vec2 apply_curl_projection(const CurlProjectionOperator& op,
                                  const std::vector<double>& dofs, int region) {
    return op.apply(dofs, region);
}

// ---------------------------------------------------------------------------
// Exact local matrices for non-interface elements (the projection there is the
// identity; the spaces are plain P1 and lowest-order edge elements).

struct P1Element {
    std::array<Vec2, 3> p;
    double area = 0.0;
    std::array<Vec2, 3> grad;  // gradients of the barycentric hats

    explicit P1Element(const std::array<Vec2, 3>& pts) : p(pts) {
        area = triangle_area(p[0], p[1], p[2]);
        if (area <= 0.0) throw geometry_error("P1Element: non-positive area");
        for (int i = 0; i < 3; ++i) {
            Vec2 opposite = p[(i + 2) % 3] - p[(i + 1) % 3];
            grad[i] = rot90ccw(opposite) / (2.0 * area);
        }
    }

    double hat(int i, const Vec2& x) const {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        return triangle_area(x, p[j], p[k]) / area;
    }
};

inline std::array<std::array<double, 3>, 3> p1_stiffness(const P1Element& el, double beta) {
    std::array<std::array<double, 3>, 3> K{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K[i][j] = beta * el.area * dot(el.grad[i], el.grad[j]);
    return K;
}

/// Lowest-order edge element on one triangle; DoFs are average tangential
/// components on the local edges (p0p1, p1p2, p2p0) along the given directions.
struct Nd0Element {
    P1Element p1;
    std::array<int, 3> sign;       // local ccw vs global edge direction
    std::array<double, 3> length;

    Nd0Element(const std::array<Vec2, 3>& pts, const std::array<int, 3>& signs)
        : p1(pts), sign(signs) {
        for (int k = 0; k < 3; ++k) length[k] = norm(pts[(k + 1) % 3] - pts[k]);
    }

    /// Basis field of the DoF on local edge k, evaluated at x.
    Vec2 basis(int k, const Vec2& x) const {
        int i = k, j = (k + 1) % 3;
        Vec2 w = p1.hat(i, x) * p1.grad[j] - p1.hat(j, x) * p1.grad[i];
        return sign[k] * length[k] * w;
    }

    double basis_curl(int k) const {
        int i = k, j = (k + 1) % 3;
        return sign[k] * length[k] * 2.0 * cross(p1.grad[i], p1.grad[j]);
    }
};

inline std::array<std::array<double, 3>, 3> nd0_curl_curl(const Nd0Element& el, double alpha) {
    std::array<std::array<double, 3>, 3> K{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            K[i][j] = alpha * el.p1.area * el.basis_curl(i) * el.basis_curl(j);
    return K;
}

inline std::array<std::array<double, 3>, 3> nd0_mass(const Nd0Element& el, double beta) {
    std::array<std::array<double, 3>, 3> K{};
    QuadratureRule q = triangle_quadrature(el.p1.p[0], el.p1.p[1], el.p1.p[2], 2);
    for (std::size_t n = 0; n < q.points.size(); ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                K[i][j] += beta * q.weights[n] *
                           dot(el.basis(i, q.points[n]), el.basis(j, q.points[n]));
    return K;
}

}  // namespace ivem
