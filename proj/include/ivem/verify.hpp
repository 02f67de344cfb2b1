#pragma once

#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ivem/errors.hpp"
#include "ivem/study.hpp"

namespace ivem {

struct CheckResult {
    std::string name;
    double max_violation = 0.0;
    double tolerance = 0.0;

    bool pass() const { return max_violation <= tolerance; }
};

inline BackgroundMesh single_triangle_mesh(const Vec2& a, const Vec2& b, const Vec2& c) {
    BackgroundMesh m;
    m.vertices = {a, b, c};
    m.triangles = {{0, 1, 2}};
    m.build_edges();
    m.h = diameter({a, b, c});
    return m;
}

/// A randomly jittered triangle cut by a straight interface through two random
/// edge points; runs the full geometry pipeline.
inline CutTopology random_cut(std::mt19937& rng, double min_param = 0.02) {
    std::uniform_real_distribution<double> jit(-0.2, 0.2);
    std::uniform_real_distribution<double> par(min_param, 1.0 - min_param);
    std::uniform_int_distribution<int> edge_pick(0, 2);
    for (;;) {
        Vec2 a{jit(rng), jit(rng)};
        Vec2 b{1.0 + jit(rng), jit(rng)};
        Vec2 c{0.3 + jit(rng), 1.0 + jit(rng)};
        if (triangle_area(a, b, c) < 0.2) continue;
        int e0 = edge_pick(rng);
        int e1 = (e0 + 1 + edge_pick(rng) % 2) % 3;
        Vec2 verts[3] = {a, b, c};
        auto on_edge = [&](int e, double t) {
            return verts[e] + t * (verts[(e + 1) % 3] - verts[e]);
        };
        Vec2 p = on_edge(e0, par(rng));
        Vec2 q = on_edge(e1, par(rng));
        BackgroundMesh mesh = single_triangle_mesh(a, b, c);
        LevelSetInterface ls = LevelSetInterface::line(0.5 * (p + q), rot90ccw(q - p));
        try {
            return compute_cut(mesh, 0, ls);
        } catch (const std::exception&) {
            continue;  // degenerate draw (cut through a vertex zone)
        }
    }
}

inline CoefficientPair random_coefficients(std::mt19937& rng, double decades = 2.0) {
    std::uniform_real_distribution<double> ex(-decades, decades);
    return CoefficientPair(std::pow(10.0, ex(rng)), std::pow(10.0, ex(rng)),
                           std::pow(10.0, ex(rng)), std::pow(10.0, ex(rng)));
}

namespace detail {

inline void check_max(CheckResult& r, double v) { r.max_violation = std::max(r.max_violation, v); }

}  // namespace detail

/// M n = rho n and M t = t over random normals and rho in [1e-3, 1e3].
inline CheckResult check_jump_matrix_eigenstructure(std::mt19937& rng, int trials = 1000) {
    CheckResult r{"jump matrix eigenstructure (Mn=rho n, Mt=t)", 0.0, 1e-12};
    std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979323846);
    std::uniform_real_distribution<double> ex(-3.0, 3.0);
    for (int i = 0; i < trials; ++i) {
        double th = ang(rng), rho = std::pow(10.0, ex(rng));
        Vec2 n{std::cos(th), std::sin(th)};
        Vec2 t = rot90ccw(n);
        JumpMatrix M = jump_matrix(n, rho);
        detail::check_max(r, norm(M.apply(n) - rho * n) / rho);
        detail::check_max(r, norm(M.apply(t) - t));
    }
    return r;
}

/// H1 value/flux and H(curl) tangential/alpha-curl/beta-normal jump conditions
/// of the explicit IFE bases, sampled along the interface segment.
inline CheckResult check_ife_jump_conditions(std::mt19937& rng, int trials = 200) {
    CheckResult r{"IFE jump conditions on the interface segment", 0.0, 1e-12};
    for (int c = 0; c < trials; ++c) {
        CutTopology cut = random_cut(rng);
        CoefficientPair coef = random_coefficients(rng);
        double bmax = std::max(coef.beta_plus, coef.beta_minus);

        for (const IfeH1Function& f : h1_ife_basis(cut, coef)) {
            for (int k = 0; k <= 10; ++k) {
                Vec2 x = cut.cut_nodes[0].pos +
                         (k / 10.0) * (cut.cut_nodes[1].pos - cut.cut_nodes[0].pos);
                detail::check_max(r, std::abs(f.value(x, 1) - f.value(x, -1)));
            }
            double flux = coef.beta_plus * dot(f.grad(1), cut.n_bar) -
                          coef.beta_minus * dot(f.grad(-1), cut.n_bar);
            detail::check_max(r, std::abs(flux) / bmax);
        }
        for (const IfeCurlFunction& f : curl_ife_basis(cut, coef)) {
            for (int k = 0; k <= 10; ++k) {
                Vec2 x = cut.cut_nodes[0].pos +
                         (k / 10.0) * (cut.cut_nodes[1].pos - cut.cut_nodes[0].pos);
                detail::check_max(r, std::abs(dot(f.value(x, 1) - f.value(x, -1), cut.t_bar)));
            }
            detail::check_max(
                r, std::abs(coef.alpha_plus * f.curl(1) - coef.alpha_minus * f.curl(-1)));
            double fn = coef.beta_plus * dot(f.value(cut.x_m, 1), cut.n_bar) -
                        coef.beta_minus * dot(f.value(cut.x_m, -1), cut.n_bar);
            detail::check_max(r, std::abs(fn) / bmax);
        }
    }
    return r;
}

/// Pi (DoFs of s) = s for s in the H1 IFE space, and the analogue for the
/// weighted-L2 projection on the curl-free subspace. The identity is exact in
/// exact arithmetic; in doubles its forward error scales with the Gram
/// condition, so the 1e-12 gate sweeps contrasts up to 1e2 and a separate
/// conditioning-scaled bound covers rho down to 1e-3.
inline CheckResult check_projection_idempotence(std::mt19937& rng, int trials = 200) {
    CheckResult r{"projection idempotence on IFE subspaces", 0.0, 1e-12};
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int c = 0; c < trials; ++c) {
        CutTopology cut = random_cut(rng, 0.05);
        CoefficientPair coef = random_coefficients(rng, 1.0);
        JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());

        IfeH1Function s{u(rng), {u(rng), u(rng)}, cut.x_m, M};
        std::vector<double> dofs;
        for (const LocalNode& n : cut.nodes) {
            int region = n.is_cut() ? -1 : cut.region_of(n.pos);
            dofs.push_back(s.value(n.pos, region));
        }
        H1ProjectionOperator op = build_h1_projection(cut, coef);
        IfeH1Function p = op.apply(dofs);
        double scale = std::max(1.0, std::max(std::abs(s.c0), norm(s.c)));
        detail::check_max(r, norm(p.c - s.c) / scale);
        detail::check_max(r, std::abs(p.c0 - s.c0) / scale);

        Vec2 vm{u(rng), u(rng)};
        Vec2 vp = M.apply(vm);
        std::vector<double> edofs;
        for (const SubEdge& se : cut.sub_edges) {
            Vec2 tau = (cut.nodes[se.b].pos - cut.nodes[se.a].pos) / se.length;
            edofs.push_back(se.orient * dot(se.region > 0 ? vp : vm, tau));
        }
        CurlProjectionOperator cop = build_curl_projection(cut, coef);
        Vec2 back = cop.apply_minus(edofs);
        detail::check_max(r, norm(back - vm) / std::max(1.0, norm(vm)));
    }
    return r;
}

/// Round-trip stability over the full rho range [1e-3, 1e3]: the defect stays
/// within a modest multiple of eps times the Gram condition number.
inline CheckResult check_projection_stability(std::mt19937& rng, int trials = 200) {
    CheckResult r{"projection round-trip vs Gram conditioning", 0.0, 1.0};
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int c = 0; c < trials; ++c) {
        CutTopology cut = random_cut(rng);
        CoefficientPair coef = random_coefficients(rng, 1.5);
        JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
        IfeH1Function s{u(rng), {u(rng), u(rng)}, cut.x_m, M};
        std::vector<double> dofs;
        for (const LocalNode& n : cut.nodes)
            dofs.push_back(s.value(n.pos, n.is_cut() ? -1 : cut.region_of(n.pos)));
        H1ProjectionOperator op = build_h1_projection(cut, coef);
        IfeH1Function p = op.apply(dofs);
        double scale = std::max(1.0, std::max(std::abs(s.c0), norm(s.c)));
        double defect = std::max(norm(p.c - s.c), std::abs(p.c0 - s.c0)) / scale;
        detail::check_max(r, defect / (100.0 * 2.3e-16 * std::max(1.0, op.gram_cond)));
    }
    return r;
}

/// Discrete gradients lie in the kernel of the curl-curl block.
inline CheckResult check_discrete_complex(unsigned seed) {
    CheckResult r{"discrete complex: curl o grad = 0", 0.0, 1e-13};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    Vec2 center{0.5 + 0.01 * std::sqrt(2.0), 0.5 + 0.01 * std::sqrt(3.0)};
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 16),
                                LevelSetInterface::circle(center, 0.3));
    DofMaps dm = build_dof_maps(cm);
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);

    std::vector<double> p(dm.nodal.n_dofs);
    for (double& v : p) v = u(rng);

    // gradient DoFs: difference of the endpoint nodal values over the length
    std::vector<double> g(dm.edge.n_dofs, 0.0);
    for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
        const auto& ed = dm.edge.element_dofs[t];
        const auto& nd = dm.nodal.element_dofs[t];
        std::size_t nn = nd.size();
        for (std::size_t k = 0; k < ed.size(); ++k) {
            // nodal ring and sub-edge ring are aligned: sub-edge k runs from
            // local node k to local node (k+1) % nn in traversal order
            int sign = 1;
            double len;
            if (cm.is_interface(t)) {
                const SubEdge& se = cm.cut(t).sub_edges[k];
                sign = se.orient;
                len = se.length;
            } else {
                const auto& tri = cm.mesh.triangles[t];
                int e = cm.mesh.triangle_edges[t][k];
                sign = cm.mesh.edges[e].v0 == tri[k] ? 1 : -1;
                len = norm(cm.mesh.vertices[cm.mesh.edges[e].v1] -
                           cm.mesh.vertices[cm.mesh.edges[e].v0]);
            }
            double diff = p[nd[(k + 1) % nn]] - p[nd[k]];
            g[ed[k]] = sign * diff / len;
        }
    }

    for (int t = 0; t < cm.mesh.n_triangles(); ++t) {
        const auto& ed = dm.edge.element_dofs[t];
        std::vector<double> local(ed.size());
        for (std::size_t i = 0; i < ed.size(); ++i) local[i] = g[ed[i]];
        double circ, scale = 1e-30;
        if (cm.is_interface(t)) {
            const CutTopology& ct = cm.cut(t);
            circ = element_circulation(ct, local);
            for (std::size_t i = 0; i < ed.size(); ++i)
                scale += std::abs(ct.sub_edges[i].length * local[i]);
        } else {
            Nd0Element el = make_nd0_element(cm, dm, t);
            circ = 0.0;
            for (int i = 0; i < 3; ++i) {
                circ += el.sign[i] * el.length[i] * local[i];
                scale += std::abs(el.length[i] * local[i]);
            }
        }
        detail::check_max(r, std::abs(circ) / scale);
    }
    return r;
}

/// curl of the edge interpolant equals the weighted-average projection of the
/// curl, element by element (quadrature oracle on the Green identity).
inline CheckResult check_commutativity() {
    CheckResult r{"commutativity: curl I_e u = pi_alpha curl u", 0.0, 1e-10};
    Vec2 center{0.5 + 0.01 * std::sqrt(2.0), 0.5 + 0.01 * std::sqrt(3.0)};
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);

    // v = (x^2 y - y, x y + y^3), curl v = y - x^2 + 1
    BranchField poly = [](const Vec2& x, int) {
        return Vec2{x.x * x.x * x.y - x.y, x.x * x.y + x.y * x.y * x.y};
    };
    auto poly_curl = [](const Vec2& x) { return x.y - x.x * x.x + 1.0; };
    BranchField trig = [](const Vec2& x, int) {
        return Vec2{std::sin(x.y), std::cos(x.x) * x.y};
    };
    auto trig_curl = [](const Vec2& x) { return -std::sin(x.x) * x.y - std::cos(x.y); };

    for (int n : {8, 16}) {
        CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, n),
                                    LevelSetInterface::circle(center, 0.3));
        DofMaps dm = build_dof_maps(cm);
        for (int which = 0; which < 2; ++which) {
            const BranchField& u = which == 0 ? poly : trig;
            std::vector<double> dofs = interpolate_edge(dm.edge, u, 9);
            for (const CutTopology& ct : cm.cuts) {
                const auto& ed = dm.edge.element_dofs[ct.element];
                std::vector<double> local(ed.size());
                for (std::size_t i = 0; i < ed.size(); ++i) local[i] = dofs[ed[i]];
                auto [cp, cmns] = curl_from_dofs(ct, coef, local);

                double integral = 0.0;
                for (int region : {1, -1}) {
                    QuadratureRule q = polygon_quadrature(
                        region > 0 ? ct.sub_plus : ct.sub_minus, 6);
                    integral += q.integrate([&](const Vec2& x) {
                        return which == 0 ? poly_curl(x) : trig_curl(x);
                    });
                }
                double denom = ct.area_plus / coef.alpha_plus +
                               ct.area_minus / coef.alpha_minus;
                double gamma = integral / denom;
                double scale = std::max(1.0, std::abs(gamma));
                detail::check_max(r, std::abs(cp - gamma / coef.alpha_plus) / scale);
                detail::check_max(r, std::abs(cmns - gamma / coef.alpha_minus) / scale);
            }
        }
    }
    return r;
}

/// beta_h grad S = curl of the rotated space, by coefficient comparison.
inline CheckResult check_hodge_identity(std::mt19937& rng, int trials = 200) {
    CheckResult r{"Hodge identity beta grad S = curl S~", 0.0, 1e-12};
    for (int c = 0; c < trials; ++c) {
        CutTopology cut = random_cut(rng);
        CoefficientPair coef = random_coefficients(rng);
        ExactSequenceReport rep = verify_exact_sequence(cut, coef);
        double bmax = std::max(coef.beta_plus, coef.beta_minus);
        detail::check_max(r, rep.hodge_defect / bmax);
        detail::check_max(r, rep.potential_continuity / bmax);
        detail::check_max(r, rep.grad_in_curl_space / bmax);
        detail::check_max(r, rep.curl_weight_jump);
    }
    return r;
}

/// SPD-ness and conditioning of the projection Grams over a wide cut sweep.
inline CheckResult check_gram_conditioning(std::mt19937& rng, int trials = 1000) {
    CheckResult r{"projection Gram conditioning over cut sweep", 0.0, 1e12};
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);
    for (int c = 0; c < trials; ++c) {
        CutTopology cut = random_cut(rng, 1e-8);
        H1ProjectionOperator op = build_h1_projection(cut, coef);
        detail::check_max(r, op.gram_cond);
    }
    return r;
}

inline std::vector<CheckResult> run_structural_suite(unsigned seed = 20240815) {
    std::mt19937 rng(seed);
    std::vector<CheckResult> out;
    out.push_back(check_jump_matrix_eigenstructure(rng));
    out.push_back(check_ife_jump_conditions(rng));
    out.push_back(check_projection_idempotence(rng));
    out.push_back(check_projection_stability(rng));
    out.push_back(check_discrete_complex(seed));
    out.push_back(check_commutativity());
    out.push_back(check_hodge_identity(rng));
    out.push_back(check_gram_conditioning(rng));
    return out;
}

inline bool print_structural_suite(std::ostream& os, unsigned seed = 20240815) {
    bool all = true;
    char buf[200];
    for (const CheckResult& c : run_structural_suite(seed)) {
        std::snprintf(buf, sizeof buf, "%-52s %-5s max %.3e (tol %.1e)\n", c.name.c_str(),
                      c.pass() ? "PASS" : "FAIL", c.max_violation, c.tolerance);
        os << buf;
        all = all && c.pass();
    }
    return all;
}

}  // namespace ivem
