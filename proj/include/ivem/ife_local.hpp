#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "ivem/cut_topology.hpp"
#include "ivem/geometry.hpp"

namespace ivem {

struct CoefficientPair {
    double beta_plus = 1.0;
    double beta_minus = 1.0;
    double alpha_plus = 1.0;
    double alpha_minus = 1.0;

    CoefficientPair() = default;
    CoefficientPair(double bp, double bm, double ap = 1.0, double am = 1.0)
        : beta_plus(bp), beta_minus(bm), alpha_plus(ap), alpha_minus(am) {
        if (beta_plus <= 0.0 || beta_minus <= 0.0 || alpha_plus <= 0.0 || alpha_minus <= 0.0)
            throw std::invalid_argument("CoefficientPair: coefficients must be positive");
    }

    double rho() const { return beta_minus / beta_plus; }
    double beta(int region) const { return region > 0 ? beta_plus : beta_minus; }
    double alpha(int region) const { return region > 0 ? alpha_plus : alpha_minus; }
};

/// The symmetric matrix relating one-sided gradients of an H1 interface
/// function: grad v+ = M grad v-, with M n = rho n and M t = t.
struct JumpMatrix {
    SymMat2 m;
    Vec2 n_bar{};
    double rho = 1.0;

    Vec2 apply(const Vec2& v) const { return m.apply(v); }
};

inline JumpMatrix jump_matrix(const Vec2& n_bar, double rho) {
    if (std::abs(norm(n_bar) - 1.0) > 1e-12)
        throw std::invalid_argument("jump_matrix: normal must be unit length");
    if (rho <= 0.0) throw std::invalid_argument("jump_matrix: rho must be positive");
    double n1 = n_bar.x, n2 = n_bar.y;
    JumpMatrix J;
    J.m = {n2 * n2 + rho * n1 * n1, (rho - 1.0) * n1 * n2, n1 * n1 + rho * n2 * n2};
    J.n_bar = n_bar;
    J.rho = rho;
    return J;
}

/// Piecewise-linear H1 interface function
///   v = M c . (x - x_m) + c0  on the plus side,
///   v =   c . (x - x_m) + c0  on the minus side.
struct IfeH1Function {
    double c0 = 0.0;
    Vec2 c{};     // gradient on the minus side
    Vec2 x_m{};
    JumpMatrix M;

    double value(const Vec2& x, int region) const {
        Vec2 g = region > 0 ? M.apply(c) : c;
        return dot(g, x - x_m) + c0;
    }
    Vec2 grad(int region) const { return region > 0 ? M.apply(c) : c; }
};

/// Piecewise ND0 interface field
///   v = M c + (c0 / alpha(s)) (-(y - y_m), x - x_m)  per region s,
/// with curl v = 2 c0 / alpha(s).
struct IfeCurlFunction {
    Vec2 c{};
    double c0 = 0.0;
    Vec2 x_m{};
    JumpMatrix M;
    CoefficientPair coef;

    Vec2 value(const Vec2& x, int region) const {
        Vec2 base = region > 0 ? M.apply(c) : c;
        return base + (c0 / coef.alpha(region)) * rot90ccw(x - x_m);
    }
    double curl(int region) const { return 2.0 * c0 / coef.alpha(region); }
};

/// Piecewise-linear potential with curl phi = beta_h v for a given
/// piecewise-constant v in grad S. Stored by its one-sided gradients.
struct IfeRotH1Function {
    Vec2 w_plus{}, w_minus{};  // gradients of phi per region
    double c0 = 0.0;
    Vec2 x_m{};

    double value(const Vec2& x, int region) const {
        return dot(region > 0 ? w_plus : w_minus, x - x_m) + c0;
    }
    /// curl phi = (d_y phi, -d_x phi), constant per region.
    Vec2 curl(int region) const { return rot90cw(region > 0 ? w_plus : w_minus); }
};

/// Basis of the local H1 IFE space, in the (c0, c) coordinates
/// {(1,(0,0)), (0,(1,0)), (0,(0,1))}.
inline std::array<IfeH1Function, 3> h1_ife_basis(const CutTopology& cut,
                                                 const CoefficientPair& coef) {
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
    std::array<IfeH1Function, 3> basis;
    basis[0] = {1.0, {0.0, 0.0}, cut.x_m, M};
    basis[1] = {0.0, {1.0, 0.0}, cut.x_m, M};
    basis[2] = {0.0, {0.0, 1.0}, cut.x_m, M};
    return basis;
}

/// Basis of the local H(curl) IFE space, (c, c0) in
/// {((1,0),0), ((0,1),0), ((0,0),1)}.
inline std::array<IfeCurlFunction, 3> curl_ife_basis(const CutTopology& cut,
                                                     const CoefficientPair& coef) {
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
    std::array<IfeCurlFunction, 3> basis;
    basis[0] = {{1.0, 0.0}, 0.0, cut.x_m, M, coef};
    basis[1] = {{0.0, 1.0}, 0.0, cut.x_m, M, coef};
    basis[2] = {{0.0, 0.0}, 1.0, cut.x_m, M, coef};
    return basis;
}

/// Potential of a member of grad S (given by its minus-side value v_minus,
/// plus side M v_minus): phi with curl phi = beta_h v per region, c0 chosen so
/// that the boundary mean of phi over the element vanishes.
inline IfeRotH1Function rot_h1_potential(const Vec2& v_minus, const Vec2& v_plus,
                                         const CutTopology& cut, const CoefficientPair& coef) {
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
    Vec2 expected = M.apply(v_minus);
    double scale = std::max(1.0, norm(v_minus));
    if (norm(v_plus - expected) > 1e-10 * scale)
        throw std::invalid_argument("rot_h1_potential: field violates the jump relation");

    IfeRotH1Function phi;
    phi.x_m = cut.x_m;
    phi.w_plus = rot90ccw(coef.beta_plus * v_plus);
    phi.w_minus = rot90ccw(coef.beta_minus * v_minus);
    phi.c0 = 0.0;

    // boundary mean: phi is linear on every sub-edge, so the trapezoid value is exact
    double total_len = 0.0, integral = 0.0;
    for (const SubEdge& se : cut.sub_edges) {
        const Vec2& a = cut.nodes[se.a].pos;
        const Vec2& b = cut.nodes[se.b].pos;
        integral += 0.5 * se.length * (phi.value(a, se.region) + phi.value(b, se.region));
        total_len += se.length;
    }
    phi.c0 = -integral / total_len;
    return phi;
}

inline IfeRotH1Function rot_h1_potential(const Vec2& v_minus, const CutTopology& cut,
                                         const CoefficientPair& coef) {
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
    return rot_h1_potential(v_minus, M.apply(v_minus), cut, coef);
}

struct ExactSequenceReport {
    double grad_in_curl_space = 0.0;  // gradients of S as curl-free members of S^e
    double curl_weight_jump = 0.0;    // [alpha curl] over the curl basis
    double hodge_defect = 0.0;        // curl(phi) vs beta_h v, coefficient-wise
    double potential_continuity = 0.0;

    double max_violation() const {
        return std::max(std::max(grad_in_curl_space, curl_weight_jump),
                        std::max(hodge_defect, potential_continuity));
    }
};

/// Checks, by direct coefficient comparison, that the local spaces chain:
/// grad S is the curl-free part of S^e, curl S^e spans the weighted constants,
/// and beta_h grad S = curl of the rotated space.
inline ExactSequenceReport verify_exact_sequence(const CutTopology& cut,
                                                 const CoefficientPair& coef) {
    ExactSequenceReport rep;
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());

    for (const IfeH1Function& s : h1_ife_basis(cut, coef)) {
        // grad s as a candidate member of S^e with c = grad s|-, c0 = 0
        Vec2 gm = s.grad(-1), gp = s.grad(1);
        double tang = std::abs(dot(gp - gm, cut.t_bar));
        double normal = std::abs(coef.beta_plus * dot(gp, cut.n_bar) -
                                 coef.beta_minus * dot(gm, cut.n_bar));
        rep.grad_in_curl_space = std::max(rep.grad_in_curl_space, std::max(tang, normal));
    }

    for (const IfeCurlFunction& v : curl_ife_basis(cut, coef)) {
        double jump = std::abs(coef.alpha_plus * v.curl(1) - coef.alpha_minus * v.curl(-1));
        rep.curl_weight_jump = std::max(rep.curl_weight_jump, jump);
    }

    const Vec2 probes[2] = {{1.0, 0.0}, {0.0, 1.0}};
    for (const Vec2& vm : probes) {
        Vec2 vp = M.apply(vm);
        IfeRotH1Function phi = rot_h1_potential(vm, vp, cut, coef);
        rep.hodge_defect = std::max(
            rep.hodge_defect, std::max(norm(phi.curl(1) - coef.beta_plus * vp),
                                       norm(phi.curl(-1) - coef.beta_minus * vm)));
        // continuity of phi across the segment, sampled at both cut points
        for (const LocalNode& b : cut.cut_nodes) {
            double d = std::abs(phi.value(b.pos, 1) - phi.value(b.pos, -1));
            rep.potential_continuity = std::max(rep.potential_continuity, d);
        }
    }
    return rep;
}

}  // namespace ivem
