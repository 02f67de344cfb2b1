#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "ivem/dof_map.hpp"
#include "ivem/ife_local.hpp"

namespace ivem {

/// Exact scalar solution with one-sided branches that agree on the interface.
struct ManufacturedH1 {
    BranchScalar value;
    BranchField grad;
    BranchScalar source;  // f = -div(beta grad u)
};

/// Exact vector solution of the curl problem, f = curl(alpha curl u) + beta u.
struct ManufacturedCurl {
    BranchField value;
    BranchScalar curl;
    BranchField source;
};

/// The radial benchmark u = r^3 / beta (shifted on the plus side for
/// continuity); the flux 3 r^2 is continuous and f = -9r on both sides.
inline ManufacturedH1 h1_circle_solution(Vec2 center, double radius,
                                         const CoefficientPair& coef) {
    double shift = radius * radius * radius * (1.0 / coef.beta_minus - 1.0 / coef.beta_plus);
    ManufacturedH1 m;
    m.value = [center, coef, shift](const Vec2& x, int region) {
        double r = norm(x - center);
        double r3 = r * r * r;
        return region > 0 ? r3 / coef.beta_plus + shift : r3 / coef.beta_minus;
    };
    m.grad = [center, coef](const Vec2& x, int region) {
        double r = norm(x - center);
        return (3.0 * r / coef.beta(region)) * (x - center);
    };
    m.source = [center](const Vec2& x, int) { return -9.0 * norm(x - center); };
    return m;
}

inline ManufacturedH1 h1_linear_solution(const CoefficientPair& coef) {
    if (std::abs(coef.rho() - 1.0) > 1e-14)
        throw std::invalid_argument("h1_linear_solution: requires uniform beta");
    ManufacturedH1 m;
    m.value = [](const Vec2& x, int) { return 1.0 + 2.0 * x.x + 3.0 * x.y; };
    m.grad = [](const Vec2&, int) { return Vec2{2.0, 3.0}; };
    m.source = [](const Vec2&, int) { return 0.0; };
    return m;
}

/// Piecewise-linear solution with a gradient kink across a straight interface;
/// solves the PDE exactly with f = 0 for any coefficient contrast.
inline ManufacturedH1 h1_line_kink_solution(Vec2 point, Vec2 normal,
                                            const CoefficientPair& coef) {
    Vec2 n = normalized(normal);
    JumpMatrix M = jump_matrix(n, coef.rho());
    Vec2 c_minus{1.3, -0.7};
    Vec2 c_plus = M.apply(c_minus);
    ManufacturedH1 m;
    m.value = [point, c_minus, c_plus](const Vec2& x, int region) {
        return dot(region > 0 ? c_plus : c_minus, x - point);
    };
    m.grad = [c_minus, c_plus](const Vec2&, int region) {
        return region > 0 ? c_plus : c_minus;
    };
    m.source = [](const Vec2&, int) { return 0.0; };
    return m;
}

/// Tangential field u = h(r) e_theta around the circle with alpha curl u = 1,
/// u.n = 0, continuous u.t; the PDE reduces to f = beta u.
inline ManufacturedCurl curl_rotational_solution(Vec2 center, double radius,
                                                 const CoefficientPair& coef) {
    double r0sq = radius * radius;
    auto h = [coef, r0sq](double r, int region) {
        if (region <= 0) return r / (2.0 * coef.alpha_minus);
        return (r0sq / (2.0 * coef.alpha_minus) + (r * r - r0sq) / (2.0 * coef.alpha_plus)) / r;
    };
    ManufacturedCurl m;
    m.value = [center, h](const Vec2& x, int region) {
        Vec2 d = x - center;
        double r = norm(d);
        if (r == 0.0) return Vec2{0.0, 0.0};
        return h(r, region) / r * rot90ccw(d);
    };
    m.curl = [coef](const Vec2&, int region) { return 1.0 / coef.alpha(region); };
    m.source = [center, h, coef](const Vec2& x, int region) {
        Vec2 d = x - center;
        double r = norm(d);
        if (r == 0.0) return Vec2{0.0, 0.0};
        return coef.beta(region) * h(r, region) / r * rot90ccw(d);
    };
    return m;
}

/// Curl-free case u = grad of the radial benchmark; f = beta u = 3r (x - c).
inline ManufacturedCurl curl_gradient_solution(Vec2 center, double radius,
                                               const CoefficientPair& coef) {
    ManufacturedH1 h1 = h1_circle_solution(center, radius, coef);
    ManufacturedCurl m;
    m.value = h1.grad;
    m.curl = [](const Vec2&, int) { return 0.0; };
    m.source = [center](const Vec2& x, int) { return 3.0 * norm(x - center) * (x - center); };
    return m;
}

inline ManufacturedCurl curl_constant_solution(const CoefficientPair& coef) {
    if (std::abs(coef.rho() - 1.0) > 1e-14)
        throw std::invalid_argument("curl_constant_solution: requires uniform beta");
    Vec2 c{0.7, -0.4};
    ManufacturedCurl m;
    m.value = [c](const Vec2&, int) { return c; };
    m.curl = [](const Vec2&, int) { return 0.0; };
    m.source = [c, coef](const Vec2&, int region) { return coef.beta(region) * c; };
    return m;
}

/// Piecewise-constant IFE-compatible field across a straight interface; exact
/// for any contrast since the discrete interface coincides with the line.
inline ManufacturedCurl curl_line_kink_solution(Vec2 point, Vec2 normal,
                                                const CoefficientPair& coef) {
    Vec2 n = normalized(normal);
    JumpMatrix M = jump_matrix(n, coef.rho());
    Vec2 c_minus{0.9, 0.5};
    Vec2 c_plus = M.apply(c_minus);
    (void)point;
    ManufacturedCurl m;
    m.value = [c_minus, c_plus](const Vec2&, int region) {
        return region > 0 ? c_plus : c_minus;
    };
    m.curl = [](const Vec2&, int) { return 0.0; };
    m.source = [c_minus, c_plus, coef](const Vec2&, int region) {
        return coef.beta(region) * (region > 0 ? c_plus : c_minus);
    };
    return m;
}

}  // namespace ivem
