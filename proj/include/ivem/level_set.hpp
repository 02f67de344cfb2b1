#pragma once

#include <functional>
#include <utility>

#include "ivem/geometry.hpp"

namespace ivem {

/// Signed implicit description of the interface: phi < 0 in the minus region,
/// phi > 0 in the plus region. The gradient is carried for diagnostics only;
/// none of the geometry pipeline differentiates phi.
struct LevelSetInterface {
    std::function<double(const Vec2&)> evaluate;
    std::function<Vec2(const Vec2&)> gradient;

    double operator()(const Vec2& x) const { return evaluate(x); }

    static LevelSetInterface circle(Vec2 center, double radius) {
        LevelSetInterface ls;
        ls.evaluate = [center, radius](const Vec2& x) { return norm(x - center) - radius; };
        ls.gradient = [center](const Vec2& x) {
            Vec2 d = x - center;
            double n = norm(d);
            return n > 0.0 ? d / n : Vec2{1.0, 0.0};
        };
        return ls;
    }

    /// Half-plane interface: phi = n.(x - p) with n normalized.
    static LevelSetInterface line(Vec2 point, Vec2 normal) {
        Vec2 n = normalized(normal);
        LevelSetInterface ls;
        ls.evaluate = [point, n](const Vec2& x) { return dot(n, x - point); };
        ls.gradient = [n](const Vec2&) { return n; };
        return ls;
    }

    static LevelSetInterface from_callable(std::function<double(const Vec2&)> f,
                                           std::function<Vec2(const Vec2&)> g = {}) {
        LevelSetInterface ls;
        ls.evaluate = std::move(f);
        ls.gradient = g ? std::move(g) : [](const Vec2&) { return Vec2{0.0, 0.0}; };
        return ls;
    }
};

}  // namespace ivem
