#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ivem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }

/// Counterclockwise rotation by pi/2.
inline Vec2 rot90ccw(const Vec2& v) { return {-v.y, v.x}; }
/// Clockwise rotation by pi/2.
inline Vec2 rot90cw(const Vec2& v) { return {v.y, -v.x}; }

inline Vec2 normalized(const Vec2& v) {
    double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return v / n;
}

/// Symmetric 2x2 matrix, stored as [a b; b c].
struct SymMat2 {
    double a = 0.0, b = 0.0, c = 0.0;

    Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, b * v.x + c * v.y}; }
    double det() const { return a * c - b * b; }
};

inline SymMat2 operator+(const SymMat2& m, const SymMat2& n) {
    return {m.a + n.a, m.b + n.b, m.c + n.c};
}

/// Solve the SPD 2x2 system [a b; b c] x = r.
inline Vec2 solve_spd2(const SymMat2& m, const Vec2& r) {
    double d = m.det();
    if (d <= 0.0) throw std::runtime_error("solve_spd2: matrix not positive definite");
    return {(m.c * r.x - m.b * r.y) / d, (m.a * r.y - m.b * r.x) / d};
}

/// Spectral condition number of an SPD 2x2 matrix.
inline double cond_spd2(const SymMat2& m) {
    double tr = m.a + m.c;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - m.det()));
    double lo = tr / 2.0 - disc, hi = tr / 2.0 + disc;
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

using Polygon = std::vector<Vec2>;

// fan form about p[0]: keeps full relative accuracy for tiny polygons far
// from the origin
inline double signed_area(const Polygon& p) {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        s += cross(p[i] - p[0], p[i + 1] - p[0]);
    return 0.5 * s;
}

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

inline Vec2 centroid(const Polygon& p) {
    // area-weighted centroid via the fan from vertex 0
    double area = 0.0;
    Vec2 c{0.0, 0.0};
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        double a = triangle_area(p[0], p[i], p[i + 1]);
        area += a;
        c += a / 3.0 * (p[0] + p[i] + p[i + 1]);
    }
    if (area == 0.0) throw std::runtime_error("centroid: degenerate polygon");
    return c / area;
}

inline double diameter(const Polygon& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            d = std::max(d, norm(p[i] - p[j]));
    return d;
}

/// Winding test against a convex counterclockwise polygon (closure counts as inside).
inline bool point_in_convex_polygon(const Polygon& p, const Vec2& x, double tol = 1e-12) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % p.size()];
        if (cross(v - u, x - u) < -tol * norm(v - u)) return false;
    }
    return true;
}

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
        return s;
    }
};

namespace detail {

struct TriRulePoint {
    double l1, l2, w;  // barycentric (l1, l2, 1-l1-l2), weight relative to unit total
};

/// Symmetric Gauss rules on the reference triangle, exact to the named degree.
inline std::vector<TriRulePoint> reference_triangle_rule(int degree) {
    std::vector<TriRulePoint> r;
    auto push3 = [&r](double a, double w) {
        r.push_back({a, a, w});
        r.push_back({1.0 - 2.0 * a, a, w});
        r.push_back({a, 1.0 - 2.0 * a, w});
    };
    auto push6 = [&r](double a, double b, double w) {
        double c = 1.0 - a - b;
        r.push_back({a, b, w});
        r.push_back({b, a, w});
        r.push_back({a, c, w});
        r.push_back({c, a, w});
        r.push_back({b, c, w});
        r.push_back({c, b, w});
    };
    switch (degree) {
        case 0:
        case 1:
            r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0});
            break;
        case 2:
            push3(1.0 / 6.0, 1.0 / 3.0);
            break;
        case 3:
        case 4:
            push3(0.445948490915965, 0.223381589678011);
            push3(0.091576213509771, 0.109951743655322);
            break;
        case 5:
            r.push_back({1.0 / 3.0, 1.0 / 3.0, 0.225});
            push3(0.470142064105115, 0.132394152788506);
            push3(0.101286507323456, 0.125939180544827);
            break;
        case 6:
            push3(0.249286745170910, 0.116786275726379);
            push3(0.063089014491502, 0.050844906370207);
            push6(0.310352451033785, 0.636502499121399, 0.082851075618374);
            break;
        default:
            throw std::invalid_argument("reference_triangle_rule: degree > 6 unsupported");
    }
    return r;
}

/// Gauss-Legendre nodes/weights on [-1,1], exact to degree 2n-1 (n <= 5).
inline void gauss_legendre(int npts, std::array<double, 5>& xs, std::array<double, 5>& ws) {
    switch (npts) {
        case 1:
            xs = {0.0};
            ws = {2.0};
            break;
        case 2:
            xs = {-0.5773502691896257, 0.5773502691896257};
            ws = {1.0, 1.0};
            break;
        case 3:
            xs = {-0.7745966692414834, 0.0, 0.7745966692414834};
            ws = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        case 4:
            xs = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                  0.8611363115940526};
            ws = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                  0.3478548451374538};
            break;
        case 5:
            xs = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                  0.9061798459386640};
            ws = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                  0.4786286704993665, 0.2369268850561891};
            break;
        default:
            throw std::invalid_argument("gauss_legendre: npts out of range");
    }
}

}  // namespace detail

/// Quadrature over one physical triangle, exact for polynomials up to `degree`.
inline QuadratureRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c,
                                          int degree) {
    QuadratureRule q;
    double area = triangle_area(a, b, c);
    for (const auto& rp : detail::reference_triangle_rule(degree)) {
        double l3 = 1.0 - rp.l1 - rp.l2;
        q.points.push_back(rp.l1 * a + rp.l2 * b + l3 * c);
        q.weights.push_back(rp.w * area);
    }
    return q;
}

/// Fan-triangulated quadrature over a convex counterclockwise polygon.
/// A degenerate polygon (relative area below 1e-14) yields an empty rule.
inline QuadratureRule polygon_quadrature(const Polygon& poly, int degree) {
    if (degree > 6) throw std::invalid_argument("polygon_quadrature: degree > 6 unsupported");
    QuadratureRule q;
    if (poly.size() < 3) return q;
    double d = diameter(poly);
    if (signed_area(poly) < 1e-14 * d * d) return q;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        QuadratureRule t = triangle_quadrature(poly[0], poly[i], poly[i + 1], degree);
        q.points.insert(q.points.end(), t.points.begin(), t.points.end());
        q.weights.insert(q.weights.end(), t.weights.begin(), t.weights.end());
    }
    return q;
}

/// Gauss-Legendre rule on the segment a-b, exact for polynomials up to `degree` (<= 9).
inline QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int degree) {
    if (degree > 9) throw std::invalid_argument("edge_quadrature: degree > 9 unsupported");
    QuadratureRule q;
    double len = norm(b - a);
    if (len == 0.0) return q;
    int npts = std::max(1, (degree + 2) / 2);
    std::array<double, 5> xs{}, ws{};
    detail::gauss_legendre(npts, xs, ws);
    for (int i = 0; i < npts; ++i) {
        double t = 0.5 * (1.0 + xs[i]);
        q.points.push_back(a + t * (b - a));
        q.weights.push_back(0.5 * ws[i] * len);
    }
    return q;
}

}  // namespace ivem
