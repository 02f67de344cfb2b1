#include <doctest.h>

#include <random>

#include "ivem/ife_local.hpp"
#include "ivem/verify.hpp"

using namespace ivem;

namespace {

CutTopology reference_cut() {
    BackgroundMesh mesh = single_triangle_mesh({0, 0}, {1, 0}, {0, 1});
    return compute_cut(mesh, 0, LevelSetInterface::line({0.0, 0.4}, {0.1, 1.0}));
}

}  // namespace

TEST_CASE("jump matrix special cases") {
    JumpMatrix I = jump_matrix({0.6, 0.8}, 1.0);
    CHECK(I.m.a == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(I.m.c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(I.m.b) < 1e-15);

    JumpMatrix M = jump_matrix({1.0, 0.0}, 7.0);
    CHECK(M.m.a == doctest::Approx(7.0));
    CHECK(M.m.c == doctest::Approx(1.0));
    CHECK(std::abs(M.m.b) < 1e-15);
    CHECK(M.m.det() == doctest::Approx(7.0));

    double s = 1.0 / std::sqrt(2.0);
    JumpMatrix D = jump_matrix({s, s}, 10.0);
    Vec2 n{s, s}, t = rot90ccw(n);
    CHECK(norm(D.apply(n) - 10.0 * n) / 10.0 < 1e-12);
    CHECK(norm(D.apply(t) - t) < 1e-12);

    CHECK_THROWS_AS(jump_matrix({1.0, 1.0}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(jump_matrix({1.0, 0.0}, -1.0), std::invalid_argument);
}

TEST_CASE("jump matrix flux-continuity identity over random draws") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ex(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        Vec2 n = normalized({u(rng), u(rng) + 1e-3});
        double bp = std::pow(10.0, ex(rng)), bm = std::pow(10.0, ex(rng));
        JumpMatrix M = jump_matrix(n, bm / bp);
        Vec2 c{u(rng), u(rng)};
        double lhs = bp * dot(M.apply(c), n);
        double rhs = bm * dot(c, n);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), 1.0));
    }
}

TEST_CASE("h1 ife basis: constants, dimension, rho=1 degeneration") {
    CutTopology cut = reference_cut();
    CoefficientPair coef(2.0, 6.0);
    auto basis = h1_ife_basis(cut, coef);

    CHECK(basis[0].value({0.3, 0.3}, 1) == doctest::Approx(1.0));
    CHECK(basis[0].value({0.1, 0.8}, -1) == doctest::Approx(1.0));
    CHECK(norm(basis[0].grad(1)) == 0.0);
    CHECK(norm(basis[0].grad(-1)) == 0.0);

    // L2 Gram over the element is nonsingular: the span has dimension 3
    double G[3][3] = {};
    for (int region : {1, -1}) {
        QuadratureRule q =
            polygon_quadrature(region > 0 ? cut.sub_plus : cut.sub_minus, 4);
        for (std::size_t k = 0; k < q.points.size(); ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    G[i][j] += q.weights[k] * basis[i].value(q.points[k], region) *
                               basis[j].value(q.points[k], region);
    }
    double det = G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1]) -
                 G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0]) +
                 G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]);
    CHECK(det > 1e-10);

    // rho = 1: both pieces collapse to one linear polynomial
    auto p1 = h1_ife_basis(cut, CoefficientPair(3.0, 3.0));
    for (const auto& f : p1)
        for (const Vec2& x : {Vec2{0.1, 0.1}, Vec2{0.4, 0.5}, Vec2{0.05, 0.9}})
            CHECK(f.value(x, 1) == doctest::Approx(f.value(x, -1)).epsilon(1e-14));
}

TEST_CASE("curl ife basis spans dimension 3") {
    CutTopology cut = reference_cut();
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);
    auto basis = curl_ife_basis(cut, coef);

    double G[3][3] = {};
    for (int region : {1, -1}) {
        QuadratureRule q =
            polygon_quadrature(region > 0 ? cut.sub_plus : cut.sub_minus, 4);
        for (std::size_t k = 0; k < q.points.size(); ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    G[i][j] += q.weights[k] * dot(basis[i].value(q.points[k], region),
                                                  basis[j].value(q.points[k], region));
    }
    double det = G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1]) -
                 G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0]) +
                 G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]);
    CHECK(det > 1e-10);
    // report the conditioning through the minor ratio (all minors positive)
    CHECK(G[0][0] > 0.0);
    CHECK(G[0][0] * G[1][1] - G[0][1] * G[1][0] > 0.0);
}

TEST_CASE("h1 eval and grad piecewise formula") {
    CutTopology cut = reference_cut();
    JumpMatrix M = jump_matrix({1.0, 0.0}, 2.0);

    IfeH1Function constant{2.0, {0.0, 0.0}, cut.x_m, M};
    CHECK(constant.value({0.9, 0.2}, 1) == doctest::Approx(2.0));
    CHECK(constant.value({0.0, 0.0}, -1) == doctest::Approx(2.0));

    IfeH1Function kink{0.0, {1.0, 0.0}, cut.x_m, M};
    CHECK(norm(kink.grad(1) - Vec2{2.0, 0.0}) < 1e-15);
    CHECK(norm(kink.grad(-1) - Vec2{1.0, 0.0}) < 1e-15);
}

TEST_CASE("curl ife basis: curls and weighted continuity") {
    CutTopology cut = reference_cut();

    CoefficientPair uniform(1.0, 1.0, 1.0, 1.0);
    auto b1 = curl_ife_basis(cut, uniform);
    CHECK(b1[2].curl(1) == doctest::Approx(2.0));
    CHECK(b1[2].curl(-1) == doctest::Approx(2.0));

    CoefficientPair contrast(1.0, 1.0, 2.0, 1.0);
    auto b2 = curl_ife_basis(cut, contrast);
    CHECK(contrast.alpha_plus * b2[2].curl(1) == doctest::Approx(2.0));
    CHECK(contrast.alpha_minus * b2[2].curl(-1) == doctest::Approx(2.0));

    // c0 = 0 members are curl-free piecewise constants with continuous v.t
    for (int i : {0, 1}) {
        CHECK(b2[i].curl(1) == 0.0);
        CHECK(b2[i].curl(-1) == 0.0);
        Vec2 jump = b2[i].value(cut.x_m, 1) - b2[i].value(cut.x_m, -1);
        CHECK(std::abs(dot(jump, cut.t_bar)) < 1e-14);
    }
}

TEST_CASE("rotated potential: zero, uniform, and finite-difference curl") {
    CutTopology cut = reference_cut();

    CoefficientPair uniform(1.0, 1.0);
    IfeRotH1Function zero = rot_h1_potential({0.0, 0.0}, cut, uniform);
    CHECK(zero.value({0.3, 0.3}, 1) == doctest::Approx(0.0).epsilon(1e-15));

    // v = (1,0), beta = 1: phi = (y - y_m) + c0 on both sides, curl phi = v
    IfeRotH1Function phi = rot_h1_potential({1.0, 0.0}, cut, uniform);
    for (const Vec2& x : {Vec2{0.2, 0.1}, Vec2{0.1, 0.7}})
        CHECK(phi.value(x, cut.region_of(x)) ==
              doctest::Approx(x.y - cut.x_m.y + phi.c0).epsilon(1e-13));
    CHECK(norm(phi.curl(1) - Vec2{1.0, 0.0}) < 1e-15);
    CHECK(norm(phi.curl(-1) - Vec2{1.0, 0.0}) < 1e-15);

    // boundary mean of phi vanishes
    double mean = 0.0;
    for (const SubEdge& se : cut.sub_edges) {
        const Vec2& a = cut.nodes[se.a].pos;
        const Vec2& b = cut.nodes[se.b].pos;
        mean += 0.5 * se.length * (phi.value(a, se.region) + phi.value(b, se.region));
    }
    CHECK(std::abs(mean) < 1e-14);

    // rho = 5: finite-difference curl matches beta_h v per region
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CoefficientPair coef(1.0, 5.0);
    JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
    for (int trial = 0; trial < 10; ++trial) {
        Vec2 vm{u(rng), u(rng)};
        IfeRotH1Function p = rot_h1_potential(vm, cut, coef);
        double step = 1e-6 * cut.h_K;
        for (int region : {1, -1}) {
            Vec2 x = centroid(region > 0 ? cut.sub_plus : cut.sub_minus);
            double dphidy =
                (p.value({x.x, x.y + step}, region) - p.value({x.x, x.y - step}, region)) /
                (2.0 * step);
            double dphidx =
                (p.value({x.x + step, x.y}, region) - p.value({x.x - step, x.y}, region)) /
                (2.0 * step);
            Vec2 fd_curl{dphidy, -dphidx};
            Vec2 expect = coef.beta(region) * (region > 0 ? M.apply(vm) : vm);
            CHECK(norm(fd_curl - expect) < 1e-8 * std::max(1.0, norm(expect)));
        }
    }

    // fields violating the M-relation are rejected
    CHECK_THROWS_AS(rot_h1_potential({1.0, 0.0}, {5.0, 5.0}, cut, coef),
                    std::invalid_argument);
}

TEST_CASE("exact sequence report") {
    CutTopology cut = reference_cut();

    ExactSequenceReport uniform = verify_exact_sequence(cut, CoefficientPair(1.0, 1.0));
    CHECK(uniform.max_violation() <= 1e-14);

    ExactSequenceReport contrast =
        verify_exact_sequence(cut, CoefficientPair(1.0, 10.0, 5.0, 1.0));
    CHECK(contrast.max_violation() <= 1e-12);

    // gradient of the constant basis element is the zero member
    auto basis = h1_ife_basis(cut, CoefficientPair(1.0, 10.0));
    CHECK(norm(basis[0].grad(1)) == 0.0);
    CHECK(norm(basis[0].grad(-1)) == 0.0);

    std::mt19937 rng(17);
    for (int i = 0; i < 20; ++i) {
        CutTopology rc = random_cut(rng);
        ExactSequenceReport rep = verify_exact_sequence(rc, CoefficientPair(1.0, 10.0, 5.0, 1.0));
        CHECK(rep.max_violation() <= 1e-12);
    }
}

TEST_CASE("degeneration to standard elements as the contrast vanishes") {
    CutTopology cut = reference_cut();
    double prev = 1e30;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
        CoefficientPair coef(1.0, 1.0 + eps);
        JumpMatrix M = jump_matrix(cut.n_bar, coef.rho());
        double dev = std::abs(M.m.a - 1.0) + std::abs(M.m.b) + std::abs(M.m.c - 1.0);
        CHECK(dev < prev);
        CHECK(dev <= 2.0 * eps);
        prev = dev;
    }
}
