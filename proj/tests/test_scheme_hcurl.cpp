#include <doctest.h>

#include <random>

#include "ivem/errors.hpp"
#include "ivem/scheme_hcurl.hpp"
#include "ivem/verify.hpp"

using namespace ivem;

namespace {
const Vec2 kCenter{0.5 + 0.01 * std::sqrt(2.0), 0.5 + 0.01 * std::sqrt(3.0)};

CutTopology reference_cut() {
    BackgroundMesh mesh = single_triangle_mesh({0, 0}, {1, 0}, {0, 1});
    return compute_cut(mesh, 0, LevelSetInterface::line({0.0, 0.4}, {0.15, 1.0}));
}

std::vector<double> field_dofs(const CutTopology& cut, const Vec2& vm, const JumpMatrix& M) {
    Vec2 vp = M.apply(vm);
    std::vector<double> d;
    for (const SubEdge& se : cut.sub_edges) {
        Vec2 tau = (cut.nodes[se.b].pos - cut.nodes[se.a].pos) / se.length;
        d.push_back(se.orient * dot(se.region > 0 ? vp : vm, tau));
    }
    return d;
}
}  // namespace

TEST_CASE("local curl matrix: symmetry and the constant-field identity") {
    CutTopology cut = reference_cut();
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);
    CurlProjectionOperator op = build_curl_projection(cut, coef);
    LocalSystemCurl ls = local_curl_matrix(cut, coef, op);
    const std::size_t N = cut.sub_edges.size();

    double amax = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) amax = std::max(amax, std::abs(ls.A[i][j]));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            CHECK(std::abs(ls.A[i][j] - ls.A[j][i]) <= 1e-14 * amax);

    // constant IFE field: curl and stabilization drop out, only the exact
    // weighted mass survives
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec2 vm{u(rng), u(rng)};
        Vec2 vp = op.M.apply(vm);
        std::vector<double> d = field_dofs(cut, vm, op.M);
        double q = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) q += d[i] * ls.A[i][j] * d[j];
        double exact = coef.beta_plus * cut.area_plus * dot(vp, vp) +
                       coef.beta_minus * cut.area_minus * dot(vm, vm);
        CHECK(q == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("uncut elements get the exact edge-element matrices") {
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 4),
                                LevelSetInterface::from_callable([](const Vec2&) { return 1.0; }));
    DofMaps dm = build_dof_maps(cm);
    CoefficientPair coef(3.0, 3.0, 2.0, 2.0);
    LocalSystemCurl ls = local_curl_noninterface(cm, dm, 0, coef, nullptr);

    Nd0Element el = make_nd0_element(cm, dm, 0);
    // oracle: curl-curl + mass assembled by independent quadrature
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            QuadratureRule q =
                triangle_quadrature(el.p1.p[0], el.p1.p[1], el.p1.p[2], 4);
            double mass = q.integrate([&](const Vec2& x) {
                return coef.beta_plus * dot(el.basis(i, x), el.basis(j, x));
            });
            double cc = coef.alpha_plus * el.p1.area * el.basis_curl(i) * el.basis_curl(j);
            CHECK(ls.A[i][j] == doctest::Approx(cc + mass).epsilon(1e-12));
        }
}

TEST_CASE("local curl load: zero and constant-f oracle") {
    CutTopology cut = reference_cut();
    CoefficientPair coef(1.0, 1.0, 1.0, 1.0);
    CurlProjectionOperator op = build_curl_projection(cut, coef);
    LocalSystemCurl ls = local_curl_matrix(cut, coef, op);

    local_curl_load(cut, coef, [](const Vec2&, int) { return Vec2{0.0, 0.0}; }, op, ls);
    for (double v : ls.load) CHECK(v == 0.0);

    // constant f with uniform coefficients: load_i = f . integral of Pi phi_i
    Vec2 f{0.8, -0.6};
    local_curl_load(cut, coef, [f](const Vec2&, int) { return f; }, op, ls);
    for (std::size_t i = 0; i < cut.sub_edges.size(); ++i) {
        std::vector<double> unit(cut.sub_edges.size(), 0.0);
        unit[i] = 1.0;
        Vec2 vm = op.apply_minus(unit);
        Vec2 vp = op.M.apply(vm);
        double oracle = dot(f, cut.area_plus * vp + cut.area_minus * vm);
        CHECK(ls.load[i] == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("constant-field patch test with uniform coefficients") {
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 8),
                                LevelSetInterface::circle(kCenter, 0.3));
    DofMaps dm = build_dof_maps(cm);
    CoefficientPair coef(1.0, 1.0, 1.0, 1.0);
    ManufacturedCurl exact = curl_constant_solution(coef);
    CurlOperators ops = CurlOperators::build(cm, coef);

    GlobalSystem sys = assemble_hcurl(cm, dm, coef, exact.source, exact.value, ops);
    CHECK(sys.full.symmetry_defect() <= 1e-13);
    SchemeSolution sol = solve_system(sys, 1e-12);

    std::vector<double> ui = interpolate_edge(dm.edge, exact.value);
    for (int i = 0; i < dm.edge.n_dofs; ++i)
        CHECK(std::abs(sol.dofs[i] - ui[i]) <= 1e-9);
}

TEST_CASE("kinked constant field across a line interface is exact at contrast") {
    Vec2 p{0.0, 0.5314}, n{0.2, 1.0};
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 8),
                                LevelSetInterface::line(p, n));
    DofMaps dm = build_dof_maps(cm);
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);
    ManufacturedCurl exact = curl_line_kink_solution(p, n, coef);
    CurlOperators ops = CurlOperators::build(cm, coef);

    SchemeSolution sol =
        assemble_and_solve_curl(cm, dm, coef, exact.source, exact.value, ops,
                                StabilizationVariant::O1, 1e-12, /*use_dense=*/true);
    std::vector<double> ui = interpolate_edge(dm.edge, exact.value);
    double emax = 0.0;
    for (int i = 0; i < dm.edge.n_dofs; ++i)
        emax = std::max(emax, std::abs(sol.dofs[i] - ui[i]));
    CHECK(emax <= 1e-9);
}

TEST_CASE("zero data yields the zero solution") {
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 4),
                                LevelSetInterface::circle(kCenter, 0.3));
    DofMaps dm = build_dof_maps(cm);
    CoefficientPair coef(1.0, 10.0, 2.0, 1.0);
    CurlOperators ops = CurlOperators::build(cm, coef);
    SchemeSolution sol = assemble_and_solve_curl(
        cm, dm, coef, [](const Vec2&, int) { return Vec2{0.0, 0.0}; },
        [](const Vec2&, int) { return Vec2{0.0, 0.0}; }, ops);
    for (double v : sol.dofs) CHECK(v == 0.0);
}

TEST_CASE("alpha-weighted curls agree for every assembled local basis") {
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 8),
                                LevelSetInterface::circle(kCenter, 0.3));
    CoefficientPair coef(1.0, 10.0, 3.0, 1.0);
    for (const CutTopology& ct : cm.cuts) {
        for (std::size_t i = 0; i < ct.sub_edges.size(); ++i) {
            std::vector<double> unit(ct.sub_edges.size(), 0.0);
            unit[i] = 1.0;
            auto [cp, cmn] = curl_from_dofs(ct, coef, unit);
            double scale = std::max(std::abs(coef.alpha_plus * cp), 1e-30);
            CHECK(std::abs(coef.alpha_plus * cp - coef.alpha_minus * cmn) <= 1e-14 * scale);
        }
    }
}

TEST_CASE("rotational benchmark converges at first order in energy") {
    // coefficient tuples follow the declaration order (plus, minus):
    // alpha = (1, 2), beta = (1, 10)
    StudyConfig cfg;
    cfg.problem = StudyConfig::Problem::HCurl;
    cfg.circle_interface = true;
    cfg.center = kCenter;
    cfg.radius = 0.3;
    cfg.coef = CoefficientPair(1.0, 10.0, 1.0, 2.0);
    cfg.case_name = "rotational";

    StudyLevel l16 = run_level(cfg, 16);
    StudyLevel l32 = run_level(cfg, 32);
    CHECK(l16.err.energy_dof / l32.err.energy_dof >= 1.85);
    CHECK(l32.cg_iters > 0);

    // coercivity witness at n=8: the reduced system is Cholesky-factorizable
    CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, 8),
                                LevelSetInterface::circle(kCenter, 0.3));
    DofMaps dm = build_dof_maps(cm);
    ManufacturedCurl exact = curl_rotational_solution(kCenter, 0.3, cfg.coef);
    CurlOperators ops = CurlOperators::build(cm, cfg.coef);
    GlobalSystem sys = assemble_hcurl(cm, dm, cfg.coef, exact.source, exact.value, ops);
    CHECK_NOTHROW(dense_solve(sys.reduced));
}

TEST_CASE("curl energy of the gradient-field case decays at second order") {
    StudyConfig cfg;
    cfg.problem = StudyConfig::Problem::HCurl;
    cfg.circle_interface = true;
    cfg.center = kCenter;
    cfg.radius = 0.3;
    cfg.coef = CoefficientPair(10.0, 1.0, 2.0, 1.0);
    cfg.case_name = "gradient";

    double energies[2];
    int idx = 0;
    for (int n : {8, 16}) {
        CutMesh cm = build_cut_mesh(build_uniform_mesh({{0, 0}, {1, 1}}, n),
                                    LevelSetInterface::circle(kCenter, 0.3));
        DofMaps dm = build_dof_maps(cm);
        ManufacturedCurl exact = curl_gradient_solution(kCenter, 0.3, cfg.coef);
        CurlOperators ops = CurlOperators::build(cm, cfg.coef);
        SchemeSolution sol = assemble_and_solve_curl(cm, dm, cfg.coef, exact.source,
                                                     exact.value, ops,
                                                     StabilizationVariant::O1, 1e-11);
        energies[idx++] = discrete_curl_energy(cm, dm, cfg.coef, sol.dofs);
    }
    CHECK(std::log2(energies[0] / energies[1]) >= 1.9);
}
