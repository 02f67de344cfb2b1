#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivem/errors.hpp"

namespace ivem {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StudyConfig {
    enum class Problem { H1, HCurl };

    Problem problem = Problem::H1;
    Rect domain{{0.0, 0.0}, {1.0, 1.0}};
    bool circle_interface = true;
    Vec2 center{0.5, 0.5};
    double radius = 0.3;
    Vec2 line_point{0.5, 0.5};
    Vec2 line_normal{0.0, 1.0};
    CoefficientPair coef;
    std::string case_name = "circle";
    std::vector<int> mesh_levels;
    int volume_degree = 4;
    int edge_degree = 5;
    double solver_tol = 1e-10;
    StabilizationVariant stabilization = StabilizationVariant::O1;
    std::string output;

    LevelSetInterface level_set() const {
        return circle_interface ? LevelSetInterface::circle(center, radius)
                                : LevelSetInterface::line(line_point, line_normal);
    }

    ManufacturedH1 manufactured_h1() const {
        if (case_name == "circle") {
            if (!circle_interface) throw ConfigError("case 'circle' needs a circle interface");
            return h1_circle_solution(center, radius, coef);
        }
        if (case_name == "linear") return h1_linear_solution(coef);
        if (case_name == "line_kink") {
            if (circle_interface) throw ConfigError("case 'line_kink' needs a line interface");
            return h1_line_kink_solution(line_point, line_normal, coef);
        }
        throw ConfigError("unknown h1 case '" + case_name + "'");
    }

    ManufacturedCurl manufactured_curl() const {
        if (case_name == "rotational") {
            if (!circle_interface)
                throw ConfigError("case 'rotational' needs a circle interface");
            return curl_rotational_solution(center, radius, coef);
        }
        if (case_name == "gradient") {
            if (!circle_interface) throw ConfigError("case 'gradient' needs a circle interface");
            return curl_gradient_solution(center, radius, coef);
        }
        if (case_name == "constant") return curl_constant_solution(coef);
        if (case_name == "line_kink") {
            if (circle_interface) throw ConfigError("case 'line_kink' needs a line interface");
            return curl_line_kink_solution(line_point, line_normal, coef);
        }
        throw ConfigError("unknown hcurl case '" + case_name + "'");
    }
};

namespace detail {

inline Vec2 parse_vec2(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("field '" + field + "' must be a 2-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& context) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + context);
    }
}

}  // namespace detail

inline StudyConfig parse_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"problem", "domain", "interface", "beta_plus", "beta_minus", "alpha_plus",
         "alpha_minus", "case", "mesh", "volume_degree", "edge_degree", "solver_tol",
         "stabilization", "output"},
        "config");
    StudyConfig c;
    for (const char* req : {"problem", "interface", "case", "mesh", "beta_plus", "beta_minus"})
        if (!j.contains(req)) throw ConfigError(std::string("missing field '") + req + "'");

    std::string prob = j["problem"].get<std::string>();
    if (prob == "h1")
        c.problem = StudyConfig::Problem::H1;
    else if (prob == "hcurl")
        c.problem = StudyConfig::Problem::HCurl;
    else
        throw ConfigError("field 'problem' must be 'h1' or 'hcurl'");

    if (j.contains("domain")) {
        const auto& d = j["domain"];
        if (!d.is_array() || d.size() != 4)
            throw ConfigError("field 'domain' must be [x0, y0, x1, y1]");
        c.domain = {{d[0].get<double>(), d[1].get<double>()},
                    {d[2].get<double>(), d[3].get<double>()}};
    }

    const auto& itf = j["interface"];
    detail::reject_unknown_keys(itf, {"circle", "line"}, "interface");
    if (itf.contains("circle")) {
        const auto& cj = itf["circle"];
        detail::reject_unknown_keys(cj, {"center", "radius"}, "interface.circle");
        c.circle_interface = true;
        c.center = detail::parse_vec2(cj.at("center"), "interface.circle.center");
        c.radius = cj.at("radius").get<double>();
        if (c.radius <= 0.0) throw ConfigError("interface.circle.radius must be positive");
    } else if (itf.contains("line")) {
        const auto& lj = itf["line"];
        detail::reject_unknown_keys(lj, {"point", "normal"}, "interface.line");
        c.circle_interface = false;
        c.line_point = detail::parse_vec2(lj.at("point"), "interface.line.point");
        c.line_normal = detail::parse_vec2(lj.at("normal"), "interface.line.normal");
    } else {
        throw ConfigError("field 'interface' must contain 'circle' or 'line'");
    }

    double bp = j["beta_plus"].get<double>();
    double bm = j["beta_minus"].get<double>();
    double ap = j.value("alpha_plus", 1.0);
    double am = j.value("alpha_minus", 1.0);
    if (bp <= 0.0 || bm <= 0.0 || ap <= 0.0 || am <= 0.0)
        throw ConfigError("coefficients must be positive");
    c.coef = CoefficientPair(bp, bm, ap, am);

    c.case_name = j["case"].get<std::string>();
    for (const auto& n : j["mesh"]) {
        int v = n.get<int>();
        if (v < 2) throw ConfigError("field 'mesh' entries must be >= 2");
        c.mesh_levels.push_back(v);
    }
    if (c.mesh_levels.empty()) throw ConfigError("field 'mesh' must not be empty");

    c.volume_degree = j.value("volume_degree", 4);
    c.edge_degree = j.value("edge_degree", 5);
    if (c.volume_degree < 1 || c.volume_degree > 6)
        throw ConfigError("field 'volume_degree' must be in 1..6");
    if (c.edge_degree < 1 || c.edge_degree > 9)
        throw ConfigError("field 'edge_degree' must be in 1..9");
    c.solver_tol = j.value("solver_tol", 1e-10);
    if (!(c.solver_tol > 0.0)) throw ConfigError("field 'solver_tol' must be positive");

    std::string stab = j.value("stabilization", std::string("O1"));
    if (stab == "O1")
        c.stabilization = StabilizationVariant::O1;
    else if (stab == "sqrt_h")
        c.stabilization = StabilizationVariant::SqrtH;
    else
        throw ConfigError("field 'stabilization' must be 'O1' or 'sqrt_h'");
    if (c.problem == StudyConfig::Problem::H1 && c.stabilization != StabilizationVariant::O1)
        throw ConfigError("stabilization 'sqrt_h' is an hcurl-only experiment");

    c.output = j.value("output", std::string());

    // validate the case name eagerly so malformed configs fail before any run
    if (c.problem == StudyConfig::Problem::H1)
        c.manufactured_h1();
    else
        c.manufactured_curl();
    return c;
}

inline StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return parse_config(j);
}

struct StudyLevel {
    int n = 0;
    double h = 0.0;
    int ndof = 0;
    ErrorRecord err;
    int cg_iters = 0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<StudyLevel> levels;

    /// Empirical order between consecutive levels, from the actual h ratio.
    static double eoc(double e_prev, double e_cur, double h_prev, double h_cur) {
        return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
    }
};

inline StudyLevel run_level(const StudyConfig& cfg, int n) {
    auto t0 = std::chrono::steady_clock::now();
    StudyLevel lvl;
    lvl.n = n;

    CutMesh cm = build_cut_mesh(build_uniform_mesh(cfg.domain, n), cfg.level_set());
    lvl.h = cm.mesh.h;
    DofMaps dm = build_dof_maps(cm);

    if (cfg.problem == StudyConfig::Problem::H1) {
        ManufacturedH1 exact = cfg.manufactured_h1();
        H1Operators ops = H1Operators::build(cm, cfg.coef);
        GlobalSystem sys =
            assemble_h1(cm, dm, cfg.coef, exact.source, exact.value, ops, cfg.volume_degree);
        SchemeSolution sol = solve_system(sys, cfg.solver_tol);
        lvl.ndof = dm.nodal.n_dofs;
        lvl.cg_iters = sol.cg_iterations;
        lvl.err = compute_errors_h1(cm, dm, sys, ops, sol.dofs, exact, cfg.volume_degree);
    } else {
        ManufacturedCurl exact = cfg.manufactured_curl();
        CurlOperators ops = CurlOperators::build(cm, cfg.coef);
        GlobalSystem sys = assemble_hcurl(cm, dm, cfg.coef, exact.source, exact.value, ops,
                                          cfg.stabilization, cfg.volume_degree,
                                          cfg.edge_degree);
        SchemeSolution sol = solve_system(sys, cfg.solver_tol);
        lvl.ndof = dm.edge.n_dofs;
        lvl.cg_iters = sol.cg_iterations;
        lvl.err = compute_errors_curl(cm, dm, sys, ops, sol.dofs, exact, cfg.volume_degree,
                                      cfg.edge_degree);
    }
    lvl.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return lvl;
}

/// Solution DoF vector of one level, for external plotting alongside the mesh
/// dump.
inline std::vector<double> solve_level_dofs(const StudyConfig& cfg, int n) {
    CutMesh cm = build_cut_mesh(build_uniform_mesh(cfg.domain, n), cfg.level_set());
    DofMaps dm = build_dof_maps(cm);
    if (cfg.problem == StudyConfig::Problem::H1) {
        ManufacturedH1 exact = cfg.manufactured_h1();
        H1Operators ops = H1Operators::build(cm, cfg.coef);
        GlobalSystem sys =
            assemble_h1(cm, dm, cfg.coef, exact.source, exact.value, ops, cfg.volume_degree);
        return solve_system(sys, cfg.solver_tol).dofs;
    }
    ManufacturedCurl exact = cfg.manufactured_curl();
    CurlOperators ops = CurlOperators::build(cm, cfg.coef);
    GlobalSystem sys = assemble_hcurl(cm, dm, cfg.coef, exact.source, exact.value, ops,
                                      cfg.stabilization, cfg.volume_degree, cfg.edge_degree);
    return solve_system(sys, cfg.solver_tol).dofs;
}

inline ConvergenceReport run_study(const StudyConfig& cfg) {
    ConvergenceReport rep;
    for (int n : cfg.mesh_levels) {
        try {
            rep.levels.push_back(run_level(cfg, n));
        } catch (const numerical_failure& e) {
            throw numerical_failure("level n=" + std::to_string(n) + ": " + e.what());
        } catch (const assumption_violation& e) {
            throw assumption_violation("level n=" + std::to_string(n) + ": " + e.what());
        } catch (const geometry_error& e) {
            throw geometry_error("level n=" + std::to_string(n) + ": " + e.what());
        }
    }
    return rep;
}

/// CSV with the fixed header; the h1_proj column carries the curl error for
/// hcurl studies. EOC fields stay empty on the first level.
inline void write_csv(const ConvergenceReport& rep, std::ostream& os) {
    os << "h,ndof,energy_dof,l2_proj,h1_proj,eoc_energy,eoc_l2,eoc_h1,cg_iters,seconds\n";
    char buf[360];
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const StudyLevel& l = rep.levels[i];
        std::string eoc_e, eoc_l, eoc_h;
        if (i > 0) {
            const StudyLevel& p = rep.levels[i - 1];
            char e[48];
            std::snprintf(e, sizeof e, "%.12e",
                          ConvergenceReport::eoc(p.err.energy_dof, l.err.energy_dof, p.h, l.h));
            eoc_e = e;
            std::snprintf(e, sizeof e, "%.12e",
                          ConvergenceReport::eoc(p.err.l2_proj, l.err.l2_proj, p.h, l.h));
            eoc_l = e;
            std::snprintf(e, sizeof e, "%.12e",
                          ConvergenceReport::eoc(p.err.deriv_proj, l.err.deriv_proj, p.h, l.h));
            eoc_h = e;
        }
        std::snprintf(buf, sizeof buf, "%.12e,%d,%.12e,%.12e,%.12e,%s,%s,%s,%d,%.12e\n", l.h,
                      l.ndof, l.err.energy_dof, l.err.l2_proj, l.err.deriv_proj, eoc_e.c_str(),
                      eoc_l.c_str(), eoc_h.c_str(), l.cg_iters, l.seconds);
        os << buf;
    }
}

/// (log h, log error) pairs for external plotting.
inline void write_plot_data(const ConvergenceReport& rep, std::ostream& os) {
    os << "# log_h log_energy_dof log_l2_proj log_h1_proj\n";
    char buf[200];
    for (const StudyLevel& l : rep.levels) {
        std::snprintf(buf, sizeof buf, "%.12e %.12e %.12e %.12e\n", std::log(l.h),
                      std::log(l.err.energy_dof), std::log(l.err.l2_proj),
                      std::log(l.err.deriv_proj));
        os << buf;
    }
}

}  // namespace ivem
