// Convergence-study front end: `run` executes a configured study and writes
// the CSV report, `dump-mesh` emits the cut-mesh text format, `verify` runs
// the structural property suite.

#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "ivem/cut_topology.hpp"
#include "ivem/study.hpp"
#include "ivem/verify.hpp"

namespace {

ivem::StudyConfig load_or_die(const std::string& path) { return ivem::load_config(path); }

/// Random interface perturbation for robustness sweeps: the circle center is
/// shifted by a uniform offset of magnitude at most 0.3 h of the finest level.
void perturb_center(ivem::StudyConfig& cfg, unsigned seed) {
    if (!cfg.circle_interface) return;
    int n_max = 2;
    for (int n : cfg.mesh_levels) n_max = std::max(n_max, n);
    double h = std::sqrt(2.0) * (cfg.domain.hi.x - cfg.domain.lo.x) / n_max;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        ivem::Vec2 d{u(rng), u(rng)};
        if (ivem::norm(d) <= 1.0) {
            cfg.center += 0.3 * h * d;
            return;
        }
    }
}

int run_command(const std::string& config_path, const std::string& out_override,
                bool plot_data, int seed, const std::string& dump_solution) {
    ivem::StudyConfig cfg = load_or_die(config_path);
    if (!out_override.empty()) cfg.output = out_override;
    if (seed >= 0) perturb_center(cfg, static_cast<unsigned>(seed));

    ivem::ConvergenceReport rep = ivem::run_study(cfg);
    if (cfg.output.empty()) {
        ivem::write_csv(rep, std::cout);
    } else {
        std::ofstream os(cfg.output, std::ios::binary);
        if (!os) throw ivem::ConfigError("cannot open output file '" + cfg.output + "'");
        ivem::write_csv(rep, os);
    }
    if (plot_data) {
        std::string path = cfg.output.empty() ? "study.plot" : cfg.output + ".plot";
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ivem::ConfigError("cannot open plot file '" + path + "'");
        ivem::write_plot_data(rep, os);
    }
    if (!dump_solution.empty()) {
        std::ofstream os(dump_solution, std::ios::binary);
        if (!os)
            throw ivem::ConfigError("cannot open solution file '" + dump_solution + "'");
        ivem::dump_dof_vector(ivem::solve_level_dofs(cfg, cfg.mesh_levels.back()), os);
    }
    return 0;
}

int dump_mesh_command(const std::string& config_path, int level,
                      const std::string& out_override) {
    ivem::StudyConfig cfg = load_or_die(config_path);
    if (level < 0 || level >= static_cast<int>(cfg.mesh_levels.size()))
        throw ivem::ConfigError("level index out of range");
    ivem::CutMesh cm = ivem::build_cut_mesh(
        ivem::build_uniform_mesh(cfg.domain, cfg.mesh_levels[level]), cfg.level_set());
    if (out_override.empty()) {
        ivem::dump_mesh(cm, std::cout);
    } else {
        std::ofstream os(out_override, std::ios::binary);
        if (!os) throw ivem::ConfigError("cannot open output file '" + out_override + "'");
        ivem::dump_mesh(cm, os);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Immersed virtual element solver for H1 and H(curl) interface problems"};
    app.require_subcommand(1);

    std::string config_path, config_flag, out_path, dump_solution;
    bool plot_data = false;
    int seed = -1;
    int level = 0;

    CLI::App* run = app.add_subcommand("run", "run a convergence study");
    run->add_option("CONFIG", config_path, "study config (JSON)");
    run->add_option("--config", config_flag, "study config (JSON)");
    run->add_option("--out", out_path, "output CSV path (overrides the config)");
    run->add_flag("--plot-data", plot_data, "also emit (log h, log error) pairs");
    run->add_option("--seed", seed, "perturb the interface randomly (robustness sweeps)");
    run->add_option("--dump-solution", dump_solution,
                    "write the finest-level solution DoF vector (flat text)");

    CLI::App* dump = app.add_subcommand("dump-mesh", "emit the cut-mesh text dump");
    dump->add_option("CONFIG", config_path, "study config (JSON)")->required();
    dump->add_option("LEVEL", level, "mesh level index")->required();
    dump->add_option("--out", out_path, "output path (defaults to stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run the structural property suite");
    verify->add_option("--seed", seed, "seed of the random sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            if (config_path.empty()) config_path = config_flag;
            if (config_path.empty()) throw ivem::ConfigError("missing config path");
            return run_command(config_path, out_path, plot_data, seed, dump_solution);
        }
        if (app.got_subcommand(dump)) return dump_mesh_command(config_path, level, out_path);
        if (app.got_subcommand(verify)) {
            unsigned s = seed >= 0 ? static_cast<unsigned>(seed) : 20240815u;
            bool ok = ivem::print_structural_suite(std::cout, s);
            return ok ? 0 : 2;
        }
    } catch (const ivem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const ivem::numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
