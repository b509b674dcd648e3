// Command-line front end: run / adapt / check-convexity / solve / export-sdp.

#include "fecvx/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_run_options(CLI::App* cmd, fecvx::RunConfig& config, std::string& config_path) {
    cmd->add_option("--config", config_path, "key = value config file (flags override)");
    cmd->add_option("--problem", config.problem,
                    "monopolist | projection-l2 | projection-h1 | dirichlet | custom");
    cmd->add_option("--c", config.c, "monopolist quadratic transport cost");
    cmd->add_option("--target", config.target, "projection target field");
    cmd->add_option("--pattern", config.pattern,
                    "diagonal | chevron | crisscross | union_jack");
    cmd->add_option("--n", config.n, "subdivisions per side of the initial mesh");
    cmd->add_option("--disk-level", config.disk_level, "initial disk refinement level");
    cmd->add_option("--degree", config.degree, "trial space degree (1 or 2)");
    cmd->add_option("--mode", config.mode, "uniform | adaptive");
    cmd->add_option("--iters,--iterations", config.iterations, "loop iterations");
    cmd->add_option("--theta", config.theta, "marking threshold");
    cmd->add_flag("--no-boundary-tests{false},!--boundary-tests", config.include_boundary,
                  "drop boundary test functions");
    cmd->add_flag("--no-bubbles{false},!--bubbles", config.include_bubbles,
                  "drop edge-bubble test functions");
    cmd->add_option("--tol", config.tol, "solver tolerance");
    cmd->add_option("--solver-iters", config.max_iterations, "solver iteration limit");
    cmd->add_option("-v,--verbosity", config.verbosity, "0..2");
    cmd->add_option("-o,--out", config.out_dir, "output directory");
}

fecvx::RunConfig resolve_config(const CLI::App* cmd, const fecvx::RunConfig& flags,
                                const std::string& config_path) {
    if (config_path.empty()) return flags;
    fecvx::RunConfig config = fecvx::parse_config_file(config_path);
    // Re-apply any flag the user passed explicitly on top of the file.
    const fecvx::RunConfig defaults;
    const auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (passed("--problem")) config.problem = flags.problem;
    if (passed("--c")) config.c = flags.c;
    if (passed("--target")) config.target = flags.target;
    if (passed("--pattern")) config.pattern = flags.pattern;
    if (passed("--n")) config.n = flags.n;
    if (passed("--disk-level")) config.disk_level = flags.disk_level;
    if (passed("--degree")) config.degree = flags.degree;
    if (passed("--mode")) config.mode = flags.mode;
    if (passed("--iters")) config.iterations = flags.iterations;
    if (passed("--theta")) config.theta = flags.theta;
    if (passed("--tol")) config.tol = flags.tol;
    if (passed("--solver-iters")) config.max_iterations = flags.max_iterations;
    if (passed("--verbosity")) config.verbosity = flags.verbosity;
    if (passed("--out")) config.out_dir = flags.out_dir;
    if (flags.include_boundary != defaults.include_boundary)
        config.include_boundary = flags.include_boundary;
    if (flags.include_bubbles != defaults.include_bubbles)
        config.include_bubbles = flags.include_bubbles;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element minimization over convex functions"};
    app.require_subcommand(1);

    fecvx::RunConfig run_config, adapt_config;
    std::string run_config_path, adapt_config_path;

    CLI::App* cmd_run = app.add_subcommand("run", "run the solve/estimate/mark/refine pipeline");
    add_run_options(cmd_run, run_config, run_config_path);

    CLI::App* cmd_adapt = app.add_subcommand("adapt", "alias for run --mode adaptive");
    add_run_options(cmd_adapt, adapt_config, adapt_config_path);

    fecvx::RunConfig export_config;
    std::string export_config_path, export_path = "problem.dat-s";
    CLI::App* cmd_export = app.add_subcommand("export-sdp", "write the SDP in SDPA sparse format");
    add_run_options(cmd_export, export_config, export_config_path);
    cmd_export->add_option("--sdpa,--file", export_path, "output .dat-s path");

    std::string solve_path, solve_json;
    double solve_tol = 1e-7;
    int solve_iters = 200;
    int solve_verbosity = 0;
    CLI::App* cmd_solve = app.add_subcommand("solve", "solve a .dat-s file");
    cmd_solve->add_option("file", solve_path, "SDPA sparse input")->required();
    cmd_solve->add_option("--json", solve_json, "write the result record here");
    cmd_solve->add_option("--tol", solve_tol, "solver tolerance");
    cmd_solve->add_option("--solver-iters", solve_iters, "iteration limit");
    cmd_solve->add_option("-v,--verbosity", solve_verbosity, "0..1");

    std::string cc_mesh, cc_coeffs;
    double cc_tol = 1e-9;
    bool cc_boundary = true, cc_bubbles = true;
    CLI::App* cmd_cc =
        app.add_subcommand("check-convexity", "FE-convexity verdict for a coefficient vector");
    cmd_cc->add_option("--mesh", cc_mesh, "mesh dump file")->required();
    cmd_cc->add_option("--coeffs", cc_coeffs, "flat DOF CSV")->required();
    cmd_cc->add_option("--tol", cc_tol, "eigenvalue tolerance");
    cmd_cc->add_flag("--no-boundary-tests{false},!--boundary-tests", cc_boundary,
                     "drop boundary test functions");
    cmd_cc->add_flag("--no-bubbles{false},!--bubbles", cc_bubbles,
                     "drop edge-bubble test functions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed())
            return fecvx::run(resolve_config(cmd_run, run_config, run_config_path));
        if (cmd_adapt->parsed()) {
            fecvx::RunConfig config = resolve_config(cmd_adapt, adapt_config, adapt_config_path);
            config.mode = "adaptive";
            return fecvx::run(config);
        }
        if (cmd_export->parsed()) {
            fecvx::export_sdp(resolve_config(cmd_export, export_config, export_config_path),
                              export_path);
            return 0;
        }
        if (cmd_solve->parsed()) {
            fecvx::SolverConfig sc;
            sc.tol_primal = sc.tol_dual = sc.tol_gap = solve_tol;
            sc.max_iterations = solve_iters;
            sc.verbosity = solve_verbosity;
            return fecvx::solve_sdpa_path(solve_path, sc, solve_json);
        }
        if (cmd_cc->parsed())
            return fecvx::check_convexity_files(cc_mesh, cc_coeffs, cc_tol, cc_boundary,
                                                cc_bubbles);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
