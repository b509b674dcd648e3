#pragma once

#include "fecvx/adaptivity.hpp"

#include <map>
#include <string>

namespace fecvx {

/// Everything a `run` needs: problem selection, mesh, spaces, solver, outputs.
/// Key-value config files use the same field names; flags override file keys.
struct RunConfig {
    std::string problem = "monopolist";
    double c = 0.0;                        // monopolist quadratic cost
    std::string target = "tilted_square";  // projection target field
    std::string pattern = "crisscross";
    int n = 2;
    int disk_level = 2;
    int degree = 2;
    std::string mode = "adaptive";  // or "uniform"
    int iterations = 7;
    double theta = 0.7;
    bool include_boundary = true;
    bool include_bubbles = true;
    double tol = 1e-7;
    int max_iterations = 200;
    int verbosity = 0;
    std::string out_dir = "out";

    // custom-problem keys (problem = "custom")
    std::map<std::string, std::string> custom;

    void validate() const;  // throws std::invalid_argument on bad values
};

/// Parses a key = value config file (# comments). Throws on unreadable or
/// empty files and unknown keys.
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

BenchmarkProblem make_problem(const RunConfig& config);
LoopConfig make_loop_config(const RunConfig& config);

/// Runs the pipeline and writes, under out_dir: table.csv (one row per
/// iteration), per-iteration VTK snapshots and JSON solver reports, and the
/// final mesh dump + DOF CSV. Returns 0 on success, nonzero when the solver
/// failed (partial artifacts are kept). A lock file serializes runs per
/// output directory.
int run(const RunConfig& config);

/// Writes the SDP of the first iteration in SDPA sparse format.
void export_sdp(const RunConfig& config, const std::string& path);

/// Solves a standalone .dat-s file; writes a JSON result record to
/// `json_out` (or stdout when empty). Returns 0 iff optimal.
int solve_sdpa_path(const std::string& path, const SolverConfig& config,
                    const std::string& json_out);

/// check-convexity: per-test-function minimum eigenvalue table + verdict.
int check_convexity_files(const std::string& mesh_path, const std::string& coeffs_path,
                          double tol, bool include_boundary, bool include_bubbles);

}  // namespace fecvx
