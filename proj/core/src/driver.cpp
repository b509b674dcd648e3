#include "fecvx/driver.hpp"

#include "fecvx/meshio.hpp"
#include "fecvx/sdpa.hpp"
#include "fecvx/vtk.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fecvx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("not a boolean: " + v);
}

// Exclusive-create lock file, removed on destruction.
class DirLock {
  public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f)
            throw std::runtime_error("output directory is locked by another run: " +
                                     path_.string());
        std::fclose(f);
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

  private:
    fs::path path_;
};

json result_to_json(const SolverResult& r) {
    return json{{"status", to_string(r.status)},
                {"objective", r.primal_objective},
                {"dual_objective", r.dual_objective},
                {"iterations", r.iterations},
                {"residuals",
                 {{"primal", r.residuals.primal},
                  {"dual", r.residuals.dual},
                  {"gap", r.residuals.gap},
                  {"rel_gap", r.residuals.rel_gap}}}};
}

SdpProblem assemble_sdp(const BenchmarkProblem& problem, const Mesh& mesh,
                        const LoopConfig& cfg) {
    const QuadratureRule rule = triangle_rule_degree4();
    const FESpace space = build_trial_space(mesh, cfg.degree);
    TestBasisOptions opts;
    opts.include_boundary = cfg.include_boundary;
    opts.include_bubbles = cfg.include_bubbles;
    const TestBasis basis = build_test_basis(mesh, opts);
    const auto forms = assemble(space, basis, cfg.include_boundary);
    SdpProblem sdp = build_objective(space, rule, problem.objective);
    add_convexity_constraints(sdp, forms);
    for (const ConstraintSpec& c : problem.constraints)
        add_problem_constraints(sdp, space, rule, c);
    return sdp;
}

}  // namespace

void RunConfig::validate() const {
    if (degree != 1 && degree != 2)
        throw std::invalid_argument("config: degree must be 1 or 2");
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("config: theta must be in (0, 1]");
    if (mode != "uniform" && mode != "adaptive")
        throw std::invalid_argument("config: mode must be uniform or adaptive");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (disk_level < 0) throw std::invalid_argument("config: disk_level must be >= 0");
    if (tol <= 0.0) throw std::invalid_argument("config: tol must be positive");
    if (c < 0.0) throw std::invalid_argument("config: c must be >= 0");
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir must not be empty");
    if (problem != "monopolist" && problem != "projection-l2" && problem != "projection-h1" &&
        problem != "dirichlet" && problem != "custom")
        throw std::invalid_argument("config: unknown problem " + problem);
    pattern_from_string(pattern);
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "problem") config.problem = value;
    else if (key == "c") config.c = std::stod(value);
    else if (key == "target") config.target = value;
    else if (key == "pattern") config.pattern = value;
    else if (key == "n") config.n = std::stoi(value);
    else if (key == "disk_level") config.disk_level = std::stoi(value);
    else if (key == "degree") config.degree = std::stoi(value);
    else if (key == "mode") config.mode = value;
    else if (key == "iterations") config.iterations = std::stoi(value);
    else if (key == "theta") config.theta = std::stod(value);
    else if (key == "include_boundary") config.include_boundary = parse_bool(value);
    else if (key == "include_bubbles") config.include_bubbles = parse_bool(value);
    else if (key == "tol") config.tol = std::stod(value);
    else if (key == "max_iterations") config.max_iterations = std::stoi(value);
    else if (key == "verbosity") config.verbosity = std::stoi(value);
    else if (key == "out_dir" || key == "out") config.out_dir = value;
    else if (key.rfind("objective.", 0) == 0 || key == "constraints")
        config.custom[key] = value;
    else throw std::invalid_argument("config: unknown key " + key);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file " + path);
    RunConfig config;
    std::string line;
    int entries = 0;
    while (std::getline(is, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument("config: malformed line: " + line);
            continue;
        }
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        ++entries;
    }
    if (entries == 0) throw std::invalid_argument("config file is empty: " + path);
    return config;
}

BenchmarkProblem make_problem(const RunConfig& config) {
    config.validate();
    BenchmarkProblem p;
    if (config.problem == "monopolist") {
        p = monopolist(config.c);
    } else if (config.problem == "projection-l2") {
        p = projection(ProjectionNorm::L2, named_scalar_field(config.target));
    } else if (config.problem == "projection-h1") {
        p = projection(ProjectionNorm::H1, named_scalar_field(config.target),
                       named_gradient_field(config.target));
    } else if (config.problem == "dirichlet") {
        p = dirichlet_functional();
    } else {
        p.name = "custom";
        const auto get = [&](const std::string& key) -> std::string {
            const auto it = config.custom.find(key);
            return it == config.custom.end() ? std::string{} : it->second;
        };
        if (const auto s = get("objective.alpha"); !s.empty())
            p.objective.alpha = named_scalar_field(s);
        if (const auto s = get("objective.beta"); !s.empty())
            p.objective.beta = named_scalar_field(s);
        if (const auto s = get("objective.f"); !s.empty()) p.objective.f = named_scalar_field(s);
        if (const auto s = get("objective.gamma"); !s.empty()) {
            if (s == "minus_x")
                p.objective.gamma = [](const Vec2& x) { return Vec2(-x); };
            else if (s != "zero")
                throw std::invalid_argument("config: unknown gamma field " + s);
        }
        if (const auto s = get("objective.v2"); !s.empty()) p.objective.v2 = named_scalar_field(s);
        if (const auto s = get("objective.v1"); !s.empty())
            p.objective.grad_v1 = named_gradient_field(s);
        std::istringstream cs(get("constraints"));
        std::string item;
        while (std::getline(cs, item, ',')) {
            if (item.empty()) continue;
            if (item == "mean_zero") p.constraints.push_back(MeanZero{});
            else if (item == "point0") p.constraints.push_back(PointValue{Vec2(0, 0), 0.0});
            else if (item.rfind("gradient_box:", 0) == 0) {
                double lo, hi;
                if (std::sscanf(item.c_str(), "gradient_box:%lf:%lf", &lo, &hi) != 2)
                    throw std::invalid_argument("config: bad constraint " + item);
                p.constraints.push_back(GradientBox{Vec2(lo, lo), Vec2(hi, hi)});
            } else if (item.rfind("boundary_values:", 0) == 0) {
                p.constraints.push_back(BoundaryValues{named_scalar_field(item.substr(16))});
            } else {
                throw std::invalid_argument("config: unknown constraint " + item);
            }
        }
    }

    if (config.problem != "dirichlet") {
        p.domain.kind = DomainSpec::Kind::square_pattern;
        p.domain.pattern = pattern_from_string(config.pattern);
        p.domain.n = config.n;
    } else {
        p.domain.level = config.disk_level;
    }
    return p;
}

LoopConfig make_loop_config(const RunConfig& config) {
    LoopConfig lc;
    lc.mode = config.mode == "uniform" ? LoopConfig::Mode::uniform : LoopConfig::Mode::adaptive;
    lc.degree = config.degree;
    lc.iterations = config.iterations;
    lc.theta = config.theta;
    lc.include_boundary = config.include_boundary;
    lc.include_bubbles = config.include_bubbles;
    lc.solver.tol_primal = lc.solver.tol_dual = lc.solver.tol_gap = config.tol;
    lc.solver.max_iterations = config.max_iterations;
    lc.solver.verbosity = config.verbosity > 1 ? 1 : 0;
    return lc;
}

int run(const RunConfig& config) {
    config.validate();
    const BenchmarkProblem problem = make_problem(config);
    const LoopConfig loop = make_loop_config(config);

    fs::create_directories(config.out_dir);
    DirLock lock(config.out_dir);
    const fs::path out(config.out_dir);

    std::ofstream table(out / "table.csv");
    if (!table) throw std::runtime_error("cannot write table.csv");
    table << "iteration,elements,dofs,wall_seconds,l2_error,linf_error\n";

    const auto on_iteration = [&](const IterationRecord& rec, const IterationState& state) {
        table << rec.iteration << "," << rec.elements << "," << rec.dofs << ","
              << fmt6(rec.wall_seconds) << ",";
        if (rec.l2_error) table << fmt6(*rec.l2_error);
        table << ",";
        if (rec.linf_error) table << fmt6(*rec.linf_error);
        table << "\n";
        table.flush();

        // Vertex values of the solution for viewers.
        Eigen::VectorXd point_values(state.mesh.num_vertices());
        point_values = state.coeffs.head(state.mesh.num_vertices());
        const std::string stem = "iter_" + std::to_string(rec.iteration);
        write_vtk((out / (stem + ".vtk")).string(), state.mesh, point_values, "u",
                  state.indicators.eta, "eta");
        std::ofstream js(out / (stem + ".json"));
        js << result_to_json(state.solver).dump(2) << "\n";

        if (config.verbosity > 0)
            std::cout << "iter " << rec.iteration << ": " << rec.elements << " elements, "
                      << rec.dofs << " dofs, status " << to_string(rec.status)
                      << (rec.l2_error ? ", l2 " + fmt6(*rec.l2_error) : std::string{}) << "\n";

        if (rec.iteration + 1 == config.iterations ||
            rec.status != SolveStatus::optimal) {
            dump_mesh_file(state.mesh, (out / "final_mesh.txt").string());
            write_dof_csv(state.coeffs, (out / "final_coeffs.csv").string());
        }
    };

    try {
        run_loop(problem, loop, on_iteration);
    } catch (const AdaptiveRunFailure& f) {
        std::cerr << "run failed: " << f.what() << "\n";
        return 2;
    }
    return 0;
}

void export_sdp(const RunConfig& config, const std::string& path) {
    config.validate();
    const BenchmarkProblem problem = make_problem(config);
    const Mesh mesh = problem.domain.make_mesh();
    const SdpProblem sdp = assemble_sdp(problem, mesh, make_loop_config(config));
    write_sdpa_file(sdp, path);
}

int solve_sdpa_path(const std::string& path, const SolverConfig& config,
                    const std::string& json_out) {
    const SdpProblem sdp = read_sdpa_file(path);
    const ConeProgram cone = to_cone_program(sdp);
    const SolverResult result = solve(cone, config);
    const json j = result_to_json(result);
    if (json_out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(json_out);
        os << j.dump(2) << "\n";
    }
    return result.status == SolveStatus::optimal ? 0 : 2;
}

int check_convexity_files(const std::string& mesh_path, const std::string& coeffs_path,
                          double tol, bool include_boundary, bool include_bubbles) {
    const Mesh mesh = load_mesh_file(mesh_path);
    const Eigen::VectorXd coeffs = read_dof_csv(coeffs_path);

    int degree;
    if (coeffs.size() == mesh.num_vertices()) {
        degree = 1;
    } else if (coeffs.size() == mesh.num_vertices() + mesh.num_edges()) {
        degree = 2;
    } else {
        std::cerr << "coefficient count " << coeffs.size() << " matches neither P1 ("
                  << mesh.num_vertices() << ") nor P2 ("
                  << mesh.num_vertices() + mesh.num_edges() << ")\n";
        return 1;
    }

    const FESpace space = build_trial_space(mesh, degree);
    TestBasisOptions opts;
    opts.include_boundary = include_boundary;
    opts.include_bubbles = include_bubbles;
    const TestBasis basis = build_test_basis(mesh, opts);
    const auto forms = assemble(space, basis, include_boundary);
    const ConvexityReport rep = check_fe_convexity(forms, coeffs, tol);

    std::printf("%8s  %-10s  %8s  %14s\n", "test", "kind", "entity", "min_eig");
    for (std::size_t i = 0; i < forms.size(); ++i) {
        const TestFunction& f = basis.functions()[i];
        std::printf("%8d  %-10s  %8d  %14.6g\n", f.index,
                    f.kind == TestKind::vertex_hat ? "hat" : "bubble", f.entity,
                    rep.min_eigenvalues[i]);
    }
    std::printf("worst: test %d, min eigenvalue %.6g (tol %.6g)\n", rep.worst_test_index,
                rep.worst_min_eigenvalue, tol);
    std::printf("verdict: %s\n", rep.is_fe_convex ? "FE-convex" : "NOT FE-convex");
    return rep.is_fe_convex ? 0 : 3;
}

}  // namespace fecvx
