/*
 * eoc_solver_main.cpp
 * Command-line front end: mesh dumps, single solves, campaigns, property
 * checks. Exit codes: 0 success, 1 solver/check failure, 2 config error.
 */
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eoc/checks.hpp"
#include "eoc/driver.hpp"

namespace {

using namespace eoc;

struct CliOptions {
    int example = 2;
    int level = 2;
    std::string algo = "ihadmm";
    double sigma = 0.0;
    double tau = 0.0;
    double tol = 0.0;   // 0: per-algorithm default
    double tol2 = 0.0;  // 0: 1e-11
    int maxit = 0;
    int maxit_pdas = 0;
    int threads = 0;
    unsigned seed = 20240817;
    bool json_line = false;
    std::string out_dir;
    std::string config_path;
    double solve_tol = 0.0;
    std::vector<int> levels;
    std::vector<std::string> algos;
};

ProblemSpec spec_for(int example, int level) {
    if (example == 1) return example1_spec(level);
    return example2_spec(level);
}

int run_mesh(const CliOptions& opt) {
    const Mesh mesh = opt.example == 1 ? unit_disk_mesh(opt.level)
                                       : unit_square_mesh(1 << opt.level);
    std::cout << "mesh example=" << opt.example << " level=" << opt.level
              << " nodes=" << mesh.nodes.size()
              << " triangles=" << mesh.triangles.size()
              << " interior=" << mesh.n_interior << " h=" << mesh.h
              << " regularity=" << shape_regularity(mesh) << "\n";
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        const std::string path = opt.out_dir + "/mesh_ex" +
                                 std::to_string(opt.example) + "_lvl" +
                                 std::to_string(opt.level) + ".txt";
        std::ofstream os(path);
        dump_mesh(mesh, os);
        std::cout << "wrote " << path << "\n";
    }
    if (opt.json_line) {
        nlohmann::json j{{"example", opt.example},
                         {"level", opt.level},
                         {"nodes", mesh.nodes.size()},
                         {"triangles", mesh.triangles.size()},
                         {"interior", mesh.n_interior},
                         {"h", mesh.h}};
        std::cout << j.dump() << "\n";
    }
    return 0;
}

int run_solve(const CliOptions& opt) {
    const ProblemSpec spec = spec_for(opt.example, opt.level);
    const std::string out = opt.out_dir;
    if (!out.empty()) std::filesystem::create_directories(out);
    const std::string base = out.empty() ? std::string()
                                         : out + "/trace_ex" +
                                               std::to_string(opt.example) +
                                               "_lvl" + std::to_string(opt.level) +
                                               "_" + opt.algo;

    int iters = 0, iters2 = -1;
    double eta = 0.0, time_s = 0.0;
    bool converged = false;
    std::string message;

    if (opt.algo == "two-phase") {
        AdmmConfig p1 = default_phase1_config();
        if (opt.tol > 0.0) p1.tol = opt.tol;
        if (opt.sigma > 0.0) p1.sigma = opt.sigma;
        if (opt.tau > 0.0) p1.tau = opt.tau;
        if (opt.maxit > 0) p1.maxit = opt.maxit;
        PdasConfig p2;
        if (opt.tol2 > 0.0) p2.tol = opt.tol2;
        if (opt.maxit_pdas > 0) p2.maxit = opt.maxit_pdas;
        const TwoPhaseResult r = two_phase_solve(spec, p1, p2);
        iters = static_cast<int>(r.trace.phase1.iterations.size());
        iters2 = static_cast<int>(r.trace.phase2.iterations.size());
        eta = eta_pdas(r.state, spec).eta_max;
        time_s = r.trace.phase1.total_time_s;
        converged = r.converged;
        message = r.message;
        if (!base.empty()) {
            write_admm_trace_csv(base + "_admm.csv", r.trace.phase1);
            write_pdas_trace_csv(base + "_pdas.csv", r.trace.phase2);
        }
    } else if (opt.algo == "pdas") {
        PdasConfig cfg;
        cfg.tol = opt.tol2 > 0.0 ? opt.tol2 : (opt.tol > 0.0 ? opt.tol : cfg.tol);
        if (opt.maxit > 0) cfg.maxit = opt.maxit;
        cfg.line_search = true;
        const PdasResult r = pdas_globalized(spec, cfg, zero_state(spec.fem.n));
        iters = static_cast<int>(r.trace.iterations.size());
        eta = eta_pdas(r.state, spec).eta_max;
        time_s = r.trace.iterations.empty() ? 0.0 : r.trace.iterations.back().time_s;
        converged = r.trace.converged;
        message = r.trace.message;
        if (!base.empty()) write_pdas_trace_csv(base + ".csv", r.trace);
    } else {
        AdmmVariant variant = AdmmVariant::ihadmm;
        if (opt.algo == "classical") variant = AdmmVariant::classical;
        if (opt.algo == "ladmm") variant = AdmmVariant::ladmm;
        AdmmConfig cfg = make_admm_config(variant);
        if (opt.tol > 0.0) cfg.tol = opt.tol;
        if (opt.sigma > 0.0) cfg.sigma = opt.sigma;
        if (opt.tau > 0.0) cfg.tau = opt.tau;
        if (opt.maxit > 0) cfg.maxit = opt.maxit;
        AdmmResult r;
        switch (variant) {
            case AdmmVariant::ihadmm:
                r = ihadmm_solve(spec, cfg, zero_state(spec.fem.n));
                break;
            case AdmmVariant::classical:
                r = classical_admm_solve(spec, cfg, zero_state(spec.fem.n));
                break;
            case AdmmVariant::ladmm:
                r = ladmm_solve(spec, cfg, zero_state(spec.fem.n));
                break;
        }
        iters = static_cast<int>(r.trace.iterations.size());
        eta = eta_admm(r.state, spec).eta_max;
        time_s = r.trace.total_time_s;
        converged = r.trace.converged;
        message = r.trace.message;
        if (!base.empty()) write_admm_trace_csv(base + ".csv", r.trace);
    }

    std::ostringstream line;
    line << "solve example=" << opt.example << " level=" << opt.level
         << " algo=" << opt.algo << " iters=" << iters;
    if (iters2 >= 0) line << "+" << iters2;
    line << " eta=" << eta << " time_s=" << time_s
         << (converged ? "" : " NOT-CONVERGED");
    std::cout << line.str() << "\n";
    if (!message.empty()) std::cout << "note: " << message << "\n";
    if (opt.json_line) {
        nlohmann::json j{{"example", opt.example}, {"level", opt.level},
                         {"algo", opt.algo},       {"iters", iters},
                         {"eta", eta},             {"time_s", time_s},
                         {"converged", converged}, {"message", message}};
        if (iters2 >= 0) j["iters_phase2"] = iters2;
        std::cout << j.dump() << "\n";
    }
    return converged ? 0 : 1;
}

int run_campaign_cmd(const CliOptions& opt, const CLI::App* cmd) {
    CampaignConfig cfg;
    if (cmd->count("--config") > 0) {
        cfg = campaign_config_from_json_file(opt.config_path);
    }
    if (cmd->count("--example") > 0) cfg.example_id = opt.example;
    if (cmd->count("--levels") > 0) cfg.levels = opt.levels;
    if (cmd->count("--algos") > 0) cfg.algorithms = opt.algos;
    if (cmd->count("--solve-tol") > 0) cfg.solve_tol = opt.solve_tol;
    if (cmd->count("--tol") > 0) cfg.phase1_tol = opt.tol;
    if (cmd->count("--tol2") > 0) cfg.phase2_tol = opt.tol2;
    if (cmd->count("--maxit") > 0) cfg.maxit_admm = opt.maxit;
    if (cmd->count("--maxit-pdas") > 0) cfg.maxit_pdas = opt.maxit_pdas;
    if (cmd->count("--out") > 0) cfg.out_dir = opt.out_dir;
    if (cmd->count("--threads") > 0) cfg.threads = opt.threads;
    if (cfg.levels.empty()) cfg.levels = {1, 2, 3};
    if (cfg.algorithms.empty()) cfg.algorithms = {"two-phase"};

    const CampaignResult result = run_campaign(cfg);
    bool all_ok = true;
    for (const auto& rec : result.records) {
        std::cout << "level=" << rec.level << " algo=" << rec.algorithm
                  << " dofs=" << rec.dofs << " iters=" << rec.iterations;
        if (rec.algorithm == "two-phase") std::cout << "+" << rec.iterations_phase2;
        std::cout << " eta=" << rec.final_eta;
        if (std::isfinite(rec.e2)) std::cout << " e2=" << rec.e2;
        if (std::isfinite(rec.eoc_value)) std::cout << " eoc=" << rec.eoc_value;
        std::cout << " time_s=" << rec.wall_time_s
                  << " status=" << (rec.success ? "ok" : "failed") << "\n";
        all_ok = all_ok && rec.success;
    }
    std::cout << "wrote " << result.csv_path << " and " << result.json_path
              << "\n";
    if (opt.json_line) {
        nlohmann::json j{{"csv", result.csv_path},
                         {"json", result.json_path},
                         {"records", result.records.size()},
                         {"success", all_ok}};
        std::cout << j.dump() << "\n";
    }
    return all_ok ? 0 : 1;
}

int run_check(const CliOptions& opt) {
    const auto results = run_property_checks(opt.seed);
    int failures = 0;
    for (const auto& res : results) {
        std::cout << "check " << res.name << ": "
                  << (res.pass ? "PASS" : "FAIL") << " (" << res.detail << ")\n";
        failures += res.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all checks passed" : "checks failed") << "\n";
    if (opt.json_line) {
        nlohmann::json j{{"checks", results.size()}, {"failures", failures}};
        std::cout << j.dump() << "\n";
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Box-constrained elliptic control solver workbench"};
    app.require_subcommand(1);
    CliOptions opt;

    auto* mesh_cmd = app.add_subcommand("mesh", "Build a mesh and print a summary");
    mesh_cmd->add_option("--example", opt.example, "Benchmark id (1 disk, 2 square)")
        ->check(CLI::Range(1, 2));
    mesh_cmd->add_option("--level", opt.level, "Refinement level");
    mesh_cmd->add_option("--out", opt.out_dir, "Directory for the mesh dump");
    mesh_cmd->add_flag("--json", opt.json_line, "Emit a JSON summary line");

    auto* solve_cmd = app.add_subcommand("solve", "Run one solver on a benchmark");
    solve_cmd->add_option("--example", opt.example, "Benchmark id (1 disk, 2 square)")
        ->check(CLI::Range(1, 2));
    solve_cmd->add_option("--level", opt.level, "Refinement level");
    solve_cmd
        ->add_option("--algo", opt.algo,
                     "ihadmm | classical | ladmm | pdas | two-phase")
        ->check(CLI::IsMember(
            {"ihadmm", "classical", "ladmm", "pdas", "two-phase"}));
    solve_cmd->add_option("--sigma", opt.sigma, "Penalty parameter");
    solve_cmd->add_option("--tau", opt.tau, "Multiplier step length");
    solve_cmd->add_option("--tol", opt.tol, "First-order / phase-1 tolerance");
    solve_cmd->add_option("--tol2", opt.tol2, "Phase-2 tolerance");
    solve_cmd->add_option("--maxit", opt.maxit, "Iteration cap");
    solve_cmd->add_option("--maxit-pdas", opt.maxit_pdas, "Phase-2 iteration cap");
    solve_cmd->add_option("--out", opt.out_dir, "Directory for trace CSVs");
    solve_cmd->add_flag("--json", opt.json_line, "Emit a JSON summary line");

    auto* campaign_cmd =
        app.add_subcommand("campaign", "Run a level ladder and write reports");
    campaign_cmd->add_option("--config", opt.config_path, "JSON config file");
    campaign_cmd->add_option("--example", opt.example, "Benchmark id")
        ->check(CLI::Range(1, 2));
    campaign_cmd->add_option("--levels", opt.levels, "Levels to run");
    campaign_cmd->add_option("--algos", opt.algos, "Algorithms to run");
    campaign_cmd->add_option("--solve-tol", opt.solve_tol,
                             "Single-phase solve tolerance");
    campaign_cmd->add_option("--tol", opt.tol, "Phase-1 tolerance");
    campaign_cmd->add_option("--tol2", opt.tol2, "Phase-2 tolerance");
    campaign_cmd->add_option("--maxit", opt.maxit, "Phase-1 iteration cap");
    campaign_cmd->add_option("--maxit-pdas", opt.maxit_pdas,
                             "Phase-2 iteration cap");
    campaign_cmd->add_option("--out", opt.out_dir, "Output directory");
    campaign_cmd->add_option("--threads", opt.threads,
                             "Worker threads (0: EOC_SOLVER_THREADS or 1)");
    campaign_cmd->add_flag("--json", opt.json_line, "Emit a JSON summary line");

    auto* check_cmd =
        app.add_subcommand("check", "Run the randomized property suite");
    check_cmd->add_option("--seed", opt.seed, "Random seed");
    check_cmd->add_flag("--json", opt.json_line, "Emit a JSON summary line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (mesh_cmd->parsed()) return run_mesh(opt);
        if (solve_cmd->parsed()) return run_solve(opt);
        if (campaign_cmd->parsed()) return run_campaign_cmd(opt, campaign_cmd);
        if (check_cmd->parsed()) return run_check(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
