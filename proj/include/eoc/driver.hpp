/*
 * driver.hpp
 * Two-phase solver composition, nested-mesh interpolation, and campaign
 * execution with CSV/JSON reporting.
 */
#pragma once

#include <string>
#include <vector>

#include "eoc/admm.hpp"
#include "eoc/pdas.hpp"

namespace eoc {

struct TwoPhaseTrace {
    AdmmTrace phase1;
    PdasTrace phase2;
};

struct TwoPhaseResult {
    IterateState state;
    TwoPhaseTrace trace;
    bool converged = false;
    std::string message;  // empty, or "phase1: ..." / "phase2: ..."
};

// ihadmm config with the warm-start tolerance 1e-3.
AdmmConfig default_phase1_config();

/*
 * Phase I from the zero state, then Phase II warm-started from the Phase-I
 * iterate with mu = M (p - alpha u). A non-converged phase is reported with a
 * phase prefix in message; Phase II is skipped when Phase I fails.
 */
TwoPhaseResult two_phase_solve(const ProblemSpec& spec,
                               const AdmmConfig& admm_cfg,
                               const PdasConfig& pdas_cfg);

/*
 * P1 prolongation of an interior dof vector from a mesh to its refinement:
 * parent node values are kept, edge midpoints average their endpoints, and
 * the result is restricted to the fine interior dofs. Verifies coordinates
 * (with circle projection for disk boundary midpoints) to 1e-12 and throws
 * std::invalid_argument when the meshes are not a refinement pair.
 */
Vec interpolate_to_fine(const Vec& v_coarse, const Mesh& coarse,
                        const Mesh& fine);

// sqrt((u - r_h)' M (u - r_h)) with r_h the interior nodal interpolant of
// spec.exact_control; throws when the spec carries no exact control.
double control_error_m_norm(const Vec& u, const ProblemSpec& spec);

// Quadrature L2 distance between the control iterate and spec.exact_control.
// The P1 representative takes u on interior nodes and the box projection of
// zero on boundary nodes (the adjoint vanishes there, so the projection
// formula pins that value). Subdivided quadrature resolves the kink curves
// of the projected exact control. Throws when the spec carries no exact
// control.
double control_error_l2(const Vec& u, const ProblemSpec& spec);

struct CampaignConfig {
    int example_id = 2;
    std::vector<int> levels;
    std::vector<std::string> algorithms;  // ihadmm|classical|ladmm|pdas|two-phase
    double solve_tol = 1e-6;              // single-phase runs
    double phase1_tol = 1e-3;
    double phase2_tol = 1e-11;
    int maxit_admm = 500;
    int maxit_pdas = 100;
    std::string out_dir = "campaign_out";
    int threads = 0;  // 0: EOC_SOLVER_THREADS env var, else 1
};

struct RunRecord {
    int level = 0;
    double h = 0.0;
    int dofs = 0;
    std::string algorithm;
    int iterations = 0;         // Phase-I / only-phase count
    int iterations_phase2 = 0;  // two-phase only
    double final_eta = 0.0;
    double e2 = 0.0;            // NaN when no reference exists
    double eoc_value = 0.0;     // NaN on the coarsest level of each algorithm
    double wall_time_s = 0.0;
    bool success = false;
    std::string message;
    std::string trace_path;
};

struct CampaignResult {
    std::vector<RunRecord> records;
    std::string csv_path;
    std::string json_path;
};

/*
 * Runs every (level, algorithm) pair on a small thread pool. Control error:
 * example 2 compares against the exact control on each mesh; example 1 chains
 * interpolate_to_fine to the finest requested level and compares against a
 * two-phase reference solve there (whose own rows carry NaN). The eoc column
 * pairs consecutive levels per algorithm. Writes out_dir/campaign.csv,
 * out_dir/campaign.json, and one trace CSV per run (two for two-phase).
 */
CampaignResult run_campaign(const CampaignConfig& cfg);

// Reads a JSON campaign config; missing keys keep their defaults. Throws
// std::invalid_argument on a missing file or malformed content.
CampaignConfig campaign_config_from_json_file(const std::string& path);

void write_admm_trace_csv(const std::string& path, const AdmmTrace& trace);
void write_pdas_trace_csv(const std::string& path, const PdasTrace& trace);

}  // namespace eoc
