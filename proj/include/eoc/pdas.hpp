/*
 * pdas.hpp
 * Phase-II primal-dual active-set semismooth Newton solver: active sets from
 * mu + c (u - bound), a reduced 3x3 saddle solve with a block-triangular
 * preconditioner, multiplier recovery, and optional Armijo globalization.
 */
#pragma once

#include <string>
#include <vector>

#include "eoc/problem.hpp"

namespace eoc {

struct ActiveSets {
    std::vector<int> lower, upper, inactive;  // disjoint partition of 0..n-1
};

struct PdasConfig {
    double c = 1.0;
    double tol = 1e-11;
    int maxit = 100;
    bool line_search = false;
    double inner_tol = 1e-12;  // relative GMRES target for the reduced system
    int inner_maxit = 500;
    int inner_restart = 50;
};

enum class PdasStatus { converged, stagnated, maxit, solver_failure };

struct PdasIterationLog {
    int iter = 0;  // 1-based
    int n_lower = 0, n_upper = 0;
    std::vector<double> eta;
    double eta_max = 0.0;
    int inner_iters = 0;
    double step_length = 1.0;
    double time_s = 0.0;
};

struct PdasTrace {
    std::vector<PdasIterationLog> iterations;
    bool converged = false;
    PdasStatus status = PdasStatus::maxit;
    std::string message;
};

struct PdasResult {
    IterateState state;
    PdasTrace trace;
};

// A_lower = {i : mu_i + c (u_i - a) < 0}, A_upper = {i : mu_i + c (u_i - b) > 0}.
ActiveSets determine_sets(const Vec& u, const Vec& mu, double a, double b,
                          double c);

struct PdasStepResult {
    IterateState state;
    int inner_iters = 0;
    bool inner_converged = true;
    double inner_residual = 0.0;
    std::string warning;
};

/*
 * Pins u to the bounds on the active sets and solves the reduced system
 * [[M, 0, K], [0, alpha M_II, -M_Irows], [K, -M_Icols, 0]] (y, u_I, p) =
 * (M y_d, -alpha (M s)_I, M (y_c + s)) with s the pinned boundary values,
 * via block-triangular-preconditioned GMRES. Recovers mu = M p - alpha M u on
 * the active sets, mu = 0 inactive. With no inactive dofs the system reduces
 * to two direct K-solves. Throws on inner residual worse than 1e-9 relative;
 * a residual in (inner_tol, 1e-9] only sets a warning.
 */
PdasStepResult pdas_step(const ActiveSets& sets, const ProblemSpec& spec,
                         const PdasConfig& cfg);

// Alternates determine_sets / pdas_step until eta < tol, the active sets
// repeat (success when eta < tol, stagnation otherwise), or maxit.
PdasResult pdas_solve(const ProblemSpec& spec, const PdasConfig& cfg,
                      const IterateState& init);

/*
 * Armijo-globalized variant: the Newton target defines a direction in
 * (u, mu); merit 1/2 ||G||^2 with G the gradient and min/max complementarity
 * rows (y, p eliminated through their solves). Backtracking by halving,
 * slope 1e-4, at most 20 halvings, then a full step with a warning.
 */
PdasResult pdas_globalized(const ProblemSpec& spec, const PdasConfig& cfg,
                           const IterateState& init);

// Merit residual G(u, mu): gradient row alpha M u - M p(u) + mu stacked with
// mu - max(0, mu + c (u - b)) - min(0, mu + c (u - a)).
Vec pdas_merit_residual(const Vec& u, const Vec& mu, const ProblemSpec& spec,
                        double c);

}  // namespace eoc
