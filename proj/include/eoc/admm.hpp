/*
 * admm.hpp
 * Phase-I first-order solvers: the mass-lumped inexact scheme (saddle u-step
 * with PMHSS-preconditioned GMRES, closed-form z-step, multiplier ascent),
 * plus the classical and linearized variants for comparison, with a summable
 * inner-tolerance schedule and the descent-inequality diagnostic.
 */
#pragma once

#include <string>
#include <vector>

#include "eoc/problem.hpp"

namespace eoc {

enum class AdmmVariant { ihadmm, classical, ladmm };

struct AdmmConfig {
    double sigma = 0.0;  // penalty; 0 resolves to 0.1 * alpha
    double tau = 0.0;    // multiplier step; 0 resolves to 1 (ihadmm) or 1.618
    double tol = 1e-6;   // target for the max normalized KKT residual
    int maxit = 500;
    double epsilon0 = 0.0;  // inexactness scale; 0 resolves to 1e-4 * ||b_0||
    AdmmVariant variant = AdmmVariant::ihadmm;
    double theta = 0.0;  // linearized-variant proximal scalar; 0 resolves to
                         // 1.1 * estimated ||M||_2
    bool exact_inner = false;      // inner solves to 1e-12 relative instead of
                                   // the epsilon schedule (diagnostics)
    bool record_iterates = false;  // keep (u, z, lambda) per iteration
    int inner_maxit = 500;
    int inner_restart = 50;
};

AdmmConfig make_admm_config(AdmmVariant variant);

struct AdmmIterationLog {
    int iter = 0;  // 1-based
    std::vector<double> eta;
    double eta_max = 0.0;
    double rh = 0.0;
    int inner_iters = 0;
    double eps_k = 0.0;
    double delta_norm = 0.0;  // recomputed u-step error-vector norm
    double time_s = 0.0;      // cumulative wall time at end of iteration
};

struct AdmmTrace {
    AdmmVariant variant = AdmmVariant::ihadmm;
    std::vector<AdmmIterationLog> iterations;
    // When recorded: [0] = initial state, then one snapshot per iteration.
    std::vector<IterateState> iterates;
    bool converged = false;
    std::string message;  // parameter warnings and failure diagnostics
    double sigma = 0.0, tau = 0.0, epsilon0 = 0.0, theta = 0.0;  // resolved
    double total_time_s = 0.0;
};

struct AdmmResult {
    IterateState state;
    AdmmTrace trace;
};

/*
 * Mass-lumped inexact scheme. Per iteration: (1) solve the 2x2 saddle system
 * [[(1/g)M, K], [-K, M]] (y, u) = ((1/g)(K(s z - l) + M y_d), -M y_c) with
 * g = alpha + sigma by PMHSS-GMRES, inner tolerance mapped from eps_k so the
 * induced gradient-equation error delta stays <= eps_k; (2) recover
 * p = g u - sigma z + lambda; (3) z = clamp(u + W^{-1} M lambda / sigma);
 * (4) lambda += tau sigma (u - z). lambda is the function-space multiplier.
 */
AdmmResult ihadmm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                        const IterateState& init);

// Plain-l2 penalty variant: 3x3 saddle system [[M,0,K],[0,aM+sI,-M],[K,-M,0]]
// solved by GMRES with the block-diagonal preconditioner;
// z = clamp(u + lambda/sigma) with the plain multiplier. Reported lambda is
// mapped back to function space (M^{-1} lambda_plain).
AdmmResult classical_admm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                                const IterateState& init);

// Same u-step as the mass-lumped scheme; the z-subproblem is linearized with
// proximal scalar theta >= ||M||_2:
// z = clamp(z_prev + (1/(sigma theta)) M (sigma u + lambda - sigma z_prev)).
AdmmResult ladmm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                       const IterateState& init);

// eps_k = epsilon0 / (k+1)^2, summable by construction.
double epsilon_schedule(int k, double epsilon0);

// Componentwise closed-form z-updates of the three schemes (shared with the
// property-check suite, which compares them against golden-section argmins).
Vec z_update_lumped(const Vec& u, const Vec& M_lambda, const Vec& W,
                    double sigma, double a, double b);
Vec z_update_plain(const Vec& u, const Vec& lambda_plain, double sigma,
                   double a, double b);
Vec z_update_linearized(const Vec& u, const Vec& lambda, const Vec& z_prev,
                        const SparseMatrix& M, double sigma, double theta,
                        double a, double b);

/*
 * Gap (LHS - RHS) of the per-iteration descent inequality for the
 * mass-lumped scheme, evaluated against a high-accuracy reference solution.
 * Nonnegative up to round-off when inner solves are exact. delta is
 * recomputed from the states as grad f(u+) + M lambda + sigma M (u+ - z).
 */
double descent_diagnostic(const IterateState& prev, const IterateState& next,
                          const IterateState& reference, const ProblemSpec& spec,
                          const AdmmConfig& cfg);

}  // namespace eoc
