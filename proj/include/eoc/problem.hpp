/*
 * problem.hpp
 * The discrete box-constrained control problem: tracking objective with
 * Tikhonov term, reduced gradient, box projection, KKT residual measures,
 * and the two built-in benchmark instances.
 */
#pragma once

#include <vector>

#include "eoc/fem.hpp"
#include "eoc/sparse.hpp"

namespace eoc {

/*
 * min 1/2 ||y - y_d||_M^2 + alpha/2 ||u||_M^2  s.t.  K y = M (u + y_c),
 * a <= u <= b componentwise, all vectors on interior dofs.
 */
struct ProblemSpec {
    FemSystem fem;
    double alpha = 0.0;
    double a = 0.0;
    double b = 0.0;  // box bounds, a < b
    Vec y_d;
    Vec y_c;
    double c0 = 0.0;            // reaction coefficient in K
    int example_id = 0;         // 0 = custom instance
    int level = 0;
    ScalarField exact_control;  // null when no closed form is known
};

// Validates alpha > 0, a < b, and vector lengths.
ProblemSpec make_problem(FemSystem fem, double alpha, double a, double b,
                         Vec y_d, Vec y_c);

struct IterateState {
    Vec u, z, lambda, y, p, mu;
};

IterateState zero_state(int n);

struct KktReport {
    std::vector<double> eta;  // normalized residuals (5 for ADMM, 3 for PDAS)
    double eta_max = 0.0;
    double rh = 0.0;  // squared-residual KKT function, sum of the terms below
    double rh_gradient = 0.0;
    double rh_normal_cone = 0.0;
    double rh_consistency = 0.0;
};

// State and adjoint solves through the shared K factorization.
Vec solve_state(const Vec& u, const ProblemSpec& spec);    // K y = M (u + y_c)
Vec solve_adjoint(const Vec& y, const ProblemSpec& spec);  // K p = M (y_d - y)

double reduced_objective(const Vec& u, const ProblemSpec& spec);

// grad f(u) = M K^{-1} M (K^{-1} M (u + y_c) - y_d) + alpha M u; two K-solves,
// the dense reduced Hessian is never formed.
Vec reduced_gradient(const Vec& u, const ProblemSpec& spec);

Vec project_box(const Vec& v, double a, double b);

/*
 * R_h = ||M lambda + grad f(u)||^2 + dist^2(0, -M lambda + dg(z)) + ||u - z||^2
 * with g the box indicator. The normal-cone distance is componentwise on
 * w = M lambda: interior z_i contributes w_i^2, z_i = a contributes
 * max(0, w_i)^2, z_i = b contributes max(0, -w_i)^2 (bound ties within 1e-12).
 */
KktReport kkt_residual_rh(const IterateState& state, const ProblemSpec& spec);

// Five normalized residuals: state equation, u-z consistency, adjoint
// equation, gradient equation, projection fixed point. Also fills the R_h
// fields.
KktReport eta_admm(const IterateState& state, const ProblemSpec& spec);

// Three normalized residuals: state equation, adjoint equation, projection
// fixed point u = Pi((I - alpha M) u + M p).
KktReport eta_pdas(const IterateState& state, const ProblemSpec& spec);

// Unit disk, alpha = 0.1, box [-0.2, 0.2], y_d = (1 - x^2 - y^2) x, y_c = 0.
// Levels 0..5.
ProblemSpec example1_spec(int level);

// Unit square with n = 2^level, alpha = 1e-3, box [0.3, 1]. The desired state
// is built so the continuous-limit optimal control is
// r(x, y) = min(1, max(0.3, 2 sin(pi x) sin(pi y))). Levels 1..7.
ProblemSpec example2_spec(int level);

}  // namespace eoc
