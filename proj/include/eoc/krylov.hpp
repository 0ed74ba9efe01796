/*
 * krylov.hpp
 * Iterative solvers: restarted GMRES, preconditioned CG, Chebyshev
 * semi-iteration for mass-type matrices, and a power-iteration norm estimate.
 */
#pragma once

#include <vector>

#include "eoc/sparse.hpp"

namespace eoc {

enum class SolveStatus { converged, maxit, breakdown, indefinite };

struct SolveReport {
    Vec x;
    int iterations = 0;
    // ||b - A x|| / ||b|| recomputed from the returned x (absolute if b = 0).
    double final_residual = 0.0;
    bool converged = false;
    SolveStatus status = SolveStatus::maxit;
    std::vector<double> history;  // absolute residual estimates, one per iteration
};

struct KrylovOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;  // convergence when ||b - Ax|| <= max(rel_tol*||b||, abs_tol)
    int maxit = 500;
    int restart = 50;
};

// Right-preconditioned restarted GMRES from x0 = 0. A breakdown (vanishing
// Arnoldi vector before the tolerance is met) is reported distinctly from
// running out of iterations.
SolveReport gmres(const LinearOperator& A, const Vec& b, const KrylovOptions& opts,
                  const LinearOperator* right_precond = nullptr);

// Preconditioned CG from x0 = 0; requires SPD A (and SPD preconditioner).
// Encountering p^T A p <= 0 stops with status indefinite.
SolveReport conjugate_gradient(const LinearOperator& A, const Vec& b,
                               const KrylovOptions& opts,
                               const LinearOperator* precond = nullptr);

// Fixed-step Chebyshev acceleration of Jacobi for matrices whose diagonally
// scaled spectrum lies in [1/2, 2] (P1 mass matrices and their positive
// diagonal shifts). The result is a fixed polynomial in b, hence linear in b
// and legal inside a stationary preconditioner.
Vec chebyshev_semi_iteration(const SparseMatrix& M, const Vec& b, int steps);

// Largest-eigenvalue estimate for a symmetric positive semidefinite operator,
// deterministic (fixed start vector).
double power_iteration_lambda_max(const LinearOperator& A, int steps);

// Jacobi (inverse diagonal) preconditioner.
class JacobiOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit JacobiOperator(const SparseMatrix& A);
    int size() const override { return static_cast<int>(inv_diag_.size()); }
    void apply(const Vec& x, Vec& y) const override {
        y = inv_diag_.cwiseProduct(x);
    }

  private:
    Vec inv_diag_;
};

// Fixed-step Chebyshev approximation of M^{-1} as a reusable operator.
class ChebyshevOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    ChebyshevOperator(SparseMatrix M, int steps)
        : M_(std::move(M)), steps_(steps) {}
    int size() const override { return M_.rows(); }
    void apply(const Vec& x, Vec& y) const override {
        y = chebyshev_semi_iteration(M_, x, steps_);
    }

  private:
    SparseMatrix M_;
    int steps_;
};

}  // namespace eoc
