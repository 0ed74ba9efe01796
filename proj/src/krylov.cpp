/*
 * krylov.cpp
 * GMRES(restart) with right preconditioning, preconditioned CG, Chebyshev
 * semi-iteration, power iteration.
 */
#include "eoc/krylov.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace eoc {

namespace {

// Residual target from the options; b = 0 is served by x = 0.
double residual_target(const Vec& b, const KrylovOptions& opts) {
    return std::max(opts.rel_tol * b.norm(), opts.abs_tol);
}

double true_relative_residual(const LinearOperator& A, const Vec& b, const Vec& x) {
    const double bn = b.norm();
    const double rn = (b - A.apply(x)).norm();
    return bn > 0.0 ? rn / bn : rn;
}

}  // namespace

SolveReport gmres(const LinearOperator& A, const Vec& b, const KrylovOptions& opts,
                  const LinearOperator* right_precond) {
    if (b.size() != A.size()) {
        throw std::invalid_argument("gmres: dimension mismatch");
    }
    if (opts.rel_tol <= 0.0 && opts.abs_tol <= 0.0) {
        throw std::invalid_argument("gmres: tolerance must be positive");
    }

    SolveReport rep;
    rep.x = Vec::Zero(b.size());
    const double target = residual_target(b, opts);
    if (b.norm() <= target) {
        rep.converged = true;
        rep.status = SolveStatus::converged;
        rep.final_residual = true_relative_residual(A, b, rep.x);
        return rep;
    }

    const int m = std::max(1, opts.restart);
    std::vector<Vec> V(static_cast<std::size_t>(m) + 1);
    // Column-major Hessenberg, transformed in place by Givens rotations.
    std::vector<std::vector<double>> H(
        static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    std::vector<double> cs(m), sn(m), g(static_cast<std::size_t>(m) + 1);

    auto update_solution = [&](int cols) {
        // Back substitution on the triangularized Hessenberg; a vanishing
        // diagonal (rank-deficient breakdown) contributes nothing.
        std::vector<double> y(cols, 0.0);
        for (int i = cols - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < cols; ++j) s -= H[j][i] * y[j];
            y[i] = std::abs(H[i][i]) > 1e-300 ? s / H[i][i] : 0.0;
        }
        Vec z = Vec::Zero(b.size());
        for (int j = 0; j < cols; ++j) z += y[j] * V[j];
        rep.x += right_precond ? right_precond->apply(z) : z;
    };

    while (rep.iterations < opts.maxit) {
        Vec r = b - A.apply(rep.x);
        const double beta = r.norm();
        if (beta <= target) {
            rep.converged = true;
            rep.status = SolveStatus::converged;
            break;
        }
        V[0] = r / beta;
        g.assign(g.size(), 0.0);
        g[0] = beta;

        int j = 0;
        bool broke_down = false;
        for (; j < m && rep.iterations < opts.maxit; ++j) {
            const Vec z = right_precond ? right_precond->apply(V[j]) : V[j];
            Vec w = A.apply(z);
            for (int i = 0; i <= j; ++i) {
                H[j][i] = w.dot(V[i]);
                w -= H[j][i] * V[i];
            }
            const double h_next = w.norm();
            H[j][static_cast<std::size_t>(j) + 1] = h_next;

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * H[j][i] + sn[i] * H[j][static_cast<std::size_t>(i) + 1];
                H[j][static_cast<std::size_t>(i) + 1] =
                    -sn[i] * H[j][i] + cs[i] * H[j][static_cast<std::size_t>(i) + 1];
                H[j][i] = t;
            }
            const double denom = std::hypot(H[j][j], h_next);
            if (denom == 0.0) {
                // Zero Hessenberg column: A maps the new direction into the
                // explored space, so the estimate below would be meaningless.
                update_solution(j);
                ++rep.iterations;
                const double true_res = (b - A.apply(rep.x)).norm();
                rep.history.push_back(true_res);
                if (true_res <= target) {
                    rep.converged = true;
                    rep.status = SolveStatus::converged;
                } else {
                    rep.status = SolveStatus::breakdown;
                }
                broke_down = true;
                break;
            }
            cs[j] = H[j][j] / denom;
            sn[j] = h_next / denom;
            H[j][j] = denom;
            H[j][static_cast<std::size_t>(j) + 1] = 0.0;
            g[static_cast<std::size_t>(j) + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            ++rep.iterations;
            const double est = std::abs(g[static_cast<std::size_t>(j) + 1]);
            rep.history.push_back(est);

            if (est <= target) {
                update_solution(j + 1);
                rep.converged = true;
                rep.status = SolveStatus::converged;
                break;
            }
            if (h_next <= 1e-14 * beta) {
                // Arnoldi found an invariant subspace but the least-squares
                // residual is still above target: a genuine breakdown.
                update_solution(j + 1);
                if ((b - A.apply(rep.x)).norm() <= target) {
                    rep.converged = true;
                    rep.status = SolveStatus::converged;
                } else {
                    rep.status = SolveStatus::breakdown;
                }
                broke_down = true;
                break;
            }
            V[static_cast<std::size_t>(j) + 1] = w / h_next;
        }
        if (rep.converged || broke_down) break;
        update_solution(j);  // end of cycle or maxit: fold progress into x
    }

    if (rep.converged) rep.status = SolveStatus::converged;
    rep.final_residual = true_relative_residual(A, b, rep.x);
    return rep;
}

SolveReport conjugate_gradient(const LinearOperator& A, const Vec& b,
                               const KrylovOptions& opts,
                               const LinearOperator* precond) {
    if (b.size() != A.size()) {
        throw std::invalid_argument("conjugate_gradient: dimension mismatch");
    }
    SolveReport rep;
    rep.x = Vec::Zero(b.size());
    const double target = residual_target(b, opts);

    Vec r = b;
    if (r.norm() <= target) {
        rep.converged = true;
        rep.status = SolveStatus::converged;
        rep.final_residual = true_relative_residual(A, b, rep.x);
        return rep;
    }
    Vec z = precond ? precond->apply(r) : r;
    Vec p = z;
    double rz = r.dot(z);

    while (rep.iterations < opts.maxit) {
        const Vec q = A.apply(p);
        const double pq = p.dot(q);
        if (pq <= 0.0) {
            rep.status = SolveStatus::indefinite;
            break;
        }
        const double step = rz / pq;
        rep.x += step * p;
        r -= step * q;
        ++rep.iterations;
        rep.history.push_back(r.norm());
        if (r.norm() <= target) {
            rep.converged = true;
            rep.status = SolveStatus::converged;
            break;
        }
        z = precond ? precond->apply(r) : r;
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    rep.final_residual = true_relative_residual(A, b, rep.x);
    return rep;
}

Vec chebyshev_semi_iteration(const SparseMatrix& M, const Vec& b, int steps) {
    if (steps < 1) {
        throw std::invalid_argument("chebyshev_semi_iteration: steps must be >= 1");
    }
    if (b.size() != M.rows()) {
        throw std::invalid_argument("chebyshev_semi_iteration: dimension mismatch");
    }
    // Eigenvalue bounds [1/2, 2] for the diagonally scaled matrix.
    const double theta = 1.25;
    const double delta = 0.75;
    const double sigma1 = theta / delta;

    const Vec inv_d = M.extract_diagonal().cwiseInverse();
    Vec x = Vec::Zero(b.size());
    Vec r = b;
    double rho = 1.0 / sigma1;
    Vec d = (1.0 / theta) * inv_d.cwiseProduct(r);
    for (int k = 0; k < steps; ++k) {
        x += d;
        if (k + 1 == steps) break;
        r -= M.apply(d);
        const double rho_next = 1.0 / (2.0 * sigma1 - rho);
        d = (rho_next * rho) * d + (2.0 * rho_next / delta) * inv_d.cwiseProduct(r);
        rho = rho_next;
    }
    return x;
}

double power_iteration_lambda_max(const LinearOperator& A, int steps) {
    const int n = A.size();
    if (n == 0) return 0.0;
    Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int k = 0; k < steps; ++k) {
        const Vec w = A.apply(v);
        lambda = v.dot(w);
        const double wn = w.norm();
        if (wn < 1e-300) return 0.0;
        v = w / wn;
    }
    return lambda;
}

JacobiOperator::JacobiOperator(const SparseMatrix& A) {
    const Vec d = A.extract_diagonal();
    for (int i = 0; i < d.size(); ++i) {
        if (d[i] <= 0.0) {
            throw std::invalid_argument("JacobiOperator: nonpositive diagonal entry");
        }
    }
    inv_diag_ = d.cwiseInverse();
}

}  // namespace eoc
