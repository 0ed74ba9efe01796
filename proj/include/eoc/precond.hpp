/*
 * precond.hpp
 * Block saddle-point operators for the optimization subproblems and their
 * preconditioners: PMHSS for the 2x2 state-control system, block-diagonal
 * for the 3x3 system, block-triangular for the active-set reduced system.
 * Operator classes borrow their matrices; callers keep them alive.
 */
#pragma once

#include <memory>

#include "eoc/direct.hpp"
#include "eoc/sparse.hpp"

namespace eoc {

/*
 * Two-step PMHSS action for the 2x2 system [[(1/g)M, K], [-K, M]]:
 *   r_hat_a = (g/2) r_a - (sqrt(g)/2) r_b,  r_hat_b = (sqrt(g)/2) r_a + (1/2) r_b,
 * then two solves with G = M + sqrt(g) K. g > 0 required.
 */
Vec pmhss_apply(const Vec& r, const CholeskyFactor& G_solver, double gamma);

class PmhssPrecond final : public LinearOperator {
  public:
    using LinearOperator::apply;
    PmhssPrecond(std::shared_ptr<const CholeskyFactor> G, double gamma)
        : G_(std::move(G)), gamma_(gamma) {}
    int size() const override { return 2 * G_->size(); }
    void apply(const Vec& x, Vec& y) const override {
        y = pmhss_apply(x, *G_, gamma_);
    }

  private:
    std::shared_ptr<const CholeskyFactor> G_;
    double gamma_;
};

// [[(1/gamma) M, K], [-K, M]] acting on stacked (y, u).
class Saddle2x2Op final : public LinearOperator {
  public:
    using LinearOperator::apply;
    Saddle2x2Op(const SparseMatrix& M, const SparseMatrix& K, double gamma)
        : M_(&M), K_(&K), gamma_(gamma) {}
    int size() const override { return 2 * M_->rows(); }
    void apply(const Vec& x, Vec& y) const override;

  private:
    const SparseMatrix* M_;
    const SparseMatrix* K_;
    double gamma_;
};

// [[M, 0, K], [0, Au, -M], [K, -M, 0]] on stacked (y, u, p),
// with Au = alpha M + sigma I.
class Saddle3x3Op final : public LinearOperator {
  public:
    using LinearOperator::apply;
    Saddle3x3Op(const SparseMatrix& M, const SparseMatrix& K, const SparseMatrix& Au)
        : M_(&M), K_(&K), Au_(&Au) {}
    int size() const override { return 3 * M_->rows(); }
    void apply(const Vec& x, Vec& y) const override;

  private:
    const SparseMatrix* M_;
    const SparseMatrix* K_;
    const SparseMatrix* Au_;
};

/*
 * Inverse action of diag(M, Au, S) with S = K M^{-1} K: approximate mass
 * solves supplied by the caller (Chebyshev or exact), exact K-solves, so
 * S^{-1} = K^{-1} M K^{-1}.
 */
struct BlockDiagParts {
    const LinearOperator* inv_mass;     // approximates M^{-1}
    const LinearOperator* inv_control;  // approximates Au^{-1}
    const SparseMatrix* M;
    const CholeskyFactor* K_factor;
};

Vec block_diag_precond_apply(const Vec& r, const BlockDiagParts& parts);

class BlockDiagPrecond final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit BlockDiagPrecond(const BlockDiagParts& parts) : parts_(parts) {}
    int size() const override { return 3 * parts_.M->rows(); }
    void apply(const Vec& x, Vec& y) const override {
        y = block_diag_precond_apply(x, parts_);
    }

  private:
    BlockDiagParts parts_;
};

/*
 * Active-set reduced system [[M, 0, K], [0, alpha M_II, -M_Irows],
 * [K, -M_Icols, 0]] on stacked (y, u_I, p). M_Icols is the n x |I| column
 * block of M; its transpose supplies the M_Irows action.
 */
class PdasSystemOp final : public LinearOperator {
  public:
    using LinearOperator::apply;
    PdasSystemOp(const SparseMatrix& M, const SparseMatrix& K,
                 const SparseMatrix& control_block, const SparseMatrix& M_cols_inactive)
        : M_(&M), K_(&K), MII_(&control_block), McolsI_(&M_cols_inactive) {}
    int size() const override { return 2 * M_->rows() + MII_->rows(); }
    void apply(const Vec& x, Vec& y) const override;

  private:
    const SparseMatrix* M_;
    const SparseMatrix* K_;
    const SparseMatrix* MII_;     // alpha * M(I, I), pre-scaled
    const SparseMatrix* McolsI_;  // M(:, I)
};

/*
 * Lower block-triangular preconditioner [[A0, 0, 0], [0, A1, 0],
 * [-K, M_Icols, -S0]] with S0 = K M^{-1} K: solve A0 v1 = r1, A1 v2 = r2,
 * then v3 = S0^{-1} (-r3 - K v1 + M_Icols v2).
 */
struct BlockTriParts {
    const LinearOperator* inv_state_mass;    // approximates M^{-1} (A0 solve)
    const LinearOperator* inv_control_block; // approximates (alpha M_II)^{-1} (A1 solve)
    const SparseMatrix* K;
    const SparseMatrix* M;
    const SparseMatrix* M_cols_inactive;
    const CholeskyFactor* K_factor;
};

Vec block_tri_precond_apply(const Vec& r, const BlockTriParts& parts);

class BlockTriPrecond final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit BlockTriPrecond(const BlockTriParts& parts) : parts_(parts) {}
    int size() const override {
        return 2 * parts_.M->rows() + parts_.M_cols_inactive->cols();
    }
    void apply(const Vec& x, Vec& y) const override {
        y = block_tri_precond_apply(x, parts_);
    }

  private:
    BlockTriParts parts_;
};

}  // namespace eoc
