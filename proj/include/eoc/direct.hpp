/*
 * direct.hpp
 * Sparse Cholesky factorization handle, reusable across many right-hand
 * sides. Stands in for the multigrid V-cycles of large-scale runs.
 */
#pragma once

#include <memory>

#include "eoc/sparse.hpp"

namespace eoc {

class CholeskyFactor {
  public:
    // Factors an SPD matrix; throws std::domain_error on a non-positive pivot.
    explicit CholeskyFactor(const SparseMatrix& A);
    ~CholeskyFactor();
    CholeskyFactor(CholeskyFactor&&) noexcept;
    CholeskyFactor& operator=(CholeskyFactor&&) noexcept;
    CholeskyFactor(const CholeskyFactor&) = delete;
    CholeskyFactor& operator=(const CholeskyFactor&) = delete;

    int size() const { return n_; }
    Vec solve(const Vec& b) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int n_ = 0;
};

std::shared_ptr<const CholeskyFactor> sparse_direct_solve(const SparseMatrix& A);

// LinearOperator view of A^{-1} via a shared factorization.
class SolveOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit SolveOperator(std::shared_ptr<const CholeskyFactor> f)
        : f_(std::move(f)) {}
    int size() const override { return f_->size(); }
    void apply(const Vec& x, Vec& y) const override { y = f_->solve(x); }

  private:
    std::shared_ptr<const CholeskyFactor> f_;
};

}  // namespace eoc
