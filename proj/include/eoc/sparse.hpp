#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace eoc {

using Vec = Eigen::VectorXd;

struct Triplet {
    int row;
    int col;
    double value;
};

/*
 * Compressed sparse row matrix. Column indices within each row are sorted and
 * unique (duplicate triplets are summed during construction), so the
 * matrix-vector product is deterministic: each entry is visited exactly once
 * in a fixed order.
 */
class SparseMatrix {
  public:
    SparseMatrix() = default;

    // Builds from coordinate entries. Throws std::invalid_argument on
    // out-of-range indices or nonpositive dimensions.
    SparseMatrix(int rows, int cols, const std::vector<Triplet>& entries);

    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(const Vec& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    // y = A x. Throws std::invalid_argument on dimension mismatch.
    Vec apply(const Vec& x) const;
    // y = A^T x, for rectangular submatrix blocks.
    Vec apply_transpose(const Vec& x) const;

    double coeff(int i, int j) const;  // 0 if the entry is not stored
    Vec extract_diagonal() const;
    Vec row_sums() const;

    // Rows/columns selected by index lists (kept in the given order).
    SparseMatrix submatrix(std::span<const int> row_ids,
                           std::span<const int> col_ids) const;

    SparseMatrix scaled(double s) const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

// C = A + beta * B for identically sized matrices.
SparseMatrix add_scaled(const SparseMatrix& A, double beta, const SparseMatrix& B);

// C = alpha * A + sigma * I.
SparseMatrix scale_plus_identity(double alpha, const SparseMatrix& A, double sigma);

/*
 * Matrix-free square operator: anything with a deterministic matrix-vector
 * product. Preconditioners implement the same interface (apply = action of an
 * approximate inverse), so solvers treat both uniformly.
 */
class LinearOperator {
  public:
    virtual ~LinearOperator() = default;
    virtual int size() const = 0;
    virtual void apply(const Vec& x, Vec& y) const = 0;

    Vec apply(const Vec& x) const {
        Vec y(size());
        apply(x, y);
        return y;
    }
};

class MatrixOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit MatrixOperator(const SparseMatrix& A);  // throws if not square
    int size() const override { return A_->rows(); }
    void apply(const Vec& x, Vec& y) const override { y = A_->apply(x); }

  private:
    const SparseMatrix* A_;
};

class IdentityOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    explicit IdentityOperator(int n) : n_(n) {}
    int size() const override { return n_; }
    void apply(const Vec& x, Vec& y) const override { y = x; }

  private:
    int n_;
};

// Wraps a callable as an operator; the callable must be linear.
class FunctionOperator final : public LinearOperator {
  public:
    using LinearOperator::apply;
    FunctionOperator(int n, std::function<Vec(const Vec&)> fn)
        : n_(n), fn_(std::move(fn)) {}
    int size() const override { return n_; }
    void apply(const Vec& x, Vec& y) const override { y = fn_(x); }

  private:
    int n_;
    std::function<Vec(const Vec&)> fn_;
};

}  // namespace eoc
