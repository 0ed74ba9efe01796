#include "eoc/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace eoc {

SparseMatrix::SparseMatrix(int rows, int cols, const std::vector<Triplet>& entries)
    : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("SparseMatrix: dimensions must be positive");
    }
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::invalid_argument("SparseMatrix: triplet index out of range");
        }
    }

    std::vector<Triplet> sorted = entries;
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    // Duplicates are contiguous after sorting; sum each run into one entry.
    row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    col_idx_.reserve(sorted.size());
    values_.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size();) {
        const int r = sorted[k].row;
        const int c = sorted[k].col;
        double v = 0.0;
        while (k < sorted.size() && sorted[k].row == r && sorted[k].col == c) {
            v += sorted[k].value;
            ++k;
        }
        col_idx_.push_back(c);
        values_.push_back(v);
        ++row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (std::size_t i = 1; i < row_ptr_.size(); ++i) {
        row_ptr_[i] += row_ptr_[i - 1];
    }
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseMatrix(n, n, t);
}

SparseMatrix SparseMatrix::diagonal(const Vec& d) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (int i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return SparseMatrix(static_cast<int>(d.size()), static_cast<int>(d.size()), t);
}

Vec SparseMatrix::apply(const Vec& x) const {
    if (x.size() != cols_) {
        throw std::invalid_argument("SparseMatrix::apply: dimension mismatch");
    }
    Vec y = Vec::Zero(rows_);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            s += values_[k] * x[col_idx_[k]];
        }
        y[i] = s;
    }
    return y;
}

Vec SparseMatrix::apply_transpose(const Vec& x) const {
    if (x.size() != rows_) {
        throw std::invalid_argument("SparseMatrix::apply_transpose: dimension mismatch");
    }
    Vec y = Vec::Zero(cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            y[col_idx_[k]] += values_[k] * x[i];
        }
    }
    return y;
}

double SparseMatrix::coeff(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
        throw std::invalid_argument("SparseMatrix::coeff: index out of range");
    }
    auto first = col_idx_.begin() + row_ptr_[i];
    auto last = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
    auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) {
        return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    }
    return 0.0;
}

Vec SparseMatrix::extract_diagonal() const {
    Vec d = Vec::Zero(std::min(rows_, cols_));
    for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
    return d;
}

Vec SparseMatrix::row_sums() const {
    Vec s = Vec::Zero(rows_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            s[i] += values_[k];
        }
    }
    return s;
}

SparseMatrix SparseMatrix::submatrix(std::span<const int> row_ids,
                                     std::span<const int> col_ids) const {
    std::vector<int> col_pos(static_cast<std::size_t>(cols_), -1);
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
        if (col_ids[j] < 0 || col_ids[j] >= cols_) {
            throw std::out_of_range("submatrix: column index out of range");
        }
        col_pos[col_ids[j]] = static_cast<int>(j);
    }
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < row_ids.size(); ++r) {
        int i = row_ids[r];
        if (i < 0 || i >= rows_) {
            throw std::out_of_range("submatrix: row index out of range");
        }
        for (int k = row_ptr_[i]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            int jp = col_pos[col_idx_[k]];
            if (jp >= 0) t.push_back({static_cast<int>(r), jp, values_[k]});
        }
    }
    return SparseMatrix(static_cast<int>(row_ids.size()),
                        static_cast<int>(col_ids.size()), t);
}

SparseMatrix SparseMatrix::scaled(double s) const {
    SparseMatrix out = *this;
    for (double& v : out.values_) v *= s;
    return out;
}

SparseMatrix add_scaled(const SparseMatrix& A, double beta, const SparseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("add_scaled: shape mismatch");
    }
    std::vector<Triplet> t;
    t.reserve(A.nnz() + B.nnz());
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            t.push_back({i, A.col_idx()[k], A.values()[k]});
        }
        for (int k = B.row_ptr()[i]; k < B.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            t.push_back({i, B.col_idx()[k], beta * B.values()[k]});
        }
    }
    return SparseMatrix(A.rows(), A.cols(), t);
}

SparseMatrix scale_plus_identity(double alpha, const SparseMatrix& A, double sigma) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("scale_plus_identity: matrix must be square");
    }
    std::vector<Triplet> t;
    t.reserve(A.nnz() + static_cast<std::size_t>(A.rows()));
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            t.push_back({i, A.col_idx()[k], alpha * A.values()[k]});
        }
        t.push_back({i, i, sigma});
    }
    return SparseMatrix(A.rows(), A.cols(), t);
}

MatrixOperator::MatrixOperator(const SparseMatrix& A) : A_(&A) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("MatrixOperator: matrix must be square");
    }
}

}  // namespace eoc
