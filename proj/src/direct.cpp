/*
 * direct.cpp
 * Sparse Cholesky via Eigen's SimplicialLLT.
 */
#include "eoc/direct.hpp"

#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace eoc {

struct CholeskyFactor::Impl {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

CholeskyFactor::CholeskyFactor(const SparseMatrix& A)
    : impl_(std::make_unique<Impl>()), n_(A.rows()) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("CholeskyFactor: matrix must be square");
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A.nnz());
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            t.emplace_back(i, A.col_idx()[k], A.values()[k]);
        }
    }
    Eigen::SparseMatrix<double> S(A.rows(), A.cols());
    S.setFromTriplets(t.begin(), t.end());
    impl_->llt.compute(S);
    if (impl_->llt.info() != Eigen::Success) {
        throw std::domain_error("CholeskyFactor: matrix is not positive definite");
    }
}

CholeskyFactor::~CholeskyFactor() = default;
CholeskyFactor::CholeskyFactor(CholeskyFactor&&) noexcept = default;
CholeskyFactor& CholeskyFactor::operator=(CholeskyFactor&&) noexcept = default;

Vec CholeskyFactor::solve(const Vec& b) const {
    if (b.size() != n_) {
        throw std::invalid_argument("CholeskyFactor::solve: dimension mismatch");
    }
    return impl_->llt.solve(b);
}

std::shared_ptr<const CholeskyFactor> sparse_direct_solve(const SparseMatrix& A) {
    return std::make_shared<const CholeskyFactor>(A);
}

}  // namespace eoc
