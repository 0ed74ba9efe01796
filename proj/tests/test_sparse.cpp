#include "doctest.h"

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eoc/sparse.hpp"

using namespace eoc;

namespace {

Eigen::MatrixXd to_dense(const SparseMatrix& A) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
            D(i, A.col_idx()[k]) = A.values()[k];
        }
    }
    return D;
}

}  // namespace

TEST_CASE("duplicate triplets are summed and columns sorted") {
    const SparseMatrix A(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, -1.0}});
    CHECK(A.nnz() == 3);
    CHECK(A.coeff(0, 0) == doctest::Approx(2.0));
    CHECK(A.coeff(0, 2) == doctest::Approx(1.5));
    CHECK(A.coeff(1, 1) == doctest::Approx(-1.0));
    CHECK(A.coeff(1, 0) == 0.0);
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.row_ptr()[i] + 1; k < A.row_ptr()[i + 1]; ++k) {
            CHECK(A.col_idx()[k - 1] < A.col_idx()[k]);
        }
    }
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(SparseMatrix(0, 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
}

TEST_CASE("matvec and transpose matvec match dense arithmetic") {
    const SparseMatrix A(3, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, -3.0}, {2, 1, 4.0}});
    const Eigen::MatrixXd D = to_dense(A);
    Vec x(2);
    x << 0.5, -1.5;
    Vec y(3);
    y << 1.0, 2.0, 3.0;
    CHECK((A.apply(x) - D * x).norm() == doctest::Approx(0.0));
    CHECK((A.apply_transpose(y) - D.transpose() * y).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS(A.apply(y), std::invalid_argument);
}

TEST_CASE("identity, diagonal, row sums, diagonal extraction") {
    const SparseMatrix I = SparseMatrix::identity(3);
    Vec d(3);
    d << 2.0, -1.0, 0.5;
    const SparseMatrix D = SparseMatrix::diagonal(d);
    Vec x(3);
    x << 1.0, 2.0, 3.0;
    CHECK((I.apply(x) - x).norm() == 0.0);
    CHECK((D.apply(x) - d.cwiseProduct(x)).norm() == 0.0);
    CHECK((D.extract_diagonal() - d).norm() == 0.0);
    const SparseMatrix A(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
    Vec rs = A.row_sums();
    CHECK(rs[0] == doctest::Approx(3.0));
    CHECK(rs[1] == doctest::Approx(3.0));
}

TEST_CASE("submatrix keeps requested rows and columns in order") {
    const SparseMatrix A(3, 3, {{0, 0, 1.0}, {0, 2, 2.0}, {1, 1, 3.0},
                                {2, 0, 4.0}, {2, 2, 5.0}});
    const std::vector<int> rows = {2, 0};
    const std::vector<int> cols = {0, 2};
    const SparseMatrix S = A.submatrix(rows, cols);
    CHECK(S.rows() == 2);
    CHECK(S.cols() == 2);
    CHECK(S.coeff(0, 0) == doctest::Approx(4.0));
    CHECK(S.coeff(0, 1) == doctest::Approx(5.0));
    CHECK(S.coeff(1, 0) == doctest::Approx(1.0));
    CHECK(S.coeff(1, 1) == doctest::Approx(2.0));
    const std::vector<int> bad = {3};
    CHECK_THROWS_AS(A.submatrix(bad, cols), std::out_of_range);
}

TEST_CASE("scaled, add_scaled, scale_plus_identity") {
    const SparseMatrix A(2, 2, {{0, 0, 1.0}, {1, 0, 2.0}});
    const SparseMatrix B(2, 2, {{0, 0, 4.0}, {0, 1, 1.0}});
    const Eigen::MatrixXd DA = to_dense(A);
    const Eigen::MatrixXd DB = to_dense(B);
    CHECK((to_dense(A.scaled(-2.5)) + 2.5 * DA).norm() == doctest::Approx(0.0));
    CHECK((to_dense(add_scaled(A, 3.0, B)) - (DA + 3.0 * DB)).norm() ==
          doctest::Approx(0.0));
    const Eigen::MatrixXd E =
        0.5 * DA + 2.0 * Eigen::MatrixXd::Identity(2, 2);
    CHECK((to_dense(scale_plus_identity(0.5, A, 2.0)) - E).norm() ==
          doctest::Approx(0.0));
}

TEST_CASE("matvec is linear") {
    const SparseMatrix A(3, 3, {{0, 0, 1.0}, {0, 2, 2.0}, {1, 1, 3.0},
                                {2, 0, 4.0}, {2, 2, 5.0}});
    Vec x(3), y(3);
    x << 1.0, -2.0, 0.5;
    y << 0.25, 3.0, -1.0;
    const Vec lhs = A.apply(2.0 * x - 3.0 * y);
    const Vec rhs = 2.0 * A.apply(x) - 3.0 * A.apply(y);
    CHECK((lhs - rhs).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("operator wrappers share the interface") {
    const SparseMatrix A(2, 2, {{0, 0, 2.0}, {1, 1, 3.0}});
    const MatrixOperator op(A);
    const IdentityOperator id(2);
    const FunctionOperator fn(2, [&](const Vec& v) { return A.apply(v); });
    Vec x(2);
    x << 1.0, -1.0;
    CHECK((op.apply(x) - A.apply(x)).norm() == 0.0);
    CHECK((id.apply(x) - x).norm() == 0.0);
    CHECK((fn.apply(x) - A.apply(x)).norm() == 0.0);
}
