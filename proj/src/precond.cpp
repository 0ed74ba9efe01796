/*
 * precond.cpp
 * Saddle-point operators and preconditioner actions.
 */
#include "eoc/precond.hpp"

#include <cmath>
#include <stdexcept>

namespace eoc {

Vec pmhss_apply(const Vec& r, const CholeskyFactor& G_solver, double gamma) {
    if (gamma <= 0.0) {
        throw std::invalid_argument("pmhss_apply: gamma must be positive");
    }
    const int n = G_solver.size();
    if (r.size() != 2 * n) {
        throw std::invalid_argument("pmhss_apply: dimension mismatch");
    }
    const double sg = std::sqrt(gamma);
    const Vec ra = r.head(n);
    const Vec rb = r.tail(n);
    const Vec ra_hat = (gamma / 2.0) * ra - (sg / 2.0) * rb;
    const Vec rb_hat = (sg / 2.0) * ra + 0.5 * rb;
    Vec out(2 * n);
    out.head(n) = G_solver.solve(ra_hat);
    out.tail(n) = G_solver.solve(rb_hat);
    return out;
}

void Saddle2x2Op::apply(const Vec& x, Vec& y) const {
    const int n = M_->rows();
    const Vec a = x.head(n);
    const Vec b = x.tail(n);
    y.resize(2 * n);
    y.head(n) = (1.0 / gamma_) * M_->apply(a) + K_->apply(b);
    y.tail(n) = -K_->apply(a) + M_->apply(b);
}

void Saddle3x3Op::apply(const Vec& x, Vec& y) const {
    const int n = M_->rows();
    const Vec a = x.segment(0, n);
    const Vec b = x.segment(n, n);
    const Vec c = x.segment(2 * n, n);
    y.resize(3 * n);
    y.segment(0, n) = M_->apply(a) + K_->apply(c);
    y.segment(n, n) = Au_->apply(b) - M_->apply(c);
    y.segment(2 * n, n) = K_->apply(a) - M_->apply(b);
}

Vec block_diag_precond_apply(const Vec& r, const BlockDiagParts& parts) {
    const int n = parts.M->rows();
    if (r.size() != 3 * n) {
        throw std::invalid_argument("block_diag_precond_apply: dimension mismatch");
    }
    Vec out(3 * n);
    out.segment(0, n) = parts.inv_mass->apply(r.segment(0, n));
    out.segment(n, n) = parts.inv_control->apply(r.segment(n, n));
    // S^{-1} = K^{-1} M K^{-1} for S = K M^{-1} K.
    out.segment(2 * n, n) = parts.K_factor->solve(
        parts.M->apply(parts.K_factor->solve(r.segment(2 * n, n))));
    return out;
}

void PdasSystemOp::apply(const Vec& x, Vec& y) const {
    const int n = M_->rows();
    const int m = MII_->rows();
    const Vec a = x.segment(0, n);
    const Vec b = x.segment(n, m);
    const Vec c = x.segment(n + m, n);
    y.resize(2 * n + m);
    y.segment(0, n) = M_->apply(a) + K_->apply(c);
    y.segment(n, m) = MII_->apply(b) - McolsI_->apply_transpose(c);
    y.segment(n + m, n) = K_->apply(a) - McolsI_->apply(b);
}

Vec block_tri_precond_apply(const Vec& r, const BlockTriParts& parts) {
    const int n = parts.M->rows();
    const int m = parts.M_cols_inactive->cols();
    if (r.size() != 2 * n + m) {
        throw std::invalid_argument("block_tri_precond_apply: dimension mismatch");
    }
    Vec out(2 * n + m);
    out.segment(0, n) = parts.inv_state_mass->apply(r.segment(0, n));
    out.segment(n, m) = parts.inv_control_block->apply(r.segment(n, m));
    const Vec rhs = -r.segment(n + m, n) - parts.K->apply(out.segment(0, n)) +
                    parts.M_cols_inactive->apply(out.segment(n, m));
    out.segment(n + m, n) =
        parts.K_factor->solve(parts.M->apply(parts.K_factor->solve(rhs)));
    return out;
}

}  // namespace eoc
