/*
 * admm.cpp
 * Shared iteration engine for the three Phase-I variants.
 */
#include "eoc/admm.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "eoc/krylov.hpp"
#include "eoc/precond.hpp"

namespace eoc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::maxit: return "maxit";
        case SolveStatus::breakdown: return "breakdown";
        case SolveStatus::indefinite: return "indefinite";
    }
    return "unknown";
}

void validate(const ProblemSpec& spec, const AdmmConfig& cfg,
              const IterateState& init) {
    if (spec.fem.n == 0) {
        throw std::invalid_argument("admm: problem has no interior dofs");
    }
    if (cfg.sigma < 0.0 || cfg.tau < 0.0 || cfg.theta < 0.0 || cfg.epsilon0 < 0.0) {
        throw std::invalid_argument("admm: negative parameter");
    }
    if (cfg.tol <= 0.0 || cfg.maxit < 1) {
        throw std::invalid_argument("admm: need tol > 0 and maxit >= 1");
    }
    const int n = spec.fem.n;
    if (init.u.size() != n || init.z.size() != n || init.lambda.size() != n) {
        throw std::invalid_argument("admm: init dimensions disagree with problem");
    }
}

AdmmResult admm_run(const ProblemSpec& spec, AdmmConfig cfg, IterateState state) {
    const auto t0 = Clock::now();
    validate(spec, cfg, state);
    const auto& fem = spec.fem;
    const int n = fem.n;
    const double alpha = spec.alpha;

    AdmmResult res;
    AdmmTrace& tr = res.trace;
    tr.variant = cfg.variant;
    const double sigma = cfg.sigma > 0.0 ? cfg.sigma : 0.1 * alpha;
    const double tau =
        cfg.tau > 0.0 ? cfg.tau
                      : (cfg.variant == AdmmVariant::ihadmm ? 1.0 : 1.618);
    const double gamma = alpha + sigma;
    tr.sigma = sigma;
    tr.tau = tau;
    if (cfg.variant == AdmmVariant::ihadmm &&
        (tau > 1.0 || sigma > 0.25 * alpha)) {
        tr.message +=
            "warning: outside the convergence-guarantee range "
            "(tau in (0,1], sigma in (0, alpha/4]); ";
    }
    // Safety-inflated operator-norm estimate for the inner-tolerance map.
    const double nu = 1.1 * fem.mk_inv_norm;

    const bool two_block = cfg.variant != AdmmVariant::classical;
    std::optional<SparseMatrix> G, Au;
    std::shared_ptr<const CholeskyFactor> Gfac;
    std::unique_ptr<ChebyshevOperator> chebM, chebAu;
    std::unique_ptr<LinearOperator> A_op, P_op;
    if (two_block) {
        G = add_scaled(fem.M, std::sqrt(gamma), fem.K);
        Gfac = sparse_direct_solve(*G);
        A_op = std::make_unique<Saddle2x2Op>(fem.M, fem.K, gamma);
        P_op = std::make_unique<PmhssPrecond>(Gfac, gamma);
    } else {
        Au = scale_plus_identity(alpha, fem.M, sigma);
        A_op = std::make_unique<Saddle3x3Op>(fem.M, fem.K, *Au);
        chebM = std::make_unique<ChebyshevOperator>(fem.M, 20);
        chebAu = std::make_unique<ChebyshevOperator>(*Au, 20);
        P_op = std::make_unique<BlockDiagPrecond>(
            BlockDiagParts{chebM.get(), chebAu.get(), &fem.M, fem.K_factor.get()});
    }
    double theta = 0.0;
    if (cfg.variant == AdmmVariant::ladmm) {
        theta = cfg.theta > 0.0 ? cfg.theta : 1.1 * fem.m_norm;
        tr.theta = theta;
    }

    const Vec My_d = fem.M.apply(spec.y_d);
    const Vec My_c = fem.M.apply(spec.y_c);
    // Internal multiplier: plain-l2 for the classical scheme, function-space
    // (M-paired) otherwise.
    Vec lam = two_block ? state.lambda : Vec(fem.M.apply(state.lambda));

    double eps0 = cfg.epsilon0;
    if (cfg.record_iterates) tr.iterates.push_back(state);

    for (int k = 0; k < cfg.maxit; ++k) {
        Vec b;
        if (two_block) {
            b.resize(2 * n);
            b.head(n) =
                (1.0 / gamma) * (fem.K.apply(sigma * state.z - lam) + My_d);
            b.tail(n) = -My_c;
        } else {
            b.resize(3 * n);
            b.segment(0, n) = My_d;
            b.segment(n, n) = sigma * state.z - lam;
            b.segment(2 * n, n) = My_c;
        }
        if (k == 0) {
            if (eps0 <= 0.0) eps0 = std::max(1e-4 * b.norm(), 1e-300);
            tr.epsilon0 = eps0;
        }
        const double eps_k = epsilon_schedule(k, eps0);

        KrylovOptions kop;
        kop.maxit = cfg.inner_maxit;
        kop.restart = cfg.inner_restart;
        if (cfg.exact_inner) {
            kop.rel_tol = 1e-12;
        } else {
            kop.rel_tol = 0.0;
            // ||delta|| <= nu max{nu, gamma} (||r1|| + ||r2||) for the 2x2
            // system and max{1, nu, nu^2} (||r1||+||r2||+||r3||) for the 3x3;
            // the stacked l2 target absorbs the sqrt(blocks) factor.
            kop.abs_tol = two_block
                              ? eps_k / (2.0 * nu * std::max(nu, gamma))
                              : eps_k / (std::sqrt(3.0) *
                                         std::max({1.0, nu, nu * nu}));
        }
        const SolveReport rep = gmres(*A_op, b, kop, P_op.get());
        if (!rep.converged) {
            std::ostringstream os;
            os << "u-step solver failure at iteration " << k + 1
               << " (status=" << status_name(rep.status)
               << ", residual=" << rep.final_residual << ")";
            tr.message += os.str();
            break;
        }

        const Vec y = rep.x.head(n);
        const Vec u = two_block ? Vec(rep.x.tail(n)) : Vec(rep.x.segment(n, n));
        const Vec p = two_block ? Vec(gamma * u - sigma * state.z + lam)
                                : Vec(rep.x.segment(2 * n, n));

        // Error vector of the u-subproblem's stationarity, recomputed from
        // the attained inner residual.
        const Vec r = b - A_op->apply(rep.x);
        auto mkinv = [&](const Vec& v) {
            return Vec(fem.M.apply(fem.K_factor->solve(v)));
        };
        const Vec delta =
            two_block ? Vec(gamma * mkinv(r.head(n)) + mkinv(mkinv(r.tail(n))))
                      : Vec(r.segment(n, n) + mkinv(r.segment(0, n)) -
                            mkinv(mkinv(r.segment(2 * n, n))));

        Vec z_new;
        switch (cfg.variant) {
            case AdmmVariant::ihadmm:
                z_new = z_update_lumped(u, fem.M.apply(lam), fem.W, sigma,
                                        spec.a, spec.b);
                break;
            case AdmmVariant::classical:
                z_new = z_update_plain(u, lam, sigma, spec.a, spec.b);
                break;
            case AdmmVariant::ladmm:
                z_new = z_update_linearized(u, lam, state.z, fem.M, sigma,
                                            theta, spec.a, spec.b);
                break;
        }
        lam += tau * sigma * (u - z_new);

        state.u = u;
        state.z = z_new;
        state.y = y;
        state.p = p;
        state.lambda = two_block ? lam : Vec(fem.M_factor->solve(lam));
        if (!state.u.allFinite() || !state.z.allFinite() ||
            !state.lambda.allFinite()) {
            std::ostringstream os;
            os << "non-finite iterate at iteration " << k + 1;
            tr.message += os.str();
            break;
        }

        const KktReport kr = eta_admm(state, spec);
        AdmmIterationLog log;
        log.iter = k + 1;
        log.eta = kr.eta;
        log.eta_max = kr.eta_max;
        log.rh = kr.rh;
        log.inner_iters = rep.iterations;
        log.eps_k = eps_k;
        log.delta_norm = delta.norm();
        log.time_s = seconds_since(t0);
        tr.iterations.push_back(std::move(log));
        if (cfg.record_iterates) tr.iterates.push_back(state);

        if (kr.eta_max < cfg.tol) {
            tr.converged = true;
            break;
        }
    }

    if (!tr.converged && tr.message.empty()) tr.message = "maxit reached";
    tr.total_time_s = seconds_since(t0);
    res.state = std::move(state);
    return res;
}

}  // namespace

AdmmConfig make_admm_config(AdmmVariant variant) {
    AdmmConfig cfg;
    cfg.variant = variant;
    cfg.tau = variant == AdmmVariant::ihadmm ? 1.0 : 1.618;
    return cfg;
}

AdmmResult ihadmm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                        const IterateState& init) {
    AdmmConfig c = cfg;
    c.variant = AdmmVariant::ihadmm;
    return admm_run(spec, c, init);
}

AdmmResult classical_admm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                                const IterateState& init) {
    AdmmConfig c = cfg;
    c.variant = AdmmVariant::classical;
    return admm_run(spec, c, init);
}

AdmmResult ladmm_solve(const ProblemSpec& spec, const AdmmConfig& cfg,
                       const IterateState& init) {
    AdmmConfig c = cfg;
    c.variant = AdmmVariant::ladmm;
    return admm_run(spec, c, init);
}

double epsilon_schedule(int k, double epsilon0) {
    if (k < 0) {
        throw std::invalid_argument("epsilon_schedule: k must be >= 0");
    }
    if (epsilon0 <= 0.0) {
        throw std::invalid_argument("epsilon_schedule: epsilon0 must be positive");
    }
    const double kk = static_cast<double>(k) + 1.0;
    return epsilon0 / (kk * kk);
}

Vec z_update_lumped(const Vec& u, const Vec& M_lambda, const Vec& W,
                    double sigma, double a, double b) {
    const Vec v = u + (M_lambda.array() / (sigma * W.array())).matrix();
    return project_box(v, a, b);
}

Vec z_update_plain(const Vec& u, const Vec& lambda_plain, double sigma,
                   double a, double b) {
    return project_box(u + lambda_plain / sigma, a, b);
}

Vec z_update_linearized(const Vec& u, const Vec& lambda, const Vec& z_prev,
                        const SparseMatrix& M, double sigma, double theta,
                        double a, double b) {
    const Vec v =
        z_prev + (1.0 / (sigma * theta)) * M.apply(sigma * u + lambda - sigma * z_prev);
    return project_box(v, a, b);
}

double descent_diagnostic(const IterateState& prev, const IterateState& next,
                          const IterateState& reference, const ProblemSpec& spec,
                          const AdmmConfig& cfg) {
    const auto& fem = spec.fem;
    const double sigma = cfg.sigma > 0.0 ? cfg.sigma : 0.1 * spec.alpha;
    const double tau = cfg.tau > 0.0 ? cfg.tau : 1.0;

    auto m_norm2 = [&](const Vec& v) { return v.dot(fem.M.apply(v)); };
    auto w_quad = [&](const Vec& v) { return v.dot(fem.W.cwiseProduct(v)); };

    const Vec delta = reduced_gradient(next.u, spec) + fem.M.apply(prev.lambda) +
                      sigma * fem.M.apply(next.u - prev.z);

    const double lhs =
        delta.dot(next.u - reference.u) +
        (1.0 / (2.0 * tau * sigma)) * (m_norm2(prev.lambda - reference.lambda) -
                                       m_norm2(next.lambda - reference.lambda)) +
        (sigma / 2.0) *
            (m_norm2(prev.z - reference.z) - m_norm2(next.z - reference.z));

    // ||v||_T^2 with T = (reduced Hessian) - (sigma/2)(W - M); the Hessian
    // quadratic form is alpha ||v||_M^2 + w' M w with w = K^{-1} M v.
    auto t_norm2 = [&](const Vec& v) {
        const Vec w = fem.K_factor->solve(fem.M.apply(v));
        const double hess = spec.alpha * m_norm2(v) + w.dot(fem.M.apply(w));
        return hess - (sigma / 2.0) * (w_quad(v) - m_norm2(v));
    };

    const Vec du = next.u - reference.u;
    const Vec dz = next.z - reference.z;
    const Vec r1 = next.u - next.z;
    const double rhs = t_norm2(du) +
                       (sigma / 2.0) * (w_quad(dz) - m_norm2(dz)) +
                       (sigma / 2.0) * (w_quad(r1) - tau * m_norm2(r1)) +
                       (sigma / 2.0) * m_norm2(next.u - prev.z);
    return lhs - rhs;
}

}  // namespace eoc
