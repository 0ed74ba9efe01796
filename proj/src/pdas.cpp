/*
 * pdas.cpp
 * Active-set determination, reduced Newton step, plain and globalized loops.
 */
#include "eoc/pdas.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
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

void validate(const ProblemSpec& spec, const PdasConfig& cfg,
              const IterateState& init) {
    if (cfg.c <= 0.0 || cfg.tol <= 0.0 || cfg.maxit < 1 || cfg.inner_tol <= 0.0) {
        throw std::invalid_argument("pdas: invalid config");
    }
    if (init.u.size() != spec.fem.n || init.mu.size() != spec.fem.n) {
        throw std::invalid_argument("pdas: init dimensions disagree with problem");
    }
}

std::vector<char> set_signature(const ActiveSets& sets, int n) {
    std::vector<char> sig(n, 0);
    for (int i : sets.lower) sig[i] = 1;
    for (int i : sets.upper) sig[i] = 2;
    return sig;
}

IterateState state_from_primal_dual(const Vec& u, const Vec& mu,
                                    const ProblemSpec& spec) {
    IterateState st;
    st.u = u;
    st.mu = mu;
    st.y = solve_state(u, spec);
    st.p = solve_adjoint(st.y, spec);
    st.z = u;
    st.lambda = spec.fem.M_factor->solve(mu);
    return st;
}

}  // namespace

ActiveSets determine_sets(const Vec& u, const Vec& mu, double a, double b,
                          double c) {
    if (u.size() != mu.size()) {
        throw std::invalid_argument("determine_sets: dimension mismatch");
    }
    ActiveSets sets;
    for (int i = 0; i < u.size(); ++i) {
        if (mu[i] + c * (u[i] - a) < 0.0) {
            sets.lower.push_back(i);
        } else if (mu[i] + c * (u[i] - b) > 0.0) {
            sets.upper.push_back(i);
        } else {
            sets.inactive.push_back(i);
        }
    }
    return sets;
}

PdasStepResult pdas_step(const ActiveSets& sets, const ProblemSpec& spec,
                         const PdasConfig& cfg) {
    const auto& fem = spec.fem;
    const int n = fem.n;
    {
        std::vector<char> seen(n, 0);
        for (const auto* part : {&sets.lower, &sets.upper, &sets.inactive}) {
            for (int i : *part) {
                if (i < 0 || i >= n || seen[i]) {
                    throw std::invalid_argument("pdas_step: sets do not partition dofs");
                }
                seen[i] = 1;
            }
        }
        for (char s : seen) {
            if (!s) throw std::invalid_argument("pdas_step: sets do not partition dofs");
        }
    }

    Vec s = Vec::Zero(n);
    for (int i : sets.lower) s[i] = spec.a;
    for (int i : sets.upper) s[i] = spec.b;

    PdasStepResult out;
    IterateState& st = out.state;
    const int m = static_cast<int>(sets.inactive.size());
    if (m == 0) {
        // Fully pinned control: state and adjoint by two direct solves.
        st.u = s;
        st.y = solve_state(st.u, spec);
        st.p = solve_adjoint(st.y, spec);
    } else {
        const SparseMatrix MII =
            fem.M.submatrix(sets.inactive, sets.inactive).scaled(spec.alpha);
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        const SparseMatrix McolsI = fem.M.submatrix(all, sets.inactive);

        const PdasSystemOp A(fem.M, fem.K, MII, McolsI);
        const ChebyshevOperator cheb_m(fem.M, 20);
        const ChebyshevOperator cheb_mii(MII, 20);
        const BlockTriPrecond P(BlockTriParts{&cheb_m, &cheb_mii, &fem.K, &fem.M,
                                              &McolsI, fem.K_factor.get()});

        const Vec Ms = fem.M.apply(s);
        Vec b(2 * n + m);
        b.segment(0, n) = fem.M.apply(spec.y_d);
        for (int j = 0; j < m; ++j) b[n + j] = -spec.alpha * Ms[sets.inactive[j]];
        b.segment(n + m, n) = fem.M.apply(spec.y_c) + Ms;

        KrylovOptions kop;
        kop.rel_tol = cfg.inner_tol;
        kop.maxit = cfg.inner_maxit;
        kop.restart = cfg.inner_restart;
        const SolveReport rep = gmres(A, b, kop, &P);
        out.inner_iters = rep.iterations;
        out.inner_converged = rep.converged;
        out.inner_residual = rep.final_residual;
        if (!rep.converged) {
            std::ostringstream os;
            os << "reduced-system residual " << rep.final_residual
               << " missed target " << cfg.inner_tol;
            if (rep.final_residual > 1e-9) {
                throw std::runtime_error("pdas_step: " + os.str());
            }
            out.warning = os.str();
        }
        st.y = rep.x.segment(0, n);
        st.p = rep.x.segment(n + m, n);
        st.u = s;
        for (int j = 0; j < m; ++j) st.u[sets.inactive[j]] = rep.x[n + j];
    }

    // mu = M p - alpha M u on the active sets, zero on the inactive set.
    const Vec g = fem.M.apply(st.p) - spec.alpha * fem.M.apply(st.u);
    st.mu = Vec::Zero(n);
    for (int i : sets.lower) st.mu[i] = g[i];
    for (int i : sets.upper) st.mu[i] = g[i];
    st.z = st.u;
    st.lambda = fem.M_factor->solve(st.mu);
    return out;
}

PdasResult pdas_solve(const ProblemSpec& spec, const PdasConfig& cfg,
                      const IterateState& init) {
    const auto t0 = Clock::now();
    validate(spec, cfg, init);
    const int n = spec.fem.n;

    PdasResult res;
    res.state = init;
    PdasTrace& tr = res.trace;
    Vec u = init.u;
    Vec mu = init.mu;
    std::vector<std::vector<char>> seen;

    for (int k = 1; k <= cfg.maxit; ++k) {
        const ActiveSets sets = determine_sets(u, mu, spec.a, spec.b, cfg.c);
        auto sig = set_signature(sets, n);
        if (std::find(seen.begin(), seen.end(), sig) != seen.end()) {
            // Repeating sets reproduce the previous step exactly; no further
            // progress is possible.
            const KktReport kr = eta_pdas(res.state, spec);
            tr.converged = kr.eta_max < cfg.tol;
            tr.status = tr.converged ? PdasStatus::converged : PdasStatus::stagnated;
            if (!tr.converged) tr.message += "active sets repeated; ";
            break;
        }
        seen.push_back(std::move(sig));

        PdasStepResult step;
        try {
            step = pdas_step(sets, spec, cfg);
        } catch (const std::runtime_error& e) {
            tr.status = PdasStatus::solver_failure;
            tr.message += e.what();
            break;
        }
        if (!step.warning.empty()) tr.message += step.warning + "; ";
        res.state = std::move(step.state);
        u = res.state.u;
        mu = res.state.mu;

        const KktReport kr = eta_pdas(res.state, spec);
        PdasIterationLog log;
        log.iter = k;
        log.n_lower = static_cast<int>(sets.lower.size());
        log.n_upper = static_cast<int>(sets.upper.size());
        log.eta = kr.eta;
        log.eta_max = kr.eta_max;
        log.inner_iters = step.inner_iters;
        log.step_length = 1.0;
        log.time_s = seconds_since(t0);
        tr.iterations.push_back(std::move(log));

        if (kr.eta_max < cfg.tol) {
            tr.converged = true;
            tr.status = PdasStatus::converged;
            break;
        }
    }
    if (!tr.converged && tr.status == PdasStatus::maxit && tr.message.empty()) {
        tr.message = "maxit reached";
    }
    return res;
}

Vec pdas_merit_residual(const Vec& u, const Vec& mu, const ProblemSpec& spec,
                        double c) {
    const auto& fem = spec.fem;
    const int n = fem.n;
    const Vec y = solve_state(u, spec);
    const Vec p = solve_adjoint(y, spec);
    Vec G(2 * n);
    G.head(n) = spec.alpha * fem.M.apply(u) - fem.M.apply(p) + mu;
    for (int i = 0; i < n; ++i) {
        G[n + i] = mu[i] - std::max(0.0, mu[i] + c * (u[i] - spec.b)) -
                   std::min(0.0, mu[i] + c * (u[i] - spec.a));
    }
    return G;
}

PdasResult pdas_globalized(const ProblemSpec& spec, const PdasConfig& cfg,
                           const IterateState& init) {
    const auto t0 = Clock::now();
    validate(spec, cfg, init);

    PdasResult res;
    res.state = init;
    PdasTrace& tr = res.trace;
    Vec u = init.u;
    Vec mu = init.mu;

    for (int k = 1; k <= cfg.maxit; ++k) {
        const ActiveSets sets = determine_sets(u, mu, spec.a, spec.b, cfg.c);
        PdasStepResult step;
        try {
            step = pdas_step(sets, spec, cfg);
        } catch (const std::runtime_error& e) {
            tr.status = PdasStatus::solver_failure;
            tr.message += e.what();
            break;
        }
        if (!step.warning.empty()) tr.message += step.warning + "; ";

        const Vec du = step.state.u - u;
        const Vec dmu = step.state.mu - mu;
        const double move = du.lpNorm<Eigen::Infinity>() + dmu.lpNorm<Eigen::Infinity>();
        if (move <= 1e-15 * (1.0 + u.lpNorm<Eigen::Infinity>() +
                             mu.lpNorm<Eigen::Infinity>())) {
            // Newton target equals the current point; nothing can change.
            res.state = state_from_primal_dual(u, mu, spec);
            const KktReport kr = eta_pdas(res.state, spec);
            tr.converged = kr.eta_max < cfg.tol;
            tr.status = tr.converged ? PdasStatus::converged : PdasStatus::stagnated;
            if (!tr.converged) tr.message += "search direction vanished; ";
            break;
        }

        const double merit_old =
            0.5 * pdas_merit_residual(u, mu, spec, cfg.c).squaredNorm();
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 20; ++h) {
            const double merit_new =
                0.5 * pdas_merit_residual(u + t * du, mu + t * dmu, spec, cfg.c)
                          .squaredNorm();
            if (merit_new <= (1.0 - 2e-4 * t) * merit_old) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            t = 1.0;
            tr.message += "warning: line search exhausted, taking full step; ";
        }
        u += t * du;
        mu += t * dmu;
        res.state = state_from_primal_dual(u, mu, spec);

        const KktReport kr = eta_pdas(res.state, spec);
        PdasIterationLog log;
        log.iter = k;
        log.n_lower = static_cast<int>(sets.lower.size());
        log.n_upper = static_cast<int>(sets.upper.size());
        log.eta = kr.eta;
        log.eta_max = kr.eta_max;
        log.inner_iters = step.inner_iters;
        log.step_length = t;
        log.time_s = seconds_since(t0);
        tr.iterations.push_back(std::move(log));

        if (kr.eta_max < cfg.tol) {
            tr.converged = true;
            tr.status = PdasStatus::converged;
            break;
        }
    }
    if (!tr.converged && tr.status == PdasStatus::maxit && tr.message.empty()) {
        tr.message = "maxit reached";
    }
    return res;
}

}  // namespace eoc
