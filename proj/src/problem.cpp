/*
 * problem.cpp
 * Reduced objective/gradient, KKT residual measures, benchmark instances.
 */
#include "eoc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eoc {

namespace {

constexpr double kBoundTie = 1e-12;  // |z_i - bound| tolerance for the normal cone

void check_problem(const ProblemSpec& spec) {
    if (spec.alpha <= 0.0) {
        throw std::invalid_argument("ProblemSpec: alpha must be positive");
    }
    if (!(spec.a < spec.b)) {
        throw std::invalid_argument("ProblemSpec: need a < b");
    }
    if (spec.y_d.size() != spec.fem.n || spec.y_c.size() != spec.fem.n) {
        throw std::invalid_argument("ProblemSpec: data length != interior dof count");
    }
}

}  // namespace

ProblemSpec make_problem(FemSystem fem, double alpha, double a, double b,
                         Vec y_d, Vec y_c) {
    ProblemSpec spec;
    spec.fem = std::move(fem);
    spec.alpha = alpha;
    spec.a = a;
    spec.b = b;
    spec.y_d = std::move(y_d);
    spec.y_c = std::move(y_c);
    check_problem(spec);
    return spec;
}

IterateState zero_state(int n) {
    IterateState s;
    s.u = Vec::Zero(n);
    s.z = Vec::Zero(n);
    s.lambda = Vec::Zero(n);
    s.y = Vec::Zero(n);
    s.p = Vec::Zero(n);
    s.mu = Vec::Zero(n);
    return s;
}

Vec solve_state(const Vec& u, const ProblemSpec& spec) {
    return spec.fem.K_factor->solve(spec.fem.M.apply(u + spec.y_c));
}

Vec solve_adjoint(const Vec& y, const ProblemSpec& spec) {
    return spec.fem.K_factor->solve(spec.fem.M.apply(spec.y_d - y));
}

double reduced_objective(const Vec& u, const ProblemSpec& spec) {
    const Vec d = solve_state(u, spec) - spec.y_d;
    return 0.5 * d.dot(spec.fem.M.apply(d)) +
           0.5 * spec.alpha * u.dot(spec.fem.M.apply(u));
}

Vec reduced_gradient(const Vec& u, const ProblemSpec& spec) {
    const Vec y = solve_state(u, spec);
    const Vec w = spec.fem.K_factor->solve(spec.fem.M.apply(y - spec.y_d));
    return spec.fem.M.apply(w) + spec.alpha * spec.fem.M.apply(u);
}

Vec project_box(const Vec& v, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("project_box: need a < b");
    }
    return v.cwiseMax(a).cwiseMin(b);
}

KktReport kkt_residual_rh(const IterateState& state, const ProblemSpec& spec) {
    KktReport rep;
    const Vec w = spec.fem.M.apply(state.lambda);
    rep.rh_gradient = (w + reduced_gradient(state.u, spec)).squaredNorm();
    for (int i = 0; i < state.z.size(); ++i) {
        double d;
        if (std::abs(state.z[i] - spec.a) <= kBoundTie) {
            d = std::max(0.0, w[i]);
        } else if (std::abs(state.z[i] - spec.b) <= kBoundTie) {
            d = std::max(0.0, -w[i]);
        } else {
            d = w[i];
        }
        rep.rh_normal_cone += d * d;
    }
    rep.rh_consistency = (state.u - state.z).squaredNorm();
    rep.rh = rep.rh_gradient + rep.rh_normal_cone + rep.rh_consistency;
    return rep;
}

KktReport eta_admm(const IterateState& state, const ProblemSpec& spec) {
    const auto& fem = spec.fem;
    KktReport rep = kkt_residual_rh(state, spec);
    const Vec My_c = fem.M.apply(spec.y_c);
    const Vec My_d = fem.M.apply(spec.y_d);
    const Vec Ml = fem.M.apply(state.lambda);
    rep.eta = {
        (fem.K.apply(state.y) - fem.M.apply(state.u) - My_c).norm() /
            (1.0 + My_c.norm()),
        fem.M.apply(state.u - state.z).norm() / (1.0 + state.u.norm()),
        (fem.M.apply(state.y - spec.y_d) + fem.K.apply(state.p)).norm() /
            (1.0 + My_d.norm()),
        (spec.alpha * fem.M.apply(state.u) - fem.M.apply(state.p) + Ml).norm() /
            (1.0 + state.u.norm()),
        (state.z - project_box(state.z + Ml, spec.a, spec.b)).norm() /
            (1.0 + state.z.norm()),
    };
    rep.eta_max = *std::max_element(rep.eta.begin(), rep.eta.end());
    return rep;
}

KktReport eta_pdas(const IterateState& state, const ProblemSpec& spec) {
    const auto& fem = spec.fem;
    KktReport rep = kkt_residual_rh(state, spec);
    const Vec My_c = fem.M.apply(spec.y_c);
    const Vec My_d = fem.M.apply(spec.y_d);
    rep.eta = {
        (fem.K.apply(state.y) - fem.M.apply(state.u) - My_c).norm() /
            (1.0 + My_c.norm()),
        (fem.M.apply(state.y - spec.y_d) + fem.K.apply(state.p)).norm() /
            (1.0 + My_d.norm()),
        (state.u -
         project_box(state.u - spec.alpha * fem.M.apply(state.u) +
                         fem.M.apply(state.p),
                     spec.a, spec.b))
                .norm() /
            (1.0 + state.u.norm()),
    };
    rep.eta_max = *std::max_element(rep.eta.begin(), rep.eta.end());
    return rep;
}

ProblemSpec example1_spec(int level) {
    if (level < 0 || level > 5) {
        throw std::invalid_argument("example1_spec: level must be in 0..5");
    }
    FemSystem fem = build_fem_system(unit_disk_mesh(level), 0.0);
    const auto desired = [](double x, double y) {
        return (1.0 - (x * x + y * y)) * x;
    };
    const Vec y_d = project_l2(desired, fem);
    const Vec y_c = Vec::Zero(fem.n);
    ProblemSpec spec = make_problem(std::move(fem), 0.1, -0.2, 0.2, y_d, y_c);
    spec.example_id = 1;
    spec.level = level;
    return spec;
}

ProblemSpec example2_spec(int level) {
    if (level < 1 || level > 7) {
        throw std::invalid_argument("example2_spec: level must be in 1..7");
    }
    const double alpha = 1e-3;
    FemSystem fem = build_fem_system(unit_square_mesh(1 << level), 0.0);
    const auto r = [](double x, double y) {
        return std::min(1.0, std::max(0.3, 2.0 * std::sin(M_PI * x) *
                                               std::sin(M_PI * y)));
    };
    // Desired state 4 pi^2 alpha sin(pi x) sin(pi y) + S r: the adjoint then
    // equals 2 alpha sin(pi x) sin(pi y) in the limit, whose scaled box
    // projection reproduces r as the optimal control.
    const auto smooth = [alpha](double x, double y) {
        return 4.0 * M_PI * M_PI * alpha * std::sin(M_PI * x) *
               std::sin(M_PI * y);
    };
    const Vec Sr = fem.K_factor->solve(fem.M.apply(project_l2(r, fem)));
    const Vec y_d = project_l2(smooth, fem) + Sr;
    const Vec y_c = Vec::Zero(fem.n);
    ProblemSpec spec = make_problem(std::move(fem), alpha, 0.3, 1.0, y_d, y_c);
    spec.example_id = 2;
    spec.level = level;
    spec.exact_control = r;
    return spec;
}

}  // namespace eoc
