#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "eoc/problem.hpp"

using namespace eoc;

namespace {

// Single-dof instance: K = 4, M = W = 1/8, S = 1/32.
ProblemSpec one_dof_spec() {
    FemSystem fem = build_fem_system(unit_square_mesh(2), 0.0);
    Vec y_d(1), y_c(1);
    y_d << 1.0;
    y_c << 0.0;
    return make_problem(std::move(fem), 0.1, -0.2, 0.2, y_d, y_c);
}

}  // namespace

TEST_CASE("make_problem validates its inputs") {
    const Vec v = Vec::Zero(1);
    CHECK_THROWS_AS(make_problem(build_fem_system(unit_square_mesh(2), 0.0), -1.0,
                                 0.0, 1.0, v, v),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_problem(build_fem_system(unit_square_mesh(2), 0.0), 1.0,
                                 1.0, 1.0, v, v),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_problem(build_fem_system(unit_square_mesh(2), 0.0), 1.0,
                                 0.0, 1.0, Vec::Zero(2), v),
                    std::invalid_argument);
}

TEST_CASE("single-dof objective and gradient match the closed form") {
    const ProblemSpec spec = one_dof_spec();
    const double S = 0.125 / 4.0;
    for (double u : {-0.15, 0.0, 0.1, 0.3}) {
        Vec uv(1);
        uv << u;
        const double f_expect =
            0.5 * 0.125 * (S * u - 1.0) * (S * u - 1.0) + 0.05 * 0.125 * u * u;
        CHECK(reduced_objective(uv, spec) == doctest::Approx(f_expect).epsilon(1e-14));
        const double g_expect = 0.125 * S * (S * u - 1.0) + 0.1 * 0.125 * u;
        CHECK(reduced_gradient(uv, spec)[0] ==
              doctest::Approx(g_expect).epsilon(1e-13));
    }
}

TEST_CASE("tracking term vanishes when y_d is the image of u") {
    FemSystem fem = build_fem_system(unit_square_mesh(4), 0.0);
    const int n = fem.n;
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = std::sin(1.0 + 0.4 * i);
    const Vec y_d = fem.K_factor->solve(fem.M.apply(u));
    const double alpha = 0.37;
    const ProblemSpec spec =
        make_problem(std::move(fem), alpha, -1.0, 1.0, y_d, Vec::Zero(n));
    CHECK(reduced_objective(u, spec) ==
          doctest::Approx(0.5 * alpha * u.dot(spec.fem.M.apply(u))).epsilon(1e-12));
    const Vec grad = reduced_gradient(u, spec);
    const Vec expect = alpha * spec.fem.M.apply(u);
    CHECK((grad - expect).norm() <= 1e-12 * expect.norm());
}

TEST_CASE("reduced gradient agrees with central finite differences") {
    FemSystem fem = build_fem_system(unit_square_mesh(4), 0.0);
    const int n = fem.n;
    const Vec y_d = project_l2(
        [](double x, double y) { return x * (1.0 - x) * y; }, fem);
    const ProblemSpec spec =
        make_problem(std::move(fem), 0.05, -1.0, 1.0, y_d, Vec::Zero(n));
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = dist(gen);
    const Vec grad = reduced_gradient(u, spec);
    const double step = 1e-5 * (1.0 + u.norm());
    for (int trial = 0; trial < 5; ++trial) {
        Vec d(n);
        for (int i = 0; i < n; ++i) d[i] = dist(gen);
        d /= d.norm();
        const double fd = (reduced_objective(u + step * d, spec) -
                           reduced_objective(u - step * d, spec)) /
                          (2.0 * step);
        CHECK(std::abs(fd - grad.dot(d)) <=
              1e-6 * std::max(1e-12, std::abs(grad.dot(d))));
    }
}

TEST_CASE("gradient differences are strongly monotone in the mass norm") {
    FemSystem fem = build_fem_system(unit_square_mesh(4), 0.0);
    const int n = fem.n;
    const double alpha = 0.02;
    const ProblemSpec spec = make_problem(std::move(fem), alpha, -1.0, 1.0,
                                          Vec::Ones(n), Vec::Zero(n));
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Vec u1(n), u2(n);
        for (int i = 0; i < n; ++i) {
            u1[i] = dist(gen);
            u2[i] = dist(gen);
        }
        const Vec du = u1 - u2;
        const double lhs =
            (reduced_gradient(u1, spec) - reduced_gradient(u2, spec)).dot(du);
        const double rhs = alpha * du.dot(spec.fem.M.apply(du));
        CHECK(lhs >= rhs * (1.0 - 1e-12));
    }
}

TEST_CASE("box projection clamps, is idempotent, and is nonexpansive") {
    Vec v(5);
    v << -2.0, -0.2, 0.0, 0.2, 2.0;
    const Vec p = project_box(v, -0.2, 0.2);
    CHECK(p[0] == -0.2);
    CHECK(p[1] == -0.2);
    CHECK(p[2] == 0.0);
    CHECK(p[3] == 0.2);
    CHECK(p[4] == 0.2);
    CHECK((project_box(p, -0.2, 0.2) - p).norm() == 0.0);
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec x(5), y(5);
        for (int i = 0; i < 5; ++i) {
            x[i] = dist(gen);
            y[i] = dist(gen);
        }
        CHECK((project_box(x, -0.2, 0.2) - project_box(y, -0.2, 0.2)).norm() <=
              (x - y).norm() * (1.0 + 1e-15));
    }
}

TEST_CASE("state and adjoint solves satisfy their equations") {
    const ProblemSpec spec = example2_spec(3);
    const int n = spec.fem.n;
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = std::cos(0.2 * i);
    const Vec y = solve_state(u, spec);
    CHECK((spec.fem.K.apply(y) - spec.fem.M.apply(u + spec.y_c)).norm() <=
          1e-11 * spec.fem.M.apply(u + spec.y_c).norm());
    const Vec p = solve_adjoint(y, spec);
    CHECK((spec.fem.K.apply(p) - spec.fem.M.apply(spec.y_d - y)).norm() <=
          1e-11 * std::max(1e-300, spec.fem.M.apply(spec.y_d - y).norm()));
}

TEST_CASE("single-dof KKT point zeroes every residual measure") {
    const ProblemSpec spec = one_dof_spec();
    // Unconstrained minimizer 0.3095 clamps to the upper bound.
    IterateState st = zero_state(1);
    st.u[0] = 0.2;
    st.z[0] = 0.2;
    st.lambda[0] = 0.0110546875;
    st.mu[0] = 0.0013818359375;
    st.y = solve_state(st.u, spec);
    st.p = solve_adjoint(st.y, spec);
    CHECK(st.p[0] == doctest::Approx(0.0310546875).epsilon(1e-13));
    const KktReport rh = kkt_residual_rh(st, spec);
    CHECK(rh.rh <= 1e-20);
    const KktReport ea = eta_admm(st, spec);
    REQUIRE(ea.eta.size() == 5);
    CHECK(ea.eta_max <= 1e-12);
    const KktReport ep = eta_pdas(st, spec);
    REQUIRE(ep.eta.size() == 3);
    CHECK(ep.eta_max <= 1e-12);
}

TEST_CASE("normal-cone distance follows the active-set rules") {
    const ProblemSpec spec = one_dof_spec();
    IterateState st = zero_state(1);
    st.y = solve_state(st.u, spec);
    st.p = solve_adjoint(st.y, spec);
    st.lambda[0] = 0.8;  // w = M lambda = 0.1

    st.z[0] = 0.0;  // interior: w^2
    st.u[0] = 0.0;
    CHECK(kkt_residual_rh(st, spec).rh_normal_cone == doctest::Approx(0.01));

    st.z[0] = -0.2;  // lower bound, w > 0: max(0, w)^2
    st.u[0] = -0.2;
    CHECK(kkt_residual_rh(st, spec).rh_normal_cone == doctest::Approx(0.01));

    st.z[0] = 0.2;  // upper bound, w > 0: max(0, -w)^2 = 0
    st.u[0] = 0.2;
    CHECK(kkt_residual_rh(st, spec).rh_normal_cone == doctest::Approx(0.0));

    st.lambda[0] = -0.8;
    st.z[0] = -0.2;  // lower bound, w < 0: 0
    st.u[0] = -0.2;
    CHECK(kkt_residual_rh(st, spec).rh_normal_cone == doctest::Approx(0.0));
    st.z[0] = 0.2;  // upper bound, w < 0: w^2
    st.u[0] = 0.2;
    CHECK(kkt_residual_rh(st, spec).rh_normal_cone == doctest::Approx(0.01));
}

TEST_CASE("benchmark instances echo their parameters") {
    const ProblemSpec e1 = example1_spec(2);
    CHECK(e1.alpha == 0.1);
    CHECK(e1.a == -0.2);
    CHECK(e1.b == 0.2);
    CHECK(e1.example_id == 1);
    CHECK(e1.level == 2);
    CHECK(e1.fem.mesh.domain == Domain::disk);
    CHECK(e1.fem.n == e1.fem.mesh.n_interior);
    CHECK_FALSE(static_cast<bool>(e1.exact_control));
    CHECK_THROWS_AS(example1_spec(6), std::invalid_argument);
    CHECK_THROWS_AS(example1_spec(-1), std::invalid_argument);

    const ProblemSpec e2 = example2_spec(3);
    CHECK(e2.alpha == 1e-3);
    CHECK(e2.a == 0.3);
    CHECK(e2.b == 1.0);
    CHECK(e2.fem.n == 49);
    REQUIRE(static_cast<bool>(e2.exact_control));
    CHECK(e2.exact_control(0.5, 0.5) == doctest::Approx(1.0));
    CHECK(e2.exact_control(0.05, 0.05) == doctest::Approx(0.3));
    CHECK_THROWS_AS(example2_spec(0), std::invalid_argument);
    CHECK_THROWS_AS(example2_spec(8), std::invalid_argument);
}

TEST_CASE("exact control of the square benchmark stays inside its box") {
    const ProblemSpec spec = example2_spec(4);
    for (double x = 0.05; x < 1.0; x += 0.1) {
        for (double y = 0.05; y < 1.0; y += 0.1) {
            const double r = spec.exact_control(x, y);
            CHECK(r >= 0.3);
            CHECK(r <= 1.0);
        }
    }
}
