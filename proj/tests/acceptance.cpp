/*
 * acceptance.cpp
 * End-to-end acceptance checks at desk scale. Prints one PASS/FAIL line per
 * criterion; the exit code is the number of failed criteria.
 */
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eoc/checks.hpp"
#include "eoc/driver.hpp"

using namespace eoc;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

struct LevelRuns {
    ProblemSpec spec;
    TwoPhaseResult two_phase;
    AdmmResult ihadmm, classical, ladmm;
    PdasResult cold_pdas;
    double e2 = 0.0;
    double two_phase_time = 0.0;
    double ihadmm_time = 0.0;
    double classical_time = 0.0;
    double ladmm_time = 0.0;
};

int report(int id, bool pass, const std::string& detail) {
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << " "
              << detail << std::endl;
    return pass ? 0 : 1;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

double m_norm(const Vec& v, const ProblemSpec& spec) {
    return std::sqrt(v.dot(spec.fem.M.apply(v)));
}

}  // namespace

int main() {
    const std::vector<int> levels = {4, 5, 6};
    std::map<int, LevelRuns> runs;

    for (int level : levels) {
        LevelRuns& r = runs[level];
        r.spec = example2_spec(level);
        double t = now_s();
        r.two_phase = two_phase_solve(r.spec, default_phase1_config(), PdasConfig{});
        r.two_phase_time = now_s() - t;
        r.e2 = control_error_l2(r.two_phase.state.u, r.spec);

        AdmmConfig cfg = make_admm_config(AdmmVariant::ihadmm);
        t = now_s();
        r.ihadmm = ihadmm_solve(r.spec, cfg, zero_state(r.spec.fem.n));
        r.ihadmm_time = now_s() - t;

        cfg = make_admm_config(AdmmVariant::classical);
        t = now_s();
        r.classical = classical_admm_solve(r.spec, cfg, zero_state(r.spec.fem.n));
        r.classical_time = now_s() - t;

        cfg = make_admm_config(AdmmVariant::ladmm);
        t = now_s();
        r.ladmm = ladmm_solve(r.spec, cfg, zero_state(r.spec.fem.n));
        r.ladmm_time = now_s() - t;

        PdasConfig pc;
        pc.line_search = true;
        r.cold_pdas = pdas_globalized(r.spec, pc, zero_state(r.spec.fem.n));
    }

    int failures = 0;

    {  // 1: error decreases with refinement at the expected order.
        bool pass = true;
        std::ostringstream detail;
        double total_time = 0.0;
        std::vector<double> e2s, eocs;
        for (int level : levels) {
            const LevelRuns& r = runs.at(level);
            pass = pass && r.two_phase.converged;
            e2s.push_back(r.e2);
            total_time += r.two_phase_time;
        }
        for (std::size_t i = 1; i < e2s.size(); ++i) {
            pass = pass && e2s[i] < e2s[i - 1];
            const double h_prev = runs.at(levels[i - 1]).spec.fem.mesh.h;
            const double h_cur = runs.at(levels[i]).spec.fem.mesh.h;
            const double eoc = std::log(e2s[i - 1] / e2s[i]) / std::log(h_prev / h_cur);
            eocs.push_back(eoc);
            pass = pass && eoc >= 1.2 && eoc <= 1.8;
        }
        pass = pass && e2s.front() >= 0.0157 / 2.0 && e2s.front() <= 0.0157 * 2.0;
        pass = pass && total_time < 120.0;
        detail << "E2 = " << fmt(e2s[0]) << " " << fmt(e2s[1]) << " " << fmt(e2s[2])
               << ", EOC = " << fmt(eocs[0]) << " " << fmt(eocs[1]) << ", time "
               << fmt(total_time, 3) << " s";
        failures += report(1, pass, detail.str());
    }

    {  // 2: iteration counts stay in a mesh-independent window.
        bool pass = true;
        std::ostringstream detail;
        double total_time = 0.0;
        int lo = 1 << 30, hi = 0;
        detail << "ihadmm iterations =";
        for (int level : levels) {
            const LevelRuns& r = runs.at(level);
            const int iters = static_cast<int>(r.ihadmm.trace.iterations.size());
            pass = pass && r.ihadmm.trace.converged && iters >= 10 && iters <= 60;
            lo = std::min(lo, iters);
            hi = std::max(hi, iters);
            total_time += r.ihadmm_time;
            detail << " " << iters;
        }
        pass = pass && hi <= 2 * lo && total_time < 120.0;
        detail << " (window [10, 60], spread factor "
               << fmt(static_cast<double>(hi) / lo, 3) << " of allowed 2), time "
               << fmt(total_time, 3) << " s";
        failures += report(2, pass, detail.str());
    }

    {  // 3: the mass-lumped scheme needs the fewest iterations.
        bool pass = true;
        std::ostringstream detail;
        for (int level : levels) {
            const LevelRuns& r = runs.at(level);
            const int ih = static_cast<int>(r.ihadmm.trace.iterations.size());
            const int cl = static_cast<int>(r.classical.trace.iterations.size());
            const int la = static_cast<int>(r.ladmm.trace.iterations.size());
            pass = pass && r.classical.trace.converged && r.ladmm.trace.converged;
            pass = pass && cl >= ih && la >= ih;
            detail << "level " << level << ": " << cl << "/" << la << " vs " << ih
                   << "  ";
        }
        failures += report(
            3, pass,
            "expect classical/linearized >= lumped iterations; " + detail.str());
    }

    {  // 4: warm start finishes fast and matches the cold-start solution.
        bool pass = true;
        std::ostringstream detail;
        for (int level : levels) {
            const LevelRuns& r = runs.at(level);
            const auto& logs = r.two_phase.trace.phase2.iterations;
            const int iters = static_cast<int>(logs.size());
            pass = pass && r.two_phase.converged && iters >= 1 && iters <= 15;
            pass = pass && !logs.empty() && logs.back().eta_max <= 1e-11;
            pass = pass && r.cold_pdas.trace.converged;
            const double du =
                m_norm(r.two_phase.state.u - r.cold_pdas.state.u, r.spec);
            pass = pass && du <= 1e-8;
            detail << "level " << level << ": " << iters << " iters, |du|_M = "
                   << fmt(du, 2) << "  ";
        }
        failures += report(4, pass, detail.str());
    }

    {  // 5: every solver agrees with a bisection oracle on the single-dof case.
        FemSystem fem = build_fem_system(unit_square_mesh(2), 0.0);
        Vec y_d(1), y_c(1);
        y_d << 1.0;
        y_c << 0.0;
        const ProblemSpec spec =
            make_problem(std::move(fem), 0.1, -0.2, 0.2, y_d, y_c);

        double lo = spec.a - 10.0, hi = spec.b + 10.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            Vec um(1);
            um << mid;
            (reduced_gradient(um, spec)[0] > 0.0 ? hi : lo) = mid;
        }
        const double u_star = std::min(spec.b, std::max(spec.a, 0.5 * (lo + hi)));
        Vec us(1);
        us << u_star;
        const Vec fixed_point_gap =
            us - project_box(us - reduced_gradient(us, spec), spec.a, spec.b);
        bool pass = std::abs(fixed_point_gap[0]) <= 1e-12;

        std::ostringstream detail;
        detail << "u* = " << fmt(u_star, 10);
        std::vector<std::pair<std::string, double>> found;
        for (AdmmVariant variant :
             {AdmmVariant::ihadmm, AdmmVariant::classical, AdmmVariant::ladmm}) {
            AdmmConfig cfg = make_admm_config(variant);
            cfg.tol = 1e-10;
            cfg.maxit = 5000;
            cfg.exact_inner = true;
            AdmmResult res;
            switch (variant) {
                case AdmmVariant::classical:
                    res = classical_admm_solve(spec, cfg, zero_state(1));
                    break;
                case AdmmVariant::ladmm:
                    res = ladmm_solve(spec, cfg, zero_state(1));
                    break;
                default:
                    res = ihadmm_solve(spec, cfg, zero_state(1));
            }
            found.emplace_back("admm", res.state.u[0]);
            pass = pass && res.trace.converged;
        }
        const PdasResult pd = pdas_solve(spec, PdasConfig{}, zero_state(1));
        found.emplace_back("pdas", pd.state.u[0]);
        pass = pass && pd.trace.converged;
        const TwoPhaseResult tp =
            two_phase_solve(spec, default_phase1_config(), PdasConfig{});
        found.emplace_back("two-phase", tp.state.u[0]);
        pass = pass && tp.converged;
        double worst = 0.0;
        for (const auto& [name, value] : found) {
            worst = std::max(worst, std::abs(value - u_star));
        }
        pass = pass && worst <= 1e-8;
        detail << ", worst deviation " << fmt(worst, 2);
        failures += report(5, pass, detail.str());
    }

    {  // 6: the property-check suite passes quickly.
        const double t = now_s();
        const std::vector<CheckResult> checks = run_property_checks(20240817u);
        const double elapsed = now_s() - t;
        bool pass = !checks.empty() && elapsed < 30.0;
        std::ostringstream detail;
        for (const CheckResult& c : checks) {
            pass = pass && c.pass;
            if (!c.pass) detail << c.name << " failed (" << c.detail << ") ";
        }
        detail << checks.size() << " checks, " << fmt(elapsed, 3) << " s";
        failures += report(6, pass, detail.str());
    }

    {  // 7: absolute timings beyond desk scale are declared out of scope;
       //    the relative ordering is asserted instead.
        bool pass = true;
        std::ostringstream detail;
        detail << "finest-resolution rows and absolute CPU-time columns are "
                  "declared not reproducible at desk scale; expect lumped "
                  "faster than classical per level:";
        for (int level : levels) {
            const LevelRuns& r = runs.at(level);
            pass = pass && r.ihadmm_time < r.classical_time;
            detail << " level " << level << " " << fmt(r.ihadmm_time, 3)
                   << " s vs " << fmt(r.classical_time, 3) << " s;";
        }
        failures += report(7, pass, detail.str());
    }

    return failures;
}
