/*
 * driver.cpp
 * Two-phase orchestration, nested-mesh prolongation, campaign execution.
 */
#include "eoc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace eoc {

namespace {

using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ProblemSpec build_spec(int example_id, int level) {
    if (example_id == 1) return example1_spec(level);
    if (example_id == 2) return example2_spec(level);
    throw std::invalid_argument("campaign: example id must be 1 or 2");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EOC_SOLVER_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

AdmmVariant variant_from_name(const std::string& name) {
    if (name == "ihadmm") return AdmmVariant::ihadmm;
    if (name == "classical") return AdmmVariant::classical;
    if (name == "ladmm") return AdmmVariant::ladmm;
    throw std::invalid_argument("campaign: unknown algorithm '" + name + "'");
}

std::string file_token(std::string name) {
    for (char& ch : name) {
        if (ch == '-') ch = '_';
    }
    return name;
}

// Empty cell for undefined values so the CSV stays numeric where defined.
std::string cell(double v, int precision, bool scientific) {
    if (!std::isfinite(v)) return "";
    std::ostringstream os;
    if (scientific) {
        os << std::scientific;
    } else {
        os << std::fixed;
    }
    os << std::setprecision(precision) << v;
    return os.str();
}

nlohmann::json record_to_json(const RunRecord& rec) {
    nlohmann::json j;
    j["level"] = rec.level;
    j["h"] = rec.h;
    j["dofs"] = rec.dofs;
    j["algorithm"] = rec.algorithm;
    j["iterations"] = rec.iterations;
    j["iterations_phase2"] = rec.iterations_phase2;
    j["final_eta"] = rec.final_eta;
    j["e2"] = rec.e2;            // NaN serializes as null
    j["eoc"] = rec.eoc_value;
    j["wall_time_s"] = rec.wall_time_s;
    j["success"] = rec.success;
    j["message"] = rec.message;
    j["trace_path"] = rec.trace_path;
    return j;
}

}  // namespace

AdmmConfig default_phase1_config() {
    AdmmConfig cfg = make_admm_config(AdmmVariant::ihadmm);
    cfg.tol = 1e-3;
    return cfg;
}

TwoPhaseResult two_phase_solve(const ProblemSpec& spec,
                               const AdmmConfig& admm_cfg,
                               const PdasConfig& pdas_cfg) {
    TwoPhaseResult out;
    AdmmResult phase1 = ihadmm_solve(spec, admm_cfg, zero_state(spec.fem.n));
    out.trace.phase1 = std::move(phase1.trace);
    out.state = std::move(phase1.state);
    if (!out.trace.phase1.converged) {
        out.message = "phase1: " + (out.trace.phase1.message.empty()
                                        ? std::string("did not converge")
                                        : out.trace.phase1.message);
        return out;
    }

    IterateState init = out.state;
    init.mu = spec.fem.M.apply(init.p - spec.alpha * init.u);
    PdasResult phase2 = pdas_solve(spec, pdas_cfg, init);
    out.trace.phase2 = std::move(phase2.trace);
    out.state = std::move(phase2.state);
    out.converged = out.trace.phase2.converged;
    if (!out.converged) {
        out.message = "phase2: " + (out.trace.phase2.message.empty()
                                        ? std::string("did not converge")
                                        : out.trace.phase2.message);
    }
    return out;
}

Vec interpolate_to_fine(const Vec& v_coarse, const Mesh& coarse,
                        const Mesh& fine) {
    const int nc = static_cast<int>(coarse.nodes.size());
    if (v_coarse.size() != coarse.n_interior) {
        throw std::invalid_argument("interpolate_to_fine: vector length mismatch");
    }
    const auto edges = mesh_edges(coarse);
    if (fine.nodes.size() != coarse.nodes.size() + edges.size() ||
        fine.triangles.size() != 4 * coarse.triangles.size()) {
        throw std::invalid_argument(
            "interpolate_to_fine: meshes are not a refinement pair");
    }
    auto close = [](const std::array<double, 2>& p,
                    const std::array<double, 2>& q) {
        return std::hypot(p[0] - q[0], p[1] - q[1]) <= 1e-12;
    };
    for (int i = 0; i < nc; ++i) {
        if (!close(fine.nodes[i], coarse.nodes[i])) {
            throw std::invalid_argument(
                "interpolate_to_fine: parent nodes disagree");
        }
    }

    Vec full = Vec::Zero(nc);
    for (int d = 0; d < coarse.n_interior; ++d) {
        full[coarse.interior_nodes[d]] = v_coarse[d];
    }
    Vec fine_full(static_cast<int>(fine.nodes.size()));
    fine_full.head(nc) = full;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [i, j] = edges[k];
        const int id = nc + static_cast<int>(k);
        const std::array<double, 2> mid = {
            0.5 * (coarse.nodes[i][0] + coarse.nodes[j][0]),
            0.5 * (coarse.nodes[i][1] + coarse.nodes[j][1])};
        if (!close(fine.nodes[id], mid)) {
            bool projected = false;
            if (coarse.domain == Domain::disk) {
                const double r = std::hypot(mid[0], mid[1]);
                if (r > 0.0) {
                    projected = close(fine.nodes[id], {mid[0] / r, mid[1] / r});
                }
            }
            if (!projected) {
                throw std::invalid_argument(
                    "interpolate_to_fine: edge midpoints disagree");
            }
        }
        fine_full[id] = 0.5 * (full[i] + full[j]);
    }

    Vec out(fine.n_interior);
    for (int d = 0; d < fine.n_interior; ++d) {
        out[d] = fine_full[fine.interior_nodes[d]];
    }
    return out;
}

double control_error_m_norm(const Vec& u, const ProblemSpec& spec) {
    if (!spec.exact_control) {
        throw std::invalid_argument("control_error_m_norm: no exact control");
    }
    if (u.size() != spec.fem.n) {
        throw std::invalid_argument("control_error_m_norm: dimension mismatch");
    }
    Vec diff(spec.fem.n);
    for (int d = 0; d < spec.fem.n; ++d) {
        const auto& p = spec.fem.mesh.nodes[spec.fem.mesh.interior_nodes[d]];
        diff[d] = u[d] - spec.exact_control(p[0], p[1]);
    }
    return std::sqrt(diff.dot(spec.fem.M.apply(diff)));
}

double control_error_l2(const Vec& u, const ProblemSpec& spec) {
    if (!spec.exact_control) {
        throw std::invalid_argument("control_error_l2: no exact control");
    }
    if (u.size() != spec.fem.n) {
        throw std::invalid_argument("control_error_l2: dimension mismatch");
    }
    const Mesh& mesh = spec.fem.mesh;
    const double boundary_value =
        std::min(spec.b, std::max(spec.a, 0.0));
    Vec full = Vec::Constant(static_cast<int>(mesh.nodes.size()),
                             boundary_value);
    for (int d = 0; d < spec.fem.n; ++d) full[mesh.interior_nodes[d]] = u[d];
    return l2_error_nodal(full, spec.exact_control, mesh, 8);
}

void write_admm_trace_csv(const std::string& path, const AdmmTrace& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "iter,eta1,eta2,eta3,eta4,eta5,eta_max,rh,inner_iters,eps_k,time_s\n";
    os << std::setprecision(16);
    for (const auto& it : trace.iterations) {
        os << it.iter;
        for (double e : it.eta) os << ',' << e;
        os << ',' << it.eta_max << ',' << it.rh << ',' << it.inner_iters << ','
           << it.eps_k << ',' << it.time_s << '\n';
    }
}

void write_pdas_trace_csv(const std::string& path, const PdasTrace& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "iter,n_lower,n_upper,eta1,eta2,eta3,eta_max,inner_iters,"
          "step_length,time_s\n";
    os << std::setprecision(16);
    for (const auto& it : trace.iterations) {
        os << it.iter << ',' << it.n_lower << ',' << it.n_upper;
        for (double e : it.eta) os << ',' << e;
        os << ',' << it.eta_max << ',' << it.inner_iters << ',' << it.step_length
           << ',' << it.time_s << '\n';
    }
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
    if (cfg.example_id != 1 && cfg.example_id != 2) {
        throw std::invalid_argument("campaign: example id must be 1 or 2");
    }
    if (cfg.levels.empty() || cfg.algorithms.empty()) {
        throw std::invalid_argument("campaign: levels and algorithms required");
    }
    for (int level : cfg.levels) {
        const bool ok = cfg.example_id == 1 ? (level >= 0 && level <= 5)
                                            : (level >= 1 && level <= 7);
        if (!ok) throw std::invalid_argument("campaign: level outside desk range");
    }
    for (const std::string& algo : cfg.algorithms) {
        if (algo != "pdas" && algo != "two-phase") variant_from_name(algo);
    }
    if (cfg.solve_tol <= 0.0 || cfg.phase1_tol <= 0.0 || cfg.phase2_tol <= 0.0 ||
        cfg.phase2_tol >= cfg.phase1_tol) {
        throw std::invalid_argument(
            "campaign: tolerances must be positive with phase2 < phase1");
    }
    if (cfg.maxit_admm < 1 || cfg.maxit_pdas < 1) {
        throw std::invalid_argument("campaign: iteration limits must be >= 1");
    }

    std::vector<int> levels = cfg.levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    fs::create_directories(cfg.out_dir);

    std::map<int, ProblemSpec> specs;
    for (int level : levels) specs.emplace(level, build_spec(cfg.example_id, level));

    // Example 1 compares against a finest-level two-phase reference through a
    // prolongation chain over every intermediate disk mesh.
    const int finest = levels.back();
    const int chain_base = levels.front();
    std::vector<Mesh> chain;
    Vec u_ref;
    bool have_ref = false;
    std::string note;
    if (cfg.example_id == 1) {
        for (int level = chain_base; level <= finest; ++level) {
            chain.push_back(unit_disk_mesh(level));
        }
        AdmmConfig p1 = default_phase1_config();
        p1.tol = cfg.phase1_tol;
        p1.maxit = cfg.maxit_admm;
        PdasConfig p2;
        p2.tol = cfg.phase2_tol;
        p2.maxit = cfg.maxit_pdas;
        const TwoPhaseResult ref = two_phase_solve(specs.at(finest), p1, p2);
        if (ref.converged) {
            u_ref = ref.state.u;
            have_ref = true;
        } else {
            note = "reference solve failed: " + ref.message;
        }
    }

    struct Task {
        int level = 0;
        std::string algo;
    };
    std::vector<Task> tasks;
    for (int level : levels) {
        for (const std::string& algo : cfg.algorithms) tasks.push_back({level, algo});
    }
    std::vector<RunRecord> records(tasks.size());

    auto run_task = [&](std::size_t ti) {
        const Task& task = tasks[ti];
        RunRecord& rec = records[ti];
        const ProblemSpec& spec = specs.at(task.level);
        rec.level = task.level;
        rec.h = spec.fem.mesh.h;
        rec.dofs = spec.fem.n;
        rec.algorithm = task.algo;
        rec.e2 = kNaN;
        rec.eoc_value = kNaN;
        const std::string base = cfg.out_dir + "/trace_ex" +
                                 std::to_string(cfg.example_id) + "_lvl" +
                                 std::to_string(task.level) + "_" +
                                 file_token(task.algo);
        const auto t0 = Clock::now();
        try {
            Vec u;
            if (task.algo == "two-phase") {
                AdmmConfig p1 = default_phase1_config();
                p1.tol = cfg.phase1_tol;
                p1.maxit = cfg.maxit_admm;
                PdasConfig p2;
                p2.tol = cfg.phase2_tol;
                p2.maxit = cfg.maxit_pdas;
                const TwoPhaseResult r = two_phase_solve(spec, p1, p2);
                rec.iterations = static_cast<int>(r.trace.phase1.iterations.size());
                rec.iterations_phase2 =
                    static_cast<int>(r.trace.phase2.iterations.size());
                rec.final_eta = eta_pdas(r.state, spec).eta_max;
                rec.success = r.converged;
                rec.message = r.message;
                write_admm_trace_csv(base + "_admm.csv", r.trace.phase1);
                write_pdas_trace_csv(base + "_pdas.csv", r.trace.phase2);
                rec.trace_path = base + "_admm.csv";
                u = r.state.u;
            } else if (task.algo == "pdas") {
                PdasConfig pc;
                pc.tol = cfg.phase2_tol;
                pc.maxit = cfg.maxit_pdas;
                pc.line_search = true;
                const PdasResult r = pdas_globalized(spec, pc, zero_state(spec.fem.n));
                rec.iterations = static_cast<int>(r.trace.iterations.size());
                rec.final_eta = eta_pdas(r.state, spec).eta_max;
                rec.success = r.trace.converged;
                rec.message = r.trace.message;
                write_pdas_trace_csv(base + ".csv", r.trace);
                rec.trace_path = base + ".csv";
                u = r.state.u;
            } else {
                AdmmConfig ac = make_admm_config(variant_from_name(task.algo));
                ac.tol = cfg.solve_tol;
                ac.maxit = cfg.maxit_admm;
                AdmmResult r;
                switch (ac.variant) {
                    case AdmmVariant::ihadmm:
                        r = ihadmm_solve(spec, ac, zero_state(spec.fem.n));
                        break;
                    case AdmmVariant::classical:
                        r = classical_admm_solve(spec, ac, zero_state(spec.fem.n));
                        break;
                    case AdmmVariant::ladmm:
                        r = ladmm_solve(spec, ac, zero_state(spec.fem.n));
                        break;
                }
                rec.iterations = static_cast<int>(r.trace.iterations.size());
                rec.final_eta = eta_admm(r.state, spec).eta_max;
                rec.success = r.trace.converged;
                rec.message = r.trace.message;
                write_admm_trace_csv(base + ".csv", r.trace);
                rec.trace_path = base + ".csv";
                u = r.state.u;
            }

            if (cfg.example_id == 2) {
                rec.e2 = control_error_l2(u, spec);
            } else if (have_ref && task.level < finest) {
                Vec v = u;
                for (int level = task.level; level < finest; ++level) {
                    v = interpolate_to_fine(v, chain[level - chain_base],
                                            chain[level + 1 - chain_base]);
                }
                const Vec diff = v - u_ref;
                rec.e2 = std::sqrt(diff.dot(specs.at(finest).fem.M.apply(diff)));
            }
        } catch (const std::exception& e) {
            rec.success = false;
            rec.message = e.what();
        }
        rec.wall_time_s = seconds_since(t0);
    };

    const int threads =
        std::min<int>(resolve_threads(cfg.threads), static_cast<int>(tasks.size()));
    if (threads <= 1) {
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t ti = next.fetch_add(1); ti < tasks.size();
                     ti = next.fetch_add(1)) {
                    run_task(ti);
                }
            });
        }
        for (auto& worker : pool) worker.join();
    }

    for (const std::string& algo : cfg.algorithms) {
        const RunRecord* prev = nullptr;
        for (auto& rec : records) {
            if (rec.algorithm != algo) continue;
            if (prev != nullptr && std::isfinite(prev->e2) &&
                std::isfinite(rec.e2) && prev->h > rec.h) {
                rec.eoc_value =
                    std::log(prev->e2 / rec.e2) / std::log(prev->h / rec.h);
            }
            prev = &rec;
        }
    }

    CampaignResult result;
    result.records = std::move(records);
    result.csv_path = cfg.out_dir + "/campaign.csv";
    result.json_path = cfg.out_dir + "/campaign.json";

    {
        std::ofstream os(result.csv_path);
        if (!os) throw std::runtime_error("cannot write " + result.csv_path);
        os << "level,h,dofs,algorithm,iterations,iterations_phase2,final_eta,"
              "E2,EOC,time_s,status\n";
        for (const auto& rec : result.records) {
            os << rec.level << ',' << cell(rec.h, 6, true) << ',' << rec.dofs
               << ',' << rec.algorithm << ',' << rec.iterations << ','
               << rec.iterations_phase2 << ',' << cell(rec.final_eta, 3, true)
               << ',' << cell(rec.e2, 6, true) << ','
               << cell(rec.eoc_value, 4, false) << ','
               << cell(rec.wall_time_s, 2, false) << ','
               << (rec.success ? "ok" : "failed") << '\n';
        }
    }
    {
        nlohmann::json j;
        j["config"] = {{"example", cfg.example_id},
                       {"levels", cfg.levels},
                       {"algorithms", cfg.algorithms},
                       {"solve_tol", cfg.solve_tol},
                       {"phase1_tol", cfg.phase1_tol},
                       {"phase2_tol", cfg.phase2_tol},
                       {"maxit_admm", cfg.maxit_admm},
                       {"maxit_pdas", cfg.maxit_pdas},
                       {"out_dir", cfg.out_dir},
                       {"threads", cfg.threads}};
        if (!note.empty()) j["note"] = note;
        j["records"] = nlohmann::json::array();
        for (const auto& rec : result.records) {
            j["records"].push_back(record_to_json(rec));
        }
        std::ofstream os(result.json_path);
        if (!os) throw std::runtime_error("cannot write " + result.json_path);
        os << j.dump(2) << '\n';
    }
    return result;
}

CampaignConfig campaign_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("campaign config: cannot open " + path);
    }
    nlohmann::json j;
    CampaignConfig cfg;
    try {
        in >> j;
        cfg.example_id = j.value("example", cfg.example_id);
        cfg.levels = j.value("levels", cfg.levels);
        cfg.algorithms = j.value("algorithms", cfg.algorithms);
        cfg.solve_tol = j.value("solve_tol", cfg.solve_tol);
        cfg.phase1_tol = j.value("phase1_tol", cfg.phase1_tol);
        cfg.phase2_tol = j.value("phase2_tol", cfg.phase2_tol);
        cfg.maxit_admm = j.value("maxit_admm", cfg.maxit_admm);
        cfg.maxit_pdas = j.value("maxit_pdas", cfg.maxit_pdas);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("campaign config: ") + e.what());
    }
    return cfg;
}

}  // namespace eoc
