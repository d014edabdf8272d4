#include "archetype/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "archetype/disk_oracle.hpp"
#include "archetype/geometry.hpp"
#include "archetype/rng.hpp"
#include "archetype/svg.hpp"
#include "archetype/verify.hpp"

namespace arch {

namespace fs = std::filesystem;

namespace {

unsigned worker_count(std::size_t jobs) {
    unsigned threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (const char* env = std::getenv("ARCHETYPE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) threads = unsigned(v);
    }
    return unsigned(std::min<std::size_t>(threads, jobs));
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
}

// Monotone-descent and feasibility gates; every harness fit passes through
// here, so a solver regression fails the experiment instead of silently
// producing plots.
void check_fit_invariants(const AaProblem& p, const FitReport& rep) {
    const auto& trace = rep.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + 1e-8) {
            throw std::runtime_error(
                "fit invariant violated: objective rose from " +
                format_g17(trace[i - 1]) + " to " + format_g17(trace[i]) +
                " at iteration " + std::to_string(i));
        }
    }
    const auto check_stochastic = [](const Matrix& m, const char* name) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                const double v = m(i, j);
                if (v < -1e-10) {
                    throw std::runtime_error(std::string("fit invariant violated: ") +
                                             name + " has negative entry " +
                                             format_g17(v));
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-10) {
                throw std::runtime_error(std::string("fit invariant violated: ") + name +
                                         " column sum " + format_g17(sum));
            }
        }
    };
    check_stochastic(rep.state.A, "A");
    check_stochastic(rep.state.B, "B");
    if (p.X.rows() != rep.state.Z.rows()) {
        throw std::runtime_error("fit invariant violated: Z dimension mismatch");
    }
}

struct TrialOutcome {
    ResultRow row;
    Matrix z;
    FitReport report;
};

TrialOutcome analyze_fit(const AaProblem& p, const SolverConfig& solver_cfg,
                         const std::vector<double>& dist_mean, std::size_t n,
                         double alpha, int repeat, std::uint64_t seed,
                         bool oracle_d2inf) {
    TrialOutcome out;
    out.report = fit(p, solver_cfg);
    check_fit_invariants(p, out.report);
    out.z = out.report.state.Z;

    ResultRow& row = out.row;
    row.n = n;
    row.alpha = alpha;
    row.repeat = repeat;
    row.seed = seed;
    row.objective = out.report.objective_trace.back();
    row.iterations = out.report.iterations;
    row.wall_time = out.report.wall_time_sec;

    if (p.X.rows() == 2) {
        const Polygon2D hull = convex_hull_2d(columns_as_vec2(out.z));
        row.area = polygon_area(hull);
        if (hull.vertices.size() >= 3) {
            const std::vector<double> angles = interior_angles(hull);
            row.min_angle = *std::min_element(angles.begin(), angles.end());
            row.max_angle = *std::max_element(angles.begin(), angles.end());
        } else {
            row.min_angle = 0.0;  // degenerate (collinear) archetypes
            row.max_angle = 180.0;
        }
        row.contains_mean = contains(hull, {dist_mean[0], dist_mean[1]});
        row.d2inf_to_oracle =
            oracle_d2inf ? disk::best_rotation_d2inf(columns_as_vec2(out.z), p.k)
                         : std::nan("");
    } else {
        row.area = 0.0;
        row.min_angle = 0.0;
        row.max_angle = 0.0;
        row.contains_mean = false;
        row.d2inf_to_oracle = std::nan("");
    }
    return out;
}

std::string make_run_dir(const ExperimentConfig& cfg, const std::string& name) {
    const std::string tag =
        cfg.tag.empty() ? "seed-" + std::to_string(cfg.seed) : cfg.tag;
    const fs::path dir = fs::path(cfg.out_dir) / name / tag;
    fs::create_directories(dir);
    return dir.string();
}

void write_resolved_config(const std::string& run_dir, const ExperimentConfig& cfg,
                           int which, const std::vector<double>& alphas) {
    std::ostringstream os;
    os << "experiment=" << which << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "repeats=" << cfg.repeats << "\n";
    os << "n=" << cfg.n << "\n";
    os << "n_max=" << cfg.n_max << "\n";
    os << "quick=" << (cfg.quick ? 1 : 0) << "\n";
    os << "inits=" << cfg.inits << "\n";
    os << "tol=" << format_g17(cfg.solver.tol) << "\n";
    os << "tau=" << format_g17(cfg.solver.pgd.tau) << "\n";
    os << "max_iters=" << cfg.solver.max_iters << "\n";
    os << "alphas=";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (i) os << ',';
        os << format_g17(alphas[i]);
    }
    os << "\n";
    write_text(run_dir + "/config.txt", os.str());
}

void write_timings_log(const std::string& run_dir, const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "n alpha repeat wall_time_sec\n";
    double total = 0.0;
    for (const ResultRow& r : rows) {
        os << r.n << ' ' << fmt_short(r.alpha) << ' ' << r.repeat << ' '
           << r.wall_time << "\n";
        total += r.wall_time;
    }
    os << "total " << total << "\n";
    write_text(run_dir + "/timings.log", os.str());
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.n != b.n) return a.n < b.n;
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        return a.repeat < b.repeat;
    });
}

std::vector<double> default_alpha_sweep() {
    std::vector<double> alphas{0.0};
    for (int i = 1; i <= 50; ++i) alphas.push_back(double(i) / 10.0);
    return alphas;
}

DistributionSpec example4_mixture(double sigma2_scale) {
    Matrix cov1(2, 2), cov2(2, 2);
    cov1(0, 0) = cov1(1, 1) = 9.0;
    cov2(0, 0) = cov2(1, 1) = sigma2_scale;
    return DistributionSpec::mixture(
        {{{8.0, 8.0}, cov1}, {{-8.0, -8.0}, cov2}}, {0.5, 0.5});
}

void write_snapshot_set(const std::string& run_dir, const std::string& prefix,
                        const Matrix& x, const std::vector<Matrix>& z_history,
                        const std::vector<int>& wanted,
                        const std::vector<double>& mean) {
    const int last = int(z_history.size()) - 1;
    std::vector<int> iters;
    for (int w : wanted) {
        if (w <= last) iters.push_back(w);
    }
    if (iters.empty() || iters.back() != last) iters.push_back(last);
    for (int it : iters) {
        write_overlay_svg(run_dir + "/" + prefix + "_iter" + std::to_string(it) + ".svg",
                          x, z_history[std::size_t(it)], mean);
    }
}

}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const unsigned workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> distribution_mean(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::UniformDisk:
        case DistKind::Annular:
            return {0.0, 0.0};
        case DistKind::Gaussian:
            return spec.components.front().mean;
        case DistKind::GaussianMixture: {
            std::vector<double> m(spec.dim(), 0.0);
            for (std::size_t c = 0; c < spec.components.size(); ++c) {
                for (std::size_t i = 0; i < m.size(); ++i) {
                    m[i] += spec.weights[c] * spec.components[c].mean[i];
                }
            }
            return m;
        }
    }
    return {};
}

void write_overlay_svg(const std::string& path, const Matrix& x, const Matrix& z,
                       const std::vector<double>& mean, std::size_t max_scatter) {
    if (x.rows() != 2) throw std::invalid_argument("write_overlay_svg: data must be 2-d");
    svg::Figure fig(520, 520);
    fig.set_equal_aspect(true);

    const std::size_t step = std::max<std::size_t>(1, x.cols() / max_scatter);
    std::vector<Vec2> scatter;
    for (std::size_t j = 0; j < x.cols(); j += step) scatter.push_back({x(0, j), x(1, j)});
    fig.add_scatter(scatter, 1.2, "#b0b0b0");

    const Polygon2D data_hull = convex_hull_2d(columns_as_vec2(x));
    fig.add_polygon(data_hull.vertices, {"magenta", 1.5, "none"}, "data-hull");

    const Polygon2D arch_hull = convex_hull_2d(columns_as_vec2(z));
    fig.add_polygon(arch_hull.vertices, {"red", 2.0, "none"}, "archetype-hull");

    fig.add_marker({mean[0], mean[1]}, 3.0, "black");
    fig.write(path);
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "n,alpha,repeat,seed,objective,area,min_angle,max_angle,"
          "d2inf_to_oracle,contains_mean,iterations\n";
    for (const ResultRow& r : rows) {
        os << r.n << ',' << format_g17(r.alpha) << ',' << r.repeat << ',' << r.seed
           << ',' << format_g17(r.objective) << ',' << format_g17(r.area) << ','
           << format_g17(r.min_angle) << ',' << format_g17(r.max_angle) << ','
           << format_g17(r.d2inf_to_oracle) << ',' << (r.contains_mean ? 1 : 0) << ','
           << r.iterations << "\n";
    }
    write_text(path, os.str());
}

std::vector<std::size_t> example1_schedule(std::size_t n_max) {
    std::vector<std::size_t> ns;
    const auto phase = [&](std::size_t from, std::size_t to, std::size_t step) {
        for (std::size_t n = from; n <= to && n <= n_max; n += step) {
            if (ns.empty() || ns.back() != n) ns.push_back(n);
        }
    };
    phase(4, 13, 1);
    phase(13, 333, 10);
    phase(333, 30033, 300);
    return ns;
}

namespace {

ExperimentResult run_example1(const ExperimentConfig& cfg) {
    const DistributionSpec dist = DistributionSpec::uniform_disk();
    const std::vector<double> mean = distribution_mean(dist);
    const std::vector<std::size_t> schedule =
        example1_schedule(cfg.quick ? 3333 : cfg.n_max);
    const std::size_t jobs = schedule.size() * std::size_t(cfg.repeats);

    ExperimentResult result;
    result.run_dir = make_run_dir(cfg, "example1");
    write_resolved_config(result.run_dir, cfg, 1, {0.0});
    result.rows.resize(jobs);

    Matrix showcase_x, showcase_z;  // written by exactly one job
    parallel_for(jobs, [&](std::size_t j) {
        const std::size_t ni = j / std::size_t(cfg.repeats);
        const int rep = int(j % std::size_t(cfg.repeats));
        const std::size_t n = schedule[ni];
        const std::uint64_t seed = derive_seed(cfg.seed, j);
        const Matrix x = sample(dist, n, seed);
        AaProblem p{x, 3, 0.0};
        SolverConfig solver = cfg.solver;
        solver.seed = seed;
        TrialOutcome out = analyze_fit(p, solver, mean, n, 0.0, rep, seed, true);
        result.rows[j] = out.row;
        if (ni + 1 == schedule.size() && rep == 0) {
            showcase_x = x;
            showcase_z = out.z;
        }
    });
    sort_rows(result.rows);
    write_results_csv(result.run_dir + "/results.csv", result.rows);
    write_timings_log(result.run_dir, result.rows);

    // Per-N angle averages and the two-curve convergence plot.
    std::vector<double> xs, mean_max, mean_min;
    std::ostringstream angles_csv;
    angles_csv << "n,mean_max_angle,mean_min_angle,mean_objective\n";
    for (const std::size_t n : schedule) {
        double smax = 0.0, smin = 0.0, sobj = 0.0;
        int count = 0;
        for (const ResultRow& r : result.rows) {
            if (r.n != n) continue;
            smax += r.max_angle;
            smin += r.min_angle;
            sobj += r.objective;
            ++count;
        }
        if (count == 0) continue;
        xs.push_back(double(n));
        mean_max.push_back(smax / count);
        mean_min.push_back(smin / count);
        angles_csv << n << ',' << format_g17(smax / count) << ','
                   << format_g17(smin / count) << ',' << format_g17(sobj / count)
                   << "\n";
    }
    write_text(result.run_dir + "/angles.csv", angles_csv.str());

    svg::Figure fig(640, 420, "Hull angles vs N (k = 3, uniform disk)");
    fig.set_log_x(true);
    fig.set_axis_labels("N (log scale)", "angle (degrees)");
    fig.add_curve(xs, mean_max, {"#c02020", 1.8, "none"}, "max-angle");
    fig.add_curve(xs, mean_min, {"#2020c0", 1.8, "none"}, "min-angle");
    fig.write(result.run_dir + "/angles.svg");

    if (!showcase_x.empty()) {
        write_overlay_svg(result.run_dir + "/fit.svg", showcase_x, showcase_z, mean);
    }
    return result;
}

ExperimentResult run_sweep_example(const ExperimentConfig& cfg, int which,
                                   const DistributionSpec& dist,
                                   const std::string& name) {
    const std::vector<double> mean = distribution_mean(dist);
    const std::vector<double> alphas =
        cfg.alphas.empty() ? default_alpha_sweep() : cfg.alphas;

    ExperimentResult result;
    result.run_dir = make_run_dir(cfg, name);
    write_resolved_config(result.run_dir, cfg, which, alphas);

    const Matrix x = sample(dist, cfg.n, derive_seed(cfg.seed, 0xD5));
    result.rows.resize(alphas.size());
    std::vector<Matrix> finals(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(cfg.seed, 100 + i);
        AaProblem p{x, 3, alphas[i]};
        SolverConfig solver = cfg.solver;
        solver.seed = seed;
        TrialOutcome out = analyze_fit(p, solver, mean, cfg.n, alphas[i], 0, seed, false);
        result.rows[i] = out.row;
        finals[i] = out.z;
    });

    std::vector<ResultRow> sorted = result.rows;
    sort_rows(sorted);
    write_results_csv(result.run_dir + "/results.csv", sorted);
    write_timings_log(result.run_dir, sorted);

    std::ostringstream area_csv;
    area_csv << "alpha,area,objective,contains_mean\n";
    std::vector<double> ax, ay;
    for (const ResultRow& r : sorted) {
        area_csv << format_g17(r.alpha) << ',' << format_g17(r.area) << ','
                 << format_g17(r.objective) << ',' << (r.contains_mean ? 1 : 0) << "\n";
        if (r.alpha > 0.0) {
            ax.push_back(r.alpha);
            ay.push_back(r.area);
        }
    }
    write_text(result.run_dir + "/area_vs_alpha.csv", area_csv.str());

    svg::Figure fig(640, 420, "Area of co(A) vs alpha (N = " + std::to_string(cfg.n) + ")");
    fig.set_axis_labels("alpha", "area of co(A)");
    fig.add_curve(ax, ay, {"#c02020", 1.8, "none"}, "area");
    fig.write(result.run_dir + "/area_vs_alpha.svg");

    for (const double snap : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (alphas[i] == snap) {
                write_overlay_svg(
                    result.run_dir + "/hull_alpha_" + fmt_short(snap) + ".svg", x,
                    finals[i], mean);
                break;
            }
        }
    }
    result.rows = std::move(sorted);
    return {std::move(result)};
}

void robustness_study(const ExperimentConfig& cfg, ExperimentResult& result,
                      const DistributionSpec& dist, const Matrix& x, double alpha,
                      int inits, const std::vector<int>& snapshot_iters,
                      const std::string& prefix) {
    const std::vector<double> mean = distribution_mean(dist);
    std::vector<Matrix> final_z(inits);
    std::vector<std::vector<Matrix>> histories(inits);
    parallel_for(std::size_t(inits), [&](std::size_t i) {
        SolverConfig solver = cfg.solver;
        solver.seed = derive_seed(cfg.seed, 9000 + i);
        AaProblem p{x, 3, alpha};
        std::vector<Matrix>& history = histories[i];
        const FitReport rep = fit(p, solver, [&history](int, const AaState& s) {
            history.push_back(s.Z);
        });
        check_fit_invariants(p, rep);
        final_z[i] = rep.state.Z;
    });
    for (int i = 0; i < inits; ++i) {
        write_snapshot_set(result.run_dir, prefix + "_init" + std::to_string(i), x,
                           histories[std::size_t(i)], snapshot_iters, mean);
    }
    std::ostringstream os;
    os << "init_a,init_b,d2inf\n";
    for (int i = 0; i < inits; ++i) {
        for (int j = i + 1; j < inits; ++j) {
            const double d = d2_infty(columns_as_points(final_z[i]),
                                      columns_as_points(final_z[j]));
            result.pairwise_d2inf.push_back(d);
            os << i << ',' << j << ',' << format_g17(d) << "\n";
        }
    }
    write_text(result.run_dir + "/" + prefix + "_pairwise_d2inf.csv", os.str());
}

ExperimentResult run_example3(const ExperimentConfig& cfg) {
    const DistributionSpec dist = DistributionSpec::annular_dist(25.0, 50.0);
    ExperimentResult result = run_sweep_example(cfg, 3, dist, "example3");
    const Matrix x = sample(dist, cfg.n, derive_seed(cfg.seed, 0xD5));
    const int inits = cfg.inits > 0 ? cfg.inits : 3;
    robustness_study(cfg, result, dist, x, 2.0, inits, {0, 1, 2, 3, 19}, "alpha2");
    return result;
}

ExperimentResult run_example4(const ExperimentConfig& cfg) {
    const std::vector<double> sigma2 = {4.0, 1.0, 0.25};
    const int inits = cfg.inits > 0 ? cfg.inits : 2;

    ExperimentResult result;
    result.run_dir = make_run_dir(cfg, "example4");
    write_resolved_config(result.run_dir, cfg, 4, {2.0});

    const std::size_t runs = sigma2.size() * std::size_t(inits);
    result.rows.resize(runs);
    std::ostringstream runs_csv;
    runs_csv << "run,sigma2,init_index,seed\n";

    std::vector<Matrix> datasets(sigma2.size());
    for (std::size_t s = 0; s < sigma2.size(); ++s) {
        datasets[s] = sample(example4_mixture(sigma2[s]), cfg.n,
                             derive_seed(cfg.seed, 0xB000 + s));
    }

    std::vector<std::vector<Matrix>> histories(runs);
    std::vector<Matrix> final_z(runs);
    parallel_for(runs, [&](std::size_t r) {
        const std::size_t s = r / std::size_t(inits);
        const DistributionSpec dist = example4_mixture(sigma2[s]);
        const std::vector<double> mean = distribution_mean(dist);
        const std::uint64_t seed = derive_seed(cfg.seed, 0xE000 + r);
        SolverConfig solver = cfg.solver;
        solver.seed = seed;
        AaProblem p{datasets[s], 3, 2.0};
        std::vector<Matrix>& history = histories[r];
        const FitReport rep = fit(p, solver, [&history](int, const AaState& st) {
            history.push_back(st.Z);
        });
        check_fit_invariants(p, rep);
        final_z[r] = rep.state.Z;

        ResultRow row;
        row.n = cfg.n;
        row.alpha = 2.0;
        row.repeat = int(r);
        row.seed = seed;
        row.objective = rep.objective_trace.back();
        row.iterations = rep.iterations;
        row.wall_time = rep.wall_time_sec;
        const Polygon2D hull = convex_hull_2d(columns_as_vec2(rep.state.Z));
        row.area = polygon_area(hull);
        if (hull.vertices.size() >= 3) {
            const std::vector<double> angles = interior_angles(hull);
            row.min_angle = *std::min_element(angles.begin(), angles.end());
            row.max_angle = *std::max_element(angles.begin(), angles.end());
        } else {
            row.min_angle = 0.0;
            row.max_angle = 180.0;
        }
        row.contains_mean = contains(hull, {mean[0], mean[1]});
        row.d2inf_to_oracle = std::nan("");
        result.rows[r] = row;
    });

    for (std::size_t r = 0; r < runs; ++r) {
        const std::size_t s = r / std::size_t(inits);
        runs_csv << r << ',' << fmt_short(sigma2[s]) << ',' << r % std::size_t(inits)
                 << ',' << result.rows[r].seed << "\n";
        write_snapshot_set(result.run_dir,
                           "sigma" + fmt_short(sigma2[s]) + "_init" +
                               std::to_string(r % std::size_t(inits)),
                           datasets[s], histories[r], {0, 1, 3, 5, 7},
                           distribution_mean(example4_mixture(sigma2[s])));
    }
    write_text(result.run_dir + "/runs.csv", runs_csv.str());
    sort_rows(result.rows);
    write_results_csv(result.run_dir + "/results.csv", result.rows);
    write_timings_log(result.run_dir, result.rows);

    // Robustness across initializations for each Σ₂.
    std::ostringstream os;
    os << "sigma2,init_a,init_b,d2inf\n";
    for (std::size_t s = 0; s < sigma2.size(); ++s) {
        for (int i = 0; i < inits; ++i) {
            for (int j = i + 1; j < inits; ++j) {
                const double d = d2_infty(
                    columns_as_points(final_z[s * std::size_t(inits) + std::size_t(i)]),
                    columns_as_points(final_z[s * std::size_t(inits) + std::size_t(j)]));
                result.pairwise_d2inf.push_back(d);
                os << fmt_short(sigma2[s]) << ',' << i << ',' << j << ','
                   << format_g17(d) << "\n";
            }
        }
    }
    write_text(result.run_dir + "/pairwise_d2inf.csv", os.str());
    return result;
}

}  // namespace

ExperimentResult run_example(int which, const ExperimentConfig& cfg) {
    switch (which) {
        case 1:
            return run_example1(cfg);
        case 2:
            return run_sweep_example(
                cfg, 2, DistributionSpec::gaussian_iso({0.0, 0.0}, 10.0), "example2");
        case 3:
            return run_example3(cfg);
        case 4:
            return run_example4(cfg);
        default:
            throw std::invalid_argument("run_example: experiment id must be 1..4");
    }
}

ExperimentConfig load_experiment_config(const ExperimentConfig& defaults,
                                        const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    ExperimentConfig cfg = defaults;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto last = line.find_last_not_of(" \t\r");
        if (last == std::string::npos) continue;
        line.erase(last + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value");
        }
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key == "repeats") {
            cfg.repeats = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "tag") {
            cfg.tag = value;
        } else if (key == "n") {
            cfg.n = std::stoull(value);
        } else if (key == "n_max") {
            cfg.n_max = std::stoull(value);
        } else if (key == "quick") {
            cfg.quick = (value == "1" || value == "true");
        } else if (key == "inits") {
            cfg.inits = std::stoi(value);
        } else if (key == "tol") {
            cfg.solver.tol = std::stod(value);
        } else if (key == "tau") {
            cfg.solver.pgd.tau = std::stod(value);
        } else if (key == "max_iters") {
            cfg.solver.max_iters = std::stoi(value);
        } else if (key == "step_tol") {
            cfg.solver.pgd.step_tol = std::stod(value);
        } else if (key == "caratheodory") {
            if (value == "auto") {
                cfg.solver.caratheodory = HullFilter::Auto;
            } else if (value == "on") {
                cfg.solver.caratheodory = HullFilter::On;
            } else if (value == "off") {
                cfg.solver.caratheodory = HullFilter::Off;
            } else {
                throw std::runtime_error("config: caratheodory must be auto/on/off");
            }
        } else if (key == "alphas") {
            cfg.alphas.clear();
            const auto colon1 = value.find(':');
            if (colon1 != std::string::npos) {
                const auto colon2 = value.find(':', colon1 + 1);
                if (colon2 == std::string::npos) {
                    throw std::runtime_error("config: alphas range needs from:step:to");
                }
                const double from = std::stod(value.substr(0, colon1));
                const double step = std::stod(value.substr(colon1 + 1, colon2 - colon1 - 1));
                const double to = std::stod(value.substr(colon2 + 1));
                if (!(step > 0.0)) throw std::runtime_error("config: alphas step <= 0");
                for (double a = from; a <= to + 1e-12; a += step) cfg.alphas.push_back(a);
            } else {
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ',')) cfg.alphas.push_back(std::stod(tok));
            }
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

int cmd_fit(const FitArgs& args) {
    Matrix x;
    try {
        x = load_csv(args.data_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    SolverConfig solver;
    solver.tol = args.tol;
    solver.pgd.tau = args.tau;
    solver.seed = args.seed;
    if (args.init != "random") {
        try {
            solver.init_z = load_csv(args.init);
            solver.init = InitStrategy::Provided;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    FitReport report;
    AaProblem problem{x, args.k, args.alpha};
    try {
        problem.validate();
        report = fit(problem, solver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver aborted: " << e.what() << "\n";
        return 3;
    }

    try {
        fs::create_directories(args.out_dir);
        save_csv(report.state.Z, args.out_dir + "/archetypes.csv");
        std::ostringstream trace;
        trace << "iteration,objective\n";
        for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
            trace << i << ',' << format_g17(report.objective_trace[i]) << "\n";
        }
        write_text(args.out_dir + "/trace.csv", trace.str());
        if (x.rows() == 2) {
            std::vector<double> mean(2, 0.0);
            for (std::size_t j = 0; j < x.cols(); ++j) {
                mean[0] += x(0, j);
                mean[1] += x(1, j);
            }
            mean[0] /= double(x.cols());
            mean[1] /= double(x.cols());
            write_overlay_svg(args.out_dir + "/fit.svg", x, report.state.Z, mean);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::cout << "fit: " << (report.converged ? "converged" : "iteration cap") << " after "
              << report.iterations << " iterations, objective "
              << format_g17(report.objective_trace.back()) << "\n";
    std::cout << "artifacts in " << args.out_dir << "\n";
    return 0;
}

int cmd_example(int which, const ExperimentConfig& cfg) {
    try {
        const ExperimentResult result = run_example(which, cfg);
        std::cout << "example " << which << ": " << result.rows.size()
                  << " fits, artifacts in " << result.run_dir << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver aborted: " << e.what() << "\n";
        return 3;
    }
}

int cmd_verify(std::uint64_t seed) {
    const verify::Report report = verify::run_all(seed);
    for (const verify::Item& item : report.items) {
        std::cout << (item.pass ? "PASS" : "FAIL") << "  " << item.name << "  ("
                  << item.detail << ")\n";
    }
    if (!report.all_pass()) {
        std::cout << "verification FAILED\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace arch
