#include "qucrl/verification.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qucrl/evaluation.hpp"

namespace qucrl {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

// fixed representative rows for the estimator grids
std::vector<double> test_row(int S) {
    if (S == 4) return {0.4, 0.3, 0.2, 0.1};
    if (S == 6) return {0.3, 0.25, 0.2, 0.1, 0.1, 0.05};
    std::vector<double> row(S, 1.0 / S);
    return row;
}

Mdp single_row_env(int S) {
    std::vector<double> P(static_cast<std::size_t>(S) * S, 1.0 / S);
    const std::vector<double> row = test_row(S);
    for (int s2 = 0; s2 < S; ++s2) P[s2] = row[s2];
    std::vector<double> r(S, 0.5);
    return Mdp(S, 1, std::move(P), std::move(r));
}

double linf_error(const std::vector<double>& est, const std::vector<double>& row) {
    double err = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) err = std::max(err, std::fabs(est[j] - row[j]));
    return err;
}

// median of quantum estimate errors over `trials` fresh estimates
double quantum_median_error(int S, long n, double delta, int trials, std::uint64_t cell_seed) {
    const Mdp env = single_row_env(S);
    const std::vector<double> row = test_row(S);
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(cell_seed, 0xe57);
    EstimatorConfig cfg;
    std::vector<double> errors(trials);
    for (int k = 0; k < trials; ++k) {
        const StepOutcome out = oracle.step(0, 0, k, rng);
        const SampleId ids[1] = {out.sample};
        const QEstimate est = oracle.qbounded_estimate(ids, n, delta, cfg, rng);
        errors[static_cast<std::size_t>(k)] = linf_error(est.values, row);
    }
    std::nth_element(errors.begin(), errors.begin() + trials / 2, errors.end());
    return errors[static_cast<std::size_t>(trials / 2)];
}

// median error of the empirical distribution of n categorical draws
double classical_median_error(int S, long n, int trials, std::uint64_t cell_seed) {
    const std::vector<double> row = test_row(S);
    std::vector<double> errors(trials);
    for (int k = 0; k < trials; ++k) {
        RngStream rng = RngStream::derive(cell_seed, 0xc1a55 + static_cast<std::uint64_t>(k));
        std::vector<double> counts(S, 0.0);
        for (long i = 0; i < n; ++i) counts[static_cast<std::size_t>(rng.categorical(row))] += 1.0;
        for (double& c : counts) c /= static_cast<double>(n);
        errors[static_cast<std::size_t>(k)] = linf_error(counts, row);
    }
    std::nth_element(errors.begin(), errors.begin() + trials / 2, errors.end());
    return errors[static_cast<std::size_t>(trials / 2)];
}

struct Triple {
    Mdp model;
    std::vector<double> optimistic;
    Policy policy;
};

Triple random_triple(int S, int A, std::uint64_t seed) {
    const Mdp model = make_environment(EnvKind::random_ergodic, S, A, seed, 0.1);
    const Mdp other = make_environment(EnvKind::random_ergodic, S, A, seed + 7919, 0.1);
    RngStream rng = RngStream::derive(seed, 0x90110cu);
    std::vector<double> probs(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        double sum = 0.0;
        for (int a = 0; a < A; ++a) {
            double u = rng.uniform01();
            if (u <= 0.0) u = 0x1.0p-53;
            probs[static_cast<std::size_t>(s) * A + a] = -std::log(u);
            sum += probs[static_cast<std::size_t>(s) * A + a];
        }
        for (int a = 0; a < A; ++a) probs[static_cast<std::size_t>(s) * A + a] /= sum;
    }
    return Triple{model, other.transitions(), Policy(S, A, std::move(probs))};
}

}  // namespace

CheckResult check_estimator_guarantee(Exec mode, int trials) {
    const long ns[] = {16, 64, 256};
    const double deltas[] = {0.2, 0.05};
    const int dims[] = {4, 6};

    struct Cell {
        long n;
        double delta;
        int S;
        double violation_rate = 0.0;
        double budget = 0.0;
    };
    std::vector<Cell> cells;
    for (long n : ns)
        for (double delta : deltas)
            for (int S : dims) cells.push_back(Cell{n, delta, S, 0.0, 0.0});

    parallel_for(static_cast<long>(cells.size()), mode, [&](long i) {
        Cell& cell = cells[static_cast<std::size_t>(i)];
        const Mdp env = single_row_env(cell.S);
        const std::vector<double> row = test_row(cell.S);
        TransitionOracle oracle(env);
        RngStream rng = RngStream::derive(0xacce97ULL, static_cast<std::uint64_t>(i));
        EstimatorConfig cfg;
        const double bound = std::log(cell.S / cell.delta) / static_cast<double>(cell.n);
        int violations = 0;
        for (int k = 0; k < trials; ++k) {
            const StepOutcome out = oracle.step(0, 0, k, rng);
            const SampleId ids[1] = {out.sample};
            const QEstimate est = oracle.qbounded_estimate(ids, cell.n, cell.delta, cfg, rng);
            if (linf_error(est.values, row) > bound) ++violations;
        }
        cell.violation_rate = static_cast<double>(violations) / trials;
        cell.budget = cell.delta + 3.0 * std::sqrt(cell.delta / trials);
    });

    CheckResult res;
    res.name = "estimator guarantee";
    res.pass = true;
    double worst_margin = 1e9;
    for (const Cell& cell : cells) {
        const double margin = cell.budget - cell.violation_rate;
        worst_margin = std::min(worst_margin, margin);
        if (cell.violation_rate > cell.budget) res.pass = false;
    }
    res.detail = "12 grid cells, worst margin " + fmt(worst_margin);
    return res;
}

CheckResult check_quadratic_rate(Exec mode, int trials) {
    const long ns[] = {16, 32, 64, 128, 256};  // doublings spanning the pinned grid
    const double delta = 0.05;
    const int dims[] = {4, 6};

    struct Cell {
        int S;
        long n;
        double q_median = 0.0;
        double c_median = 0.0;
    };
    std::vector<Cell> cells;
    for (int S : dims)
        for (long n : ns) cells.push_back(Cell{S, n, 0.0, 0.0});

    parallel_for(static_cast<long>(cells.size()), mode, [&](long i) {
        Cell& cell = cells[static_cast<std::size_t>(i)];
        cell.q_median = quantum_median_error(cell.S, cell.n, delta, trials,
                                             0x9a7e5ULL + static_cast<std::uint64_t>(i));
        cell.c_median = classical_median_error(cell.S, cell.n, trials,
                                               0xc0157ULL + static_cast<std::uint64_t>(i));
    });

    CheckResult res;
    res.name = "quadratic rate shape";
    res.pass = true;
    std::ostringstream detail;
    for (int S : dims) {
        for (std::size_t j = 0; j + 1 < std::size(ns); ++j) {
            const Cell* lo = nullptr;
            const Cell* hi = nullptr;
            for (const Cell& cell : cells) {
                if (cell.S == S && cell.n == ns[j]) lo = &cell;
                if (cell.S == S && cell.n == ns[j + 1]) hi = &cell;
            }
            const double q_ratio = hi->q_median / lo->q_median;
            const double c_ratio = hi->c_median / lo->c_median;
            if (q_ratio < 0.5 / 1.3 || q_ratio > 0.5 * 1.3) res.pass = false;
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            if (c_ratio < inv_sqrt2 / 1.3 || c_ratio > inv_sqrt2 * 1.3) res.pass = false;
        }
    }
    const Cell& q16 = cells.front();
    detail << "quantum median at S=" << q16.S << ", n=" << q16.n << ": " << fmt(q16.q_median);
    res.detail = detail.str();
    return res;
}

CheckResult check_gain_difference_identity(int triples) {
    CheckResult res;
    res.name = "gain difference identity";
    res.pass = true;
    double worst = 0.0;
    int k = 0;
    for (int S : {2, 3, 4})
        for (int A : {1, 2})
            for (int rep = 0; rep < (triples + 5) / 6; ++rep) {
                const Triple tr = random_triple(S, A, 1000 + 17 * k);
                ++k;
                const Mdp optimistic(S, A, tr.optimistic, tr.model.rewards());
                const double gap =
                    gain_bias(optimistic, tr.policy).gain - gain_bias(tr.model, tr.policy).gain;
                const std::vector<double> rho = stationary_distribution(tr.model, tr.policy);
                const std::vector<double> berr = bellman_error(tr.model, tr.optimistic, tr.policy);
                double weighted = 0.0;
                for (std::size_t i = 0; i < rho.size(); ++i) weighted += rho[i] * berr[i];
                worst = std::max(worst, std::fabs(gap - weighted));
            }
    if (worst > 1e-8) res.pass = false;
    res.detail = std::to_string(k) + " triples, worst residual " + fmt(worst);
    return res;
}

CheckResult check_bellman_bound_and_bias_span(int triples) {
    CheckResult res;
    res.name = "bellman bound and bias span";
    res.pass = true;
    double worst_excess = -1.0;
    int k = 0;
    for (int S : {2, 3, 4})
        for (int A : {1, 2})
            for (int rep = 0; rep < (triples + 5) / 6; ++rep) {
                const Triple tr = random_triple(S, A, 5000 + 17 * k);
                ++k;
                const Mdp optimistic(S, A, tr.optimistic, tr.model.rewards());
                const GainBias gb = gain_bias(optimistic, tr.policy);
                double hinf = 0.0;
                for (double h : gb.bias) hinf = std::max(hinf, std::fabs(h));
                const std::vector<double> berr = bellman_error(tr.model, tr.optimistic, tr.policy);
                for (int s = 0; s < S; ++s)
                    for (int a = 0; a < A; ++a) {
                        double l1 = 0.0;
                        for (int s2 = 0; s2 < S; ++s2)
                            l1 += std::fabs(optimistic.p(s, a, s2) - tr.model.p(s, a, s2));
                        const double excess =
                            std::fabs(berr[static_cast<std::size_t>(s) * A + a]) - l1 * hinf;
                        worst_excess = std::max(worst_excess, excess);
                        if (excess > 1e-12) res.pass = false;
                    }
                const MixingDiagnostics diag = mixing_diagnostics(optimistic);
                if (!diag.t_mix_is_lower_bound && gb.span() > diag.t_mix + 1e-9) res.pass = false;
            }
    res.detail = std::to_string(k) + " triples, worst bound excess " + fmt(worst_excess);
    return res;
}

OptimismCheckResult check_optimism(const OptimismCheckParams& params, Exec mode) {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0, 0.0);
    const double gamma_star = solve_known_model(env).gain;

    std::vector<RunResult> runs(static_cast<std::size_t>(params.num_seeds));
    parallel_for(params.num_seeds, mode, [&](long i) {
        runs[static_cast<std::size_t>(i)] =
            run_agent(env, AgentKind::quantum, params.horizon, static_cast<std::uint64_t>(i + 1),
                      AgentConfig{params.estimator, 0, params.radius_inflation});
    });

    OptimismCheckResult out;
    double worst_gap = 0.0;
    double worst_flow = 0.0;
    long optimism_violations = 0;
    for (const RunResult& run : runs) {
        for (const EpochSummary& e : run.epochs) {
            ++out.total_epochs;
            if (e.truth_in_confidence_set) {
                const double gap = gamma_star - e.gamma_e;
                worst_gap = std::max(worst_gap, gap);
                if (gap > 1e-6) ++optimism_violations;
            } else {
                ++out.epochs_out_of_set;
            }
            worst_flow = std::max(worst_flow, e.max_flow_residual);
            if (e.length > 0) out.bad_event_budget += 1.0 / std::pow(static_cast<double>(e.length), 6.0);
        }
    }

    out.optimism.name = "optimism under set membership";
    out.optimism.pass = optimism_violations == 0;
    out.optimism.detail = "worst gain gap in-set " + fmt(worst_gap) + " over " +
                          std::to_string(out.total_epochs) + " epochs";

    const double failure_rate =
        out.total_epochs > 0 ? static_cast<double>(out.epochs_out_of_set) / out.total_epochs : 0.0;
    out.set_failure.name = "confidence set failure frequency";
    out.set_failure.pass = failure_rate <= params.set_failure_budget;
    out.set_failure.detail = fmt(100.0 * failure_rate) + "% of epochs out of set (budget " +
                             fmt(100.0 * params.set_failure_budget) + "%)";

    out.flow_equality.name = "flow equality recovery";
    out.flow_equality.pass = worst_flow <= 1e-7;
    out.flow_equality.detail = "worst flow residual " + fmt(worst_flow);
    return out;
}

SeparationCheckResult check_regret_separation(const SeparationCheckParams& params, Exec mode) {
    RunConfig base;
    base.env_kind = EnvKind::riverswim;
    base.S = 6;
    base.A = 2;
    base.env_seed = 0;
    base.smoothing = 0.0;
    base.horizon = params.horizon;
    base.estimator = params.estimator;
    base.radius_inflation = params.radius_inflation;
    base.out_dir = params.out_dir;
    base.seeds.clear();
    for (int i = 1; i <= params.num_seeds; ++i) base.seeds.push_back(static_cast<std::uint64_t>(i));

    RunConfig quantum_cfg = base;
    quantum_cfg.agent = AgentKind::quantum;
    RunConfig classical_cfg = base;
    classical_cfg.agent = AgentKind::classical;

    const SweepResult q = run_sweep(quantum_cfg, mode);
    const SweepResult c = run_sweep(classical_cfg, mode);

    SeparationCheckResult out;
    const SlopeFit qs = fit_slope(q.log_t, q.mean_regret, params.window_lo, params.horizon);
    const SlopeFit cs = fit_slope(c.log_t, c.mean_regret, params.window_lo, params.horizon);
    out.quantum_slope_value = qs.slope;
    out.classical_slope_value = cs.slope;

    out.quantum_slope.name = "quantum regret slope";
    out.quantum_slope.pass = qs.slope <= params.quantum_slope_max;
    out.quantum_slope.detail = "slope " + fmt(qs.slope) + " (max " + fmt(params.quantum_slope_max) + ")";

    out.classical_slope.name = "classical regret slope";
    out.classical_slope.pass =
        cs.slope >= params.classical_slope_min && cs.slope <= params.classical_slope_max;
    out.classical_slope.detail = "slope " + fmt(cs.slope) + " (window [" +
                                 fmt(params.classical_slope_min) + ", " +
                                 fmt(params.classical_slope_max) + "])";

    const std::size_t last = q.log_t.size() - 1;
    out.quantum_final_mean = q.mean_regret[last];
    out.classical_final_mean = c.mean_regret[last];
    const double se =
        std::sqrt(q.stderr_regret[last] * q.stderr_regret[last] +
                  c.stderr_regret[last] * c.stderr_regret[last]);
    out.separation.name = "final regret separation";
    out.separation.pass =
        out.classical_final_mean - out.quantum_final_mean >= params.separation_sigmas * se;
    out.separation.detail = "quantum " + fmt(out.quantum_final_mean) + " vs classical " +
                            fmt(out.classical_final_mean) + ", gap/se " +
                            fmt(se > 0.0 ? (out.classical_final_mean - out.quantum_final_mean) / se : 0.0);

    const double bound =
        2.0 * base.S * base.A *
        std::log2(8.0 * static_cast<double>(params.horizon) / (base.S * base.A));
    long worst_epochs = 0;
    bool epoch_ok = true;
    for (const SweepResult* sweep : {&q, &c})
        for (const RunSummary& run : sweep->runs) {
            worst_epochs = std::max(worst_epochs, run.epoch_count);
            if (static_cast<double>(run.epoch_count) > bound) epoch_ok = false;
        }
    out.epoch_bound.name = "epoch count bound";
    out.epoch_bound.pass = epoch_ok;
    out.epoch_bound.detail =
        "max epochs " + std::to_string(worst_epochs) + " vs bound " + fmt(bound);
    return out;
}

CheckResult check_determinism(const std::string& out_dir) {
    RunConfig cfg;
    cfg.env_kind = EnvKind::riverswim;
    cfg.S = 6;
    cfg.A = 2;
    cfg.horizon = 3000;
    cfg.seeds = {11, 12};
    cfg.log_stride = 100;

    namespace fs = std::filesystem;
    auto read_all = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    cfg.out_dir = (fs::path(out_dir) / "det_a").string();
    const SweepResult first = run_sweep(cfg, Exec::parallel);
    cfg.out_dir = (fs::path(out_dir) / "det_b").string();
    const SweepResult second = run_sweep(cfg, Exec::serial);

    CheckResult res;
    res.name = "determinism";
    res.pass = true;
    for (std::size_t i = 0; i < first.runs.size(); ++i)
        if (read_all(first.runs[i].csv_path) != read_all(second.runs[i].csv_path)) res.pass = false;
    if (read_all(first.aggregate_csv_path) != read_all(second.aggregate_csv_path)) res.pass = false;
    res.detail = res.pass ? "repeat and serial/parallel outputs byte-identical"
                          : "outputs differ between repeats";
    return res;
}

EstimatorConfig acceptance_estimator_config() {
    EstimatorConfig cfg;
    // c at or below 1/sqrt(log(T sqrt(S))) drives the budget clamp n = nu:
    // one estimator query per collected sample, the statistically strongest
    // admissible setting and the least estimator noise per epoch.
    cfg.c = 0.25;
    cfg.L2 = 1.0;
    cfg.noise_mode = NoiseMode::conforming_random;
    cfg.skip_vacuous_updates = true;
    return cfg;
}

}  // namespace qucrl
