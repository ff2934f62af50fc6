#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qucrl/agent.hpp"
#include "qucrl/parallel.hpp"

namespace qucrl {

struct RunConfig {
    // environment
    EnvKind env_kind = EnvKind::riverswim;
    int S = 6;
    int A = 2;
    std::uint64_t env_seed = 0;
    double smoothing = 0.0;
    // agent
    AgentKind agent = AgentKind::quantum;
    long long horizon = 100000;
    EstimatorConfig estimator;
    int start_state = 0;
    double radius_inflation = 2.0;  // certified-radius cap, in multiples of the nominal radius
    // experiment
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = ".";
    long log_stride = 100;

    void validate() const;
    Mdp make_env() const { return make_environment(env_kind, S, A, env_seed, smoothing); }
    AgentConfig agent_config() const { return AgentConfig{estimator, start_state, radius_inflation}; }
};

// JSON config mirroring the field names above; unknown keys are rejected.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

// Per-step cumulative reward and regret R_t = t * gamma_star - sum of the
// first t rewards, indexed t = 1..T (R_0 = 0 is implicit).
struct RegretSeries {
    std::vector<long long> t;
    std::vector<double> cum_reward;
    std::vector<double> regret;
    std::uint64_t seed = 0;
    double gamma_star = 0.0;
};

RegretSeries compute_regret(const std::vector<StepRecord>& records, double gamma_star, long long horizon);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    long points = 0;
};

// Ordinary least squares of log(R_t [+1]) against log t over the window
// [t_lo, t_hi]; the +1 shift is applied only when the window contains a
// non-positive value. Throws DegenerateWindow below 10 points.
SlopeFit fit_slope(const std::vector<long long>& t, const std::vector<double>& regret, long long t_lo,
                   long long t_hi);
SlopeFit fit_slope(const RegretSeries& series, long long t_lo, long long t_hi);

// One run distilled to its logged rows (every log_stride steps plus the
// final step) plus run-level statistics used by the sweeps.
struct RunSummary {
    std::uint64_t seed = 0;
    std::vector<long long> log_t;
    std::vector<double> log_cum_reward;
    std::vector<double> log_regret;
    std::vector<int> log_epoch;
    std::vector<double> log_gamma_e;
    double final_regret = 0.0;
    long epoch_count = 0;
    long epochs_truth_in_set = 0;
    std::string csv_path;
};

struct SweepResult {
    double gamma_star = 0.0;
    std::vector<RunSummary> runs;
    std::vector<long long> log_t;
    std::vector<double> mean_regret;
    std::vector<double> stderr_regret;
    std::string aggregate_csv_path;
};

// Runs every seed (optionally in parallel; replicas are independent), writes
// one CSV per seed named <agent>_<envkind>_S<S>A<A>_seed<k>.csv with header
// t,cum_reward,regret,epoch,gamma_opt and floats at 17 significant digits,
// then a mean/stderr aggregate CSV. Byte-identical across repeats and across
// serial/parallel execution.
SweepResult run_sweep(const RunConfig& cfg, Exec mode = Exec::parallel);

// Single seeded run -> RunSummary + CSV (the CLI `run` verb).
RunSummary run_single(const RunConfig& cfg, std::uint64_t seed, const Mdp& env, double gamma_star);

std::string run_csv_name(const RunConfig& cfg, std::uint64_t seed);
std::string aggregate_csv_name(const RunConfig& cfg);

// Reads the t and regret (or mean_regret) columns back from a CSV.
void read_regret_csv(const std::string& path, std::vector<long long>& t, std::vector<double>& regret);

}  // namespace qucrl
