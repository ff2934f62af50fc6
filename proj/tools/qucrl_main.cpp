// Command-line front end: run / sweep / verify / slope.
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qucrl/harness.hpp"
#include "qucrl/verification.hpp"

namespace {

using namespace qucrl;

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> agent;
    std::optional<std::string> out_dir;
    std::optional<long long> horizon;
};

RunConfig resolve_config(const CliOverrides& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
    if (o.seed) cfg.seeds = {*o.seed};
    if (o.agent) cfg.agent = agent_kind_from_string(*o.agent);
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.horizon) cfg.horizon = *o.horizon;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "override: single seed");
    cmd->add_option("--agent", o.agent, "override: quantum|classical")
        ->check(CLI::IsMember({"quantum", "classical"}));
    cmd->add_option("--out", o.out_dir, "override: output directory");
    cmd->add_option("--horizon", o.horizon, "override: horizon T");
}

int print_checks(const std::vector<CheckResult>& checks) {
    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
        all = all && c.pass;
    }
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-UCRL simulator: optimistic average-reward RL with a quantum transition oracle"};
    app.require_subcommand(1);

    CliOverrides run_o, sweep_o, verify_o;
    std::string slope_csv;
    long long slope_lo = 0, slope_hi = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "single seeded run, writes one CSV");
    add_common(run_cmd, run_o);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "all configured seeds plus aggregate CSV");
    add_common(sweep_cmd, sweep_o);
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the estimator and planner property suites");
    add_common(verify_cmd, verify_o);
    CLI::App* slope_cmd = app.add_subcommand("slope", "log-log slope fit on an existing CSV");
    slope_cmd->add_option("--csv", slope_csv, "CSV with t and regret/mean_regret columns")->required();
    slope_cmd->add_option("--t-lo", slope_lo, "window lower bound (default T/10)");
    slope_cmd->add_option("--t-hi", slope_hi, "window upper bound (default T)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            const RunConfig cfg = resolve_config(run_o);
            const Mdp env = cfg.make_env();
            const double gamma_star = solve_known_model(env).gain;
            const RunSummary summary = run_single(cfg, cfg.seeds.front(), env, gamma_star);
            std::cout << "wrote " << summary.csv_path << "\n"
                      << "gamma_star " << gamma_star << ", final regret " << summary.final_regret
                      << ", epochs " << summary.epoch_count << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const RunConfig cfg = resolve_config(sweep_o);
            const SweepResult sweep = run_sweep(cfg);
            std::cout << "wrote " << sweep.runs.size() << " run CSVs and " << sweep.aggregate_csv_path
                      << "\n"
                      << "gamma_star " << sweep.gamma_star << ", mean final regret "
                      << sweep.mean_regret.back() << " (stderr " << sweep.stderr_regret.back() << ")\n";
            return 0;
        }
        if (verify_cmd->parsed()) {
            // fast property suites; the long-horizon criteria live in the
            // acceptance binary
            std::vector<CheckResult> checks;
            checks.push_back(check_estimator_guarantee());
            checks.push_back(check_quadratic_rate());
            checks.push_back(check_gain_difference_identity());
            checks.push_back(check_bellman_bound_and_bias_span());
            OptimismCheckParams params;
            params.horizon = 20000;
            params.num_seeds = 2;
            params.estimator = acceptance_estimator_config();
            const OptimismCheckResult opt = check_optimism(params);
            checks.push_back(opt.optimism);
            checks.push_back(opt.set_failure);
            checks.push_back(opt.flow_equality);
            std::string out_dir = verify_o.out_dir.value_or("verify_out");
            checks.push_back(check_determinism(out_dir));
            return print_checks(checks);
        }
        if (slope_cmd->parsed()) {
            std::vector<long long> t;
            std::vector<double> regret;
            read_regret_csv(slope_csv, t, regret);
            if (t.empty()) throw IoFailure("no data rows in " + slope_csv);
            const long long hi = slope_hi > 0 ? slope_hi : t.back();
            const long long lo = slope_lo > 0 ? slope_lo : std::max<long long>(1, hi / 10);
            const SlopeFit fit = fit_slope(t, regret, lo, hi);
            std::cout << "window [" << lo << ", " << hi << "], points " << fit.points << "\n"
                      << "slope " << fit.slope << ", intercept " << fit.intercept << ", r2 " << fit.r2
                      << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
