#include "qucrl/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qucrl {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
}

std::vector<long long> logged_steps(long long horizon, long stride) {
    std::vector<long long> steps;
    for (long long t = stride; t <= horizon; t += stride) steps.push_back(t);
    if (steps.empty() || steps.back() != horizon) steps.push_back(horizon);
    return steps;
}

}  // namespace

void RunConfig::validate() const {
    if (horizon < 1) throw ConfigError("config: horizon must be at least 1");
    if (seeds.empty()) throw ConfigError("config: seeds must be nonempty");
    if (S < 1 || A < 1) throw ConfigError("config: S and A must be positive");
    if (smoothing < 0.0 || smoothing > 1.0) throw ConfigError("config: smoothing outside [0,1]");
    if (log_stride < 1) throw ConfigError("config: log_stride must be positive");
    if (start_state < 0) throw ConfigError("config: start_state must be nonnegative");
    if (!(radius_inflation >= 1.0)) throw ConfigError("config: radius_inflation must be at least 1");
    try {
        estimator.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig run_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        reject_unknown_keys(j, {"environment", "agent", "horizon", "estimator", "seeds", "out_dir",
                                "log_stride", "start_state", "radius_inflation"},
                            "config");
        if (j.contains("environment")) {
            const auto& e = j["environment"];
            reject_unknown_keys(e, {"kind", "S", "A", "seed", "smoothing"}, "environment");
            if (e.contains("kind")) cfg.env_kind = env_kind_from_string(e["kind"].get<std::string>());
            if (e.contains("S")) cfg.S = e["S"].get<int>();
            if (e.contains("A")) cfg.A = e["A"].get<int>();
            if (e.contains("seed")) cfg.env_seed = e["seed"].get<std::uint64_t>();
            if (e.contains("smoothing")) cfg.smoothing = e["smoothing"].get<double>();
        }
        if (j.contains("agent")) cfg.agent = agent_kind_from_string(j["agent"].get<std::string>());
        if (j.contains("horizon")) cfg.horizon = j["horizon"].get<long long>();
        if (j.contains("estimator")) {
            const auto& e = j["estimator"];
            reject_unknown_keys(e, {"c", "L2", "noise_mode", "skip_vacuous_updates"}, "estimator");
            if (e.contains("c")) cfg.estimator.c = e["c"].get<double>();
            if (e.contains("L2")) cfg.estimator.L2 = e["L2"].get<double>();
            if (e.contains("noise_mode"))
                cfg.estimator.noise_mode = noise_mode_from_string(e["noise_mode"].get<std::string>());
            if (e.contains("skip_vacuous_updates"))
                cfg.estimator.skip_vacuous_updates = e["skip_vacuous_updates"].get<bool>();
        }
        if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("log_stride")) cfg.log_stride = j["log_stride"].get<long>();
        if (j.contains("start_state")) cfg.start_state = j["start_state"].get<int>();
        if (j.contains("radius_inflation")) cfg.radius_inflation = j["radius_inflation"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_config_from_json(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["environment"] = {{"kind", to_string(cfg.env_kind)},
                        {"S", cfg.S},
                        {"A", cfg.A},
                        {"seed", cfg.env_seed},
                        {"smoothing", cfg.smoothing}};
    j["agent"] = to_string(cfg.agent);
    j["horizon"] = cfg.horizon;
    j["estimator"] = {{"c", cfg.estimator.c},
                      {"L2", cfg.estimator.L2},
                      {"noise_mode", to_string(cfg.estimator.noise_mode)},
                      {"skip_vacuous_updates", cfg.estimator.skip_vacuous_updates}};
    j["seeds"] = cfg.seeds;
    j["out_dir"] = cfg.out_dir;
    j["log_stride"] = cfg.log_stride;
    j["start_state"] = cfg.start_state;
    j["radius_inflation"] = cfg.radius_inflation;
    return j.dump(2);
}

RegretSeries compute_regret(const std::vector<StepRecord>& records, double gamma_star, long long horizon) {
    if (static_cast<long long>(records.size()) < horizon)
        throw MismatchedHorizon("compute_regret: fewer records than the requested horizon");
    RegretSeries series;
    series.gamma_star = gamma_star;
    series.t.reserve(horizon);
    series.cum_reward.reserve(horizon);
    series.regret.reserve(horizon);
    double cum = 0.0;
    for (long long t = 1; t <= horizon; ++t) {
        cum += records[static_cast<std::size_t>(t - 1)].reward;
        series.t.push_back(t);
        series.cum_reward.push_back(cum);
        series.regret.push_back(static_cast<double>(t) * gamma_star - cum);
    }
    return series;
}

SlopeFit fit_slope(const std::vector<long long>& t, const std::vector<double>& regret, long long t_lo,
                   long long t_hi) {
    if (t.size() != regret.size()) throw InvalidParams("fit_slope: size mismatch");
    if (t_lo > t_hi) throw InvalidParams("fit_slope: empty window");
    std::vector<double> xs, ys;
    double min_r = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        min_r = any ? std::min(min_r, regret[i]) : regret[i];
        any = true;
    }
    const double shift = (any && min_r > 0.0) ? 0.0 : 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        const double r = regret[i] + shift;
        if (!(r > 0.0)) throw DegenerateWindow("fit_slope: non-positive regret after shift");
        xs.push_back(std::log(static_cast<double>(t[i])));
        ys.push_back(std::log(r));
    }
    if (xs.size() < 10) throw DegenerateWindow("fit_slope: fewer than 10 points in window");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw DegenerateWindow("fit_slope: zero abscissa variance");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points = static_cast<long>(xs.size());
    return fit;
}

SlopeFit fit_slope(const RegretSeries& series, long long t_lo, long long t_hi) {
    return fit_slope(series.t, series.regret, t_lo, t_hi);
}

std::string run_csv_name(const RunConfig& cfg, std::uint64_t seed) {
    std::ostringstream ss;
    ss << to_string(cfg.agent) << "_" << to_string(cfg.env_kind) << "_S" << cfg.S << "A" << cfg.A
       << "_seed" << seed << ".csv";
    return ss.str();
}

std::string aggregate_csv_name(const RunConfig& cfg) {
    std::ostringstream ss;
    ss << to_string(cfg.agent) << "_" << to_string(cfg.env_kind) << "_S" << cfg.S << "A" << cfg.A
       << "_aggregate.csv";
    return ss.str();
}

RunSummary run_single(const RunConfig& cfg, std::uint64_t seed, const Mdp& env, double gamma_star) {
    const RunResult run = run_agent(env, cfg.agent, cfg.horizon, seed, cfg.agent_config());
    const RegretSeries series = compute_regret(run.records, gamma_star, cfg.horizon);

    // per-epoch optimistic gain, indexed by epoch number
    std::vector<double> gamma_by_epoch(run.epochs.size() + 2, 0.0);
    for (const auto& e : run.epochs) gamma_by_epoch[static_cast<std::size_t>(e.epoch)] = e.gamma_e;

    RunSummary summary;
    summary.seed = seed;
    summary.final_regret = series.regret.back();
    summary.epoch_count = static_cast<long>(run.epochs.size());
    for (const auto& e : run.epochs)
        if (e.truth_in_confidence_set) ++summary.epochs_truth_in_set;

    for (long long t : logged_steps(cfg.horizon, cfg.log_stride)) {
        const std::size_t i = static_cast<std::size_t>(t - 1);
        summary.log_t.push_back(t);
        summary.log_cum_reward.push_back(series.cum_reward[i]);
        summary.log_regret.push_back(series.regret[i]);
        const int epoch = run.records[i].epoch;
        summary.log_epoch.push_back(epoch);
        summary.log_gamma_e.push_back(gamma_by_epoch[static_cast<std::size_t>(epoch)]);
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / run_csv_name(cfg, seed);
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path.string());
    out << "t,cum_reward,regret,epoch,gamma_opt\n";
    for (std::size_t i = 0; i < summary.log_t.size(); ++i) {
        out << summary.log_t[i] << ',' << fmt17(summary.log_cum_reward[i]) << ','
            << fmt17(summary.log_regret[i]) << ',' << summary.log_epoch[i] << ','
            << fmt17(summary.log_gamma_e[i]) << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path.string());
    summary.csv_path = path.string();
    return summary;
}

SweepResult run_sweep(const RunConfig& cfg, Exec mode) {
    cfg.validate();
    const Mdp env = cfg.make_env();
    const double gamma_star = solve_known_model(env).gain;

    SweepResult result;
    result.gamma_star = gamma_star;
    result.runs.resize(cfg.seeds.size());

    parallel_for(static_cast<long>(cfg.seeds.size()), mode, [&](long i) {
        result.runs[static_cast<std::size_t>(i)] =
            run_single(cfg, cfg.seeds[static_cast<std::size_t>(i)], env, gamma_star);
    });

    // aggregate pass, single-threaded after all runs complete
    result.log_t = result.runs.front().log_t;
    const std::size_t rows = result.log_t.size();
    const double k = static_cast<double>(cfg.seeds.size());
    result.mean_regret.assign(rows, 0.0);
    result.stderr_regret.assign(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double mean = 0.0;
        for (const auto& run : result.runs) mean += run.log_regret[i];
        mean /= k;
        double var = 0.0;
        for (const auto& run : result.runs) {
            const double d = run.log_regret[i] - mean;
            var += d * d;
        }
        result.mean_regret[i] = mean;
        result.stderr_regret[i] = (cfg.seeds.size() > 1) ? std::sqrt(var / (k - 1.0) / k) : 0.0;
    }

    namespace fs = std::filesystem;
    const fs::path path = fs::path(cfg.out_dir) / aggregate_csv_name(cfg);
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path.string());
    out << "t,mean_regret,stderr_regret,n_seeds\n";
    for (std::size_t i = 0; i < rows; ++i)
        out << result.log_t[i] << ',' << fmt17(result.mean_regret[i]) << ','
            << fmt17(result.stderr_regret[i]) << ',' << cfg.seeds.size() << '\n';
    if (!out) throw IoFailure("write failed: " + path.string());
    result.aggregate_csv_path = path.string();
    return result;
}

void read_regret_csv(const std::string& path, std::vector<long long>& t, std::vector<double>& regret) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoFailure("empty CSV: " + path);

    // locate the t column and the regret (or mean_regret) column
    std::vector<std::string> headers;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) headers.push_back(cell);
    }
    int t_col = -1, r_col = -1;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (headers[i] == "t") t_col = static_cast<int>(i);
        if (headers[i] == "regret" || headers[i] == "mean_regret") r_col = static_cast<int>(i);
    }
    if (t_col < 0 || r_col < 0) throw IoFailure("CSV lacks t/regret columns: " + path);

    t.clear();
    regret.clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        long long tv = 0;
        double rv = 0.0;
        while (std::getline(ss, cell, ',')) {
            if (col == t_col) tv = std::stoll(cell);
            if (col == r_col) rv = std::stod(cell);
            ++col;
        }
        t.push_back(tv);
        regret.push_back(rv);
    }
}

}  // namespace qucrl
