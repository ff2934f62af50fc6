#include "qucrl/transition_model.hpp"

#include <cmath>

#include "json.hpp"

namespace qucrl {

void VisitCounters::record(int s, int a, int s2) {
    if (s < 0 || s >= S || a < 0 || a >= A || s2 < 0 || s2 >= S)
        throw InvalidParams("record_visit: index out of range");
    ++nu[pair(s, a)];
    ++mu[pair(s, a) * S + s2];
}

void VisitCounters::roll_epoch() {
    for (std::size_t i = 0; i < nu.size(); ++i) {
        n_cum[i] += nu[i];
        nu[i] = 0;
    }
}

void combine_weighted(std::span<double> phat_row, double applied_mass, std::span<const double> ptilde,
                      double nu) {
    if (phat_row.size() != ptilde.size()) throw InvalidParams("combine_weighted: size mismatch");
    if (nu <= 0.0) return;
    const double total = applied_mass + nu;
    const double w_old = applied_mass / total;
    const double w_new = nu / total;
    for (std::size_t j = 0; j < phat_row.size(); ++j)
        phat_row[j] = w_old * phat_row[j] + w_new * ptilde[j];
}

QuantumUpdateStats end_of_epoch_quantum_update(TransitionEstimate& estimate, const VisitCounters& counters,
                                               SampleBuffer& buffer, TransitionOracle& oracle,
                                               long long horizon, double delta_e, int completed_epoch,
                                               const EstimatorConfig& cfg, RngStream& rng) {
    if (buffer.epoch() != completed_epoch)
        throw StaleBuffer("sample buffer does not belong to the epoch being closed");
    const int S = counters.S;
    const int A = counters.A;

    // pairs visited this epoch, in fixed row-major order for determinism
    std::vector<std::size_t> updated;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (counters.nu_at(s, a) > 0) updated.push_back(counters.pair(s, a));
    QuantumUpdateStats stats;
    if (updated.empty()) return stats;

    // split the epoch confidence across pairs so the union retains 1 - delta_e
    const double delta_pair = delta_e / static_cast<double>(updated.size());

    for (std::size_t idx : updated) {
        const int s = static_cast<int>(idx) / A;
        const int a = static_cast<int>(idx) % A;
        const long long nu = counters.nu_at(s, a);
        if (static_cast<long long>(buffer.size(s, a)) != nu)
            throw StaleBuffer("buffer size disagrees with in-epoch visit count");

        const long n = experiment_budget(nu, horizon, S, cfg);
        QEstimate est = oracle.qbounded_estimate(buffer.samples(s, a), n, delta_pair, cfg, rng);

        estimate.last_ptilde[idx] = est.values;
        estimate.last_thresholded[idx] = est.thresholded;
        if (est.thresholded && cfg.skip_vacuous_updates) {
            ++stats.pairs_vacuous;
            continue;
        }
        if (est.thresholded) ++stats.pairs_vacuous;
        // per-coordinate width this refresh is certified for (a thresholded
        // zero vector certifies nothing better than the trivial bound)
        const double width = est.thresholded
                                 ? 1.0
                                 : std::sqrt(cfg.L2) * std::log(static_cast<double>(S) / delta_pair) /
                                       static_cast<double>(n);
        combine_weighted(estimate.row(s, a), estimate.applied_visits[idx], est.values,
                         static_cast<double>(nu));
        const double mass_width = static_cast<double>(nu) * std::min(width, 1.0);
        estimate.certified_budget[idx] += mass_width;
        estimate.certified_sq[idx] += mass_width * mass_width;
        estimate.applied_visits[idx] += static_cast<double>(nu);
        estimate.epoch_of_last_update[idx] = completed_epoch;
        ++stats.pairs_updated;
    }
    return stats;
}

void classical_empirical_update(TransitionEstimate& estimate, const VisitCounters& counters) {
    const int S = counters.S;
    const int A = counters.A;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const long long total = counters.n_at(s, a) + counters.nu_at(s, a);
            auto row = estimate.row(s, a);
            const double denom = static_cast<double>(std::max<long long>(1, total));
            for (int s2 = 0; s2 < S; ++s2)
                row[s2] = static_cast<double>(counters.mu_at(s, a, s2)) / denom;
        }
}

std::string to_string(AgentKind kind) {
    return kind == AgentKind::quantum ? "quantum" : "classical";
}

AgentKind agent_kind_from_string(const std::string& name) {
    if (name == "quantum") return AgentKind::quantum;
    if (name == "classical") return AgentKind::classical;
    throw ConfigError("unknown agent kind: " + name);
}

double confidence_radius(AgentKind kind, int S, int A, long long t, long long n_visits, double delta) {
    if (t < 1) throw InvalidParams("confidence_radius: t must be at least 1");
    if (S < 1 || A < 1) throw InvalidParams("confidence_radius: bad dimensions");
    const double denom = static_cast<double>(std::max<long long>(1, n_visits));
    double radius = 0.0;
    if (kind == AgentKind::quantum) {
        const double logterm =
            std::log(static_cast<double>(S) * S * A * static_cast<double>(t));
        radius = 7.0 * S * logterm / denom;
    } else {
        if (!(delta > 0.0)) throw InvalidParams("confidence_radius: classical radius needs delta > 0");
        const double logterm = std::log(2.0 * A * static_cast<double>(t) / delta);
        radius = std::sqrt(14.0 * S * logterm / denom);
    }
    return std::min(2.0, std::max(radius, 1e-9));
}

std::string estimate_to_json(const TransitionEstimate& estimate) {
    nlohmann::json j;
    j["S"] = estimate.S;
    j["A"] = estimate.A;
    auto P = nlohmann::json::array();
    for (int s = 0; s < estimate.S; ++s) {
        auto row_s = nlohmann::json::array();
        for (int a = 0; a < estimate.A; ++a) {
            auto row_a = nlohmann::json::array();
            for (double v : estimate.row(s, a)) row_a.push_back(v);
            row_s.push_back(std::move(row_a));
        }
        P.push_back(std::move(row_s));
    }
    j["P_hat"] = std::move(P);
    j["applied_visits"] = estimate.applied_visits;
    j["epoch_of_last_update"] = estimate.epoch_of_last_update;
    return j.dump(2);
}

TransitionEstimate estimate_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        const int S = j.at("S").get<int>();
        const int A = j.at("A").get<int>();
        if (S < 1 || A < 1) throw ConfigError("estimate JSON: bad dimensions");
        TransitionEstimate est(S, A);
        const auto& jp = j.at("P_hat");
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                auto row = est.row(s, a);
                for (int s2 = 0; s2 < S; ++s2) {
                    const double v = jp.at(s).at(a).at(s2).get<double>();
                    if (v < -1.0 || v > 1.0) throw ConfigError("estimate JSON: entry outside [-1,1]");
                    row[s2] = v;
                }
            }
        est.applied_visits = j.at("applied_visits").get<std::vector<double>>();
        est.epoch_of_last_update = j.at("epoch_of_last_update").get<std::vector<int>>();
        if (est.applied_visits.size() != static_cast<std::size_t>(S) * A ||
            est.epoch_of_last_update.size() != static_cast<std::size_t>(S) * A)
            throw ConfigError("estimate JSON: table size mismatch");
        return est;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("estimate JSON: ") + e.what());
    }
}

}  // namespace qucrl
