#include "qucrl/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace qucrl {

std::string to_string(NoiseMode mode) {
    switch (mode) {
        case NoiseMode::conforming_random: return "conforming_random";
        case NoiseMode::zero_noise: return "zero_noise";
        case NoiseMode::adversarial_at_bound: return "adversarial_at_bound";
    }
    return "unknown";
}

NoiseMode noise_mode_from_string(const std::string& name) {
    if (name == "conforming_random") return NoiseMode::conforming_random;
    if (name == "zero_noise") return NoiseMode::zero_noise;
    if (name == "adversarial_at_bound") return NoiseMode::adversarial_at_bound;
    throw ConfigError("unknown noise mode: " + name);
}

void EstimatorConfig::validate() const {
    if (!(c > 0.0)) throw InvalidParams("EstimatorConfig: c must be positive");
    if (!(L2 > 0.0) || L2 > 1.0) throw InvalidParams("EstimatorConfig: L2 must be in (0,1]");
}

long experiment_budget(long long nu, long long horizon, int S, const EstimatorConfig& cfg) {
    cfg.validate();
    if (nu < 0) throw InvalidParams("experiment_budget: negative sample count");
    if (horizon < 2) throw InvalidHorizon("experiment_budget: horizon must be at least 2");
    if (S < 1) throw InvalidParams("experiment_budget: S must be positive");
    if (nu == 0) return 0;
    const double denom = cfg.c * std::sqrt(std::log(static_cast<double>(horizon) * std::sqrt(static_cast<double>(S))));
    long n = static_cast<long>(std::floor(static_cast<double>(nu) / denom));
    n = std::max(n, 0L);
    return static_cast<long>(std::min<long long>(n, nu));
}

StepOutcome TransitionOracle::step(int s, int a, long long t, RngStream& rng) {
    const int S = env_->num_states();
    const int A = env_->num_actions();
    if (s < 0 || s >= S || a < 0 || a >= A) throw InvalidParams("oracle step: index out of range");

    StepOutcome out;
    out.next_state = rng.categorical(env_->row(s, a));
    out.reward = env_->reward(s, a);
    registry_.push_back(QuantumSample{s, a, t, false});
    out.sample = registry_.size() - 1;
    return out;
}

QEstimate TransitionOracle::qbounded_estimate(std::span<const SampleId> samples, long n, double delta,
                                              const EstimatorConfig& cfg, RngStream& rng) {
    cfg.validate();
    if (samples.empty()) throw InvalidParams("qbounded_estimate: empty sample batch");
    if (!(delta > 0.0) || delta >= 1.0) throw InvalidParams("qbounded_estimate: delta must be in (0,1)");
    if (n < 0) throw InvalidParams("qbounded_estimate: negative budget");

    const QuantumSample& first = registry_.at(samples.front());
    for (SampleId id : samples) {
        const QuantumSample& q = registry_.at(id);
        if (q.consumed) throw DoubleConsumption("quantum sample measured twice");
        if (q.s != first.s || q.a != first.a)
            throw MixedKeys("sample batch spans more than one (state, action) pair");
    }
    // measurement collapses every provided sample, whatever n is
    for (SampleId id : samples) {
        registry_[id].consumed = true;
        ++total_consumed_;
    }

    const int S = env_->num_states();
    QEstimate est;
    est.values.assign(S, 0.0);

    const double threshold = std::log(static_cast<double>(S) / delta) / std::sqrt(cfg.L2);
    if (static_cast<double>(n) <= threshold) {
        est.thresholded = true;
        return est;
    }

    const auto row = env_->row(first.s, first.a);
    const double b = std::sqrt(cfg.L2) * std::log(static_cast<double>(S) / delta) / static_cast<double>(n);
    switch (cfg.noise_mode) {
        case NoiseMode::zero_noise:
            for (int j = 0; j < S; ++j) est.values[j] = row[j];
            break;
        case NoiseMode::adversarial_at_bound:
            for (int j = 0; j < S; ++j) est.values[j] = row[j] + b * rng.sign();
            break;
        case NoiseMode::conforming_random: {
            const double width = (rng.uniform01() < delta) ? 1.0 : b;
            for (int j = 0; j < S; ++j) est.values[j] = row[j] + rng.uniform(-width, width);
            break;
        }
    }
    for (double& v : est.values) v = std::clamp(v, -1.0, 1.0);
    return est;
}

void TransitionOracle::consume_unused(std::span<const SampleId> samples) {
    for (SampleId id : samples) {
        QuantumSample& q = registry_.at(id);
        if (q.consumed) throw DoubleConsumption("quantum sample measured twice");
        q.consumed = true;
        ++total_consumed_;
    }
}

}  // namespace qucrl
