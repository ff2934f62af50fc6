#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qucrl/mdp.hpp"
#include "qucrl/rng.hpp"

namespace qucrl {

enum class NoiseMode { conforming_random, zero_noise, adversarial_at_bound };

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);

// Estimator knobs. Logarithms are natural throughout.
struct EstimatorConfig {
    double c = 1.0;    // budget constant in n = floor(nu / (c * log^{1/2}(T sqrt(S))))
    double L2 = 1.0;   // second-moment bound of the estimated variable, in (0,1]
    NoiseMode noise_mode = NoiseMode::conforming_random;
    bool skip_vacuous_updates = true;  // leave P-hat untouched when the small-n branch fires

    void validate() const;
};

// One unmeasured superposition tied to a (state, action) visit. The true row
// it references lives inside the oracle; agent code only ever holds ids.
struct QuantumSample {
    int s = 0;
    int a = 0;
    long long t = 0;
    bool consumed = false;
};

using SampleId = std::size_t;

struct StepOutcome {
    int next_state = 0;
    double reward = 0.0;
    SampleId sample = 0;
};

struct QEstimate {
    std::vector<double> values;  // length S, entries clipped to [-1, 1]
    bool thresholded = false;    // small-n branch fired: values are all zero
};

// Number of estimator queries affordable from nu collected samples:
//   n = floor(nu / (c * log^{1/2}(T sqrt(S)))), clamped to [0, nu].
// Throws InvalidHorizon when T < 2.
long experiment_budget(long long nu, long long horizon, int S, const EstimatorConfig& cfg);

// Simulated quantum transition oracle. Owns the hidden environment rows and
// the sample registry; measuring a batch of samples collapses every one of
// them exactly once.
class TransitionOracle {
  public:
    explicit TransitionOracle(const Mdp& env) : env_(&env) {}

    // Draws the classical next state, returns the known reward and registers
    // a fresh unconsumed sample for the pair.
    StepOutcome step(int s, int a, long long t, RngStream& rng);

    // Mean estimate of the pair's transition row from the given samples.
    // Every sample is marked consumed regardless of n. When
    // n <= log(S/delta)/sqrt(L2) the output is the zero vector. Otherwise the
    // surrogate realizes the published error law: with probability 1-delta a
    // per-coordinate perturbation uniform on [-b, b] with
    // b = sqrt(L2) log(S/delta)/n, with probability delta uniform on [-1, 1];
    // adversarial_at_bound uses exactly +-b, zero_noise returns the row.
    QEstimate qbounded_estimate(std::span<const SampleId> samples, long n, double delta,
                                const EstimatorConfig& cfg, RngStream& rng);

    // Collapses samples without using their value (classical agent discards
    // its epoch samples so the used-once accounting stays uniform).
    void consume_unused(std::span<const SampleId> samples);

    bool consumed(SampleId id) const { return registry_.at(id).consumed; }
    const QuantumSample& sample(SampleId id) const { return registry_.at(id); }
    long long total_issued() const { return static_cast<long long>(registry_.size()); }
    long long total_consumed() const { return total_consumed_; }

  private:
    const Mdp* env_;
    std::vector<QuantumSample> registry_;
    long long total_consumed_ = 0;
};

// Per-(state, action) lists of unconsumed samples for the current epoch.
class SampleBuffer {
  public:
    SampleBuffer(int S, int A) : S_(S), A_(A), lists_(static_cast<std::size_t>(S) * A) {}

    void begin_epoch(int epoch) {
        epoch_ = epoch;
        for (auto& l : lists_) l.clear();
        total_ = 0;
    }

    void push(int s, int a, SampleId id) {
        lists_[index(s, a)].push_back(id);
        ++total_;
    }

    int epoch() const { return epoch_; }
    std::span<const SampleId> samples(int s, int a) const { return lists_[index(s, a)]; }
    std::size_t size(int s, int a) const { return lists_[index(s, a)].size(); }
    std::size_t total_size() const { return total_; }

    std::vector<SampleId> all() const {
        std::vector<SampleId> out;
        out.reserve(total_);
        for (const auto& l : lists_) out.insert(out.end(), l.begin(), l.end());
        return out;
    }

  private:
    std::size_t index(int s, int a) const {
        if (s < 0 || s >= S_ || a < 0 || a >= A_) throw InvalidParams("SampleBuffer: index out of range");
        return static_cast<std::size_t>(s) * A_ + a;
    }

    int S_;
    int A_;
    int epoch_ = 1;
    std::size_t total_ = 0;
    std::vector<std::vector<SampleId>> lists_;
};

}  // namespace qucrl
