#pragma once

#include <cstdint>
#include <vector>

#include "qucrl/mdp.hpp"
#include "qucrl/planner.hpp"
#include "qucrl/quantum.hpp"
#include "qucrl/transition_model.hpp"

namespace qucrl {

struct StepRecord {
    long long t = 0;
    int s = 0;
    int a = 0;
    double reward = 0.0;
    int next_state = 0;
    int epoch = 0;
};

struct EpochSummary {
    int epoch = 0;
    long long start_t = 0;
    long long length = 0;           // filled when the epoch ends (or the run does)
    double gamma_e = 0.0;           // optimistic gain of the epoch plan
    double delta_e = 0.0;           // confidence used for this epoch's plan (0 for epoch 1)
    bool truth_in_confidence_set = false;  // simulator-side bookkeeping
    double max_flow_residual = 0.0;
    int pairs_updated = 0;
    int pairs_vacuous = 0;
};

struct AgentConfig {
    EstimatorConfig estimator;
    int start_state = 0;
    // Cap, as a multiple of the nominal count-based radius, on how far the
    // estimator's certified error may widen the quantum planning set.
    double radius_inflation = 2.0;
};

struct RunResult {
    std::vector<StepRecord> records;
    std::vector<EpochSummary> epochs;
    long long total_samples_consumed = 0;
};

// Doubling trigger: the epoch ends when the just-updated pair's in-epoch
// count reaches max(1, pre-epoch count).
inline bool epoch_trigger(long long nu, long long n_cum) { return nu == std::max<long long>(1, n_cum); }

// One full agent run: epoch-doubling control loop with optimistic replanning
// at every rollover. The quantum agent estimates from collapsed epoch
// samples; the classical baseline shares the identical skeleton and differs
// only in the estimator and radius. Deterministic given the seed.
RunResult run_agent(const Mdp& env, AgentKind kind, long long horizon, std::uint64_t seed,
                    const AgentConfig& cfg = {});

}  // namespace qucrl
