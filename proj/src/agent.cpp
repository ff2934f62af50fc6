#include "qucrl/agent.hpp"

#include <cmath>

namespace qucrl {

namespace {

// empirical next-state frequencies with a uniform prior for unvisited
// pairs; used only to complete the policy at states the plan never occupies
RoutingHints routing_hints(const VisitCounters& counters) {
    const int S = counters.S;
    const int A = counters.A;
    RoutingHints hints;
    hints.rows.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    hints.visit_counts.assign(static_cast<std::size_t>(S) * A, 0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const std::size_t idx = counters.pair(s, a);
            const long long total = counters.n_at(s, a) + counters.nu_at(s, a);
            hints.visit_counts[idx] = total;
            double* row = hints.rows.data() + idx * S;
            if (total == 0) {
                for (int s2 = 0; s2 < S; ++s2) row[s2] = 1.0 / S;
            } else {
                for (int s2 = 0; s2 < S; ++s2)
                    row[s2] = static_cast<double>(counters.mu_at(s, a, s2)) / static_cast<double>(total);
            }
        }
    return hints;
}

bool truth_in_set(const Mdp& env, const TransitionEstimate& estimate, const std::vector<double>& radii) {
    const int S = env.num_states();
    const int A = env.num_actions();
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double dist = 0.0;
            const auto est_row = estimate.row(s, a);
            for (int s2 = 0; s2 < S; ++s2) dist += std::fabs(env.p(s, a, s2) - est_row[s2]);
            if (dist > radii[static_cast<std::size_t>(s) * A + a] + 1e-12) return false;
        }
    return true;
}

}  // namespace

RunResult run_agent(const Mdp& env, AgentKind kind, long long horizon, std::uint64_t seed,
                    const AgentConfig& cfg) {
    if (horizon < 1) throw InvalidParams("run_agent: horizon must be at least 1");
    cfg.estimator.validate();
    const int S = env.num_states();
    const int A = env.num_actions();
    if (cfg.start_state < 0 || cfg.start_state >= S) throw InvalidParams("run_agent: bad start state");

    RngStream rng = RngStream::derive(seed, 0x51cba11ULL);
    TransitionOracle oracle(env);
    VisitCounters counters(S, A);
    TransitionEstimate estimate(S, A);
    SampleBuffer buffer(S, A);
    buffer.begin_epoch(1);

    RunResult result;
    result.records.reserve(static_cast<std::size_t>(horizon));

    // Epoch 1 plans before any data: P-hat = 0 with radii at the cap, so the
    // first program is full-ball optimism.
    std::vector<double> radii(static_cast<std::size_t>(S) * A, 2.0);
    PlanResult plan = solve_optimistic(S, A, env.rewards(), estimate.phat, radii);

    int epoch = 1;
    long long t_e = 0;
    result.epochs.push_back(EpochSummary{epoch, 1, 0, plan.objective, 0.0,
                                         truth_in_set(env, estimate, radii), plan.max_flow_residual, 0, 0});

    int state = cfg.start_state;
    for (long long t = 1; t <= horizon; ++t) {
        const int action = rng.categorical(plan.policy.row(state));
        const StepOutcome out = oracle.step(state, action, t, rng);
        result.records.push_back(StepRecord{t, state, action, out.reward, out.next_state, epoch});
        counters.record(state, action, out.next_state);
        buffer.push(state, action, out.sample);
        ++t_e;

        if (epoch_trigger(counters.nu_at(state, action), counters.n_at(state, action))) {
            // rollover: estimate from this epoch's samples, roll counters,
            // recompute radii at the current global time, replan
            const long long completed_len = t_e;
            result.epochs.back().length = completed_len;
            const double delta_e =
                1.0 / (static_cast<double>(S) * S * A * std::pow(static_cast<double>(completed_len), 7.0));

            QuantumUpdateStats stats;
            if (kind == AgentKind::quantum) {
                // the budget log needs T >= 2; a horizon-1 run still rolls once
                const long long budget_horizon = std::max<long long>(horizon, 2);
                stats = end_of_epoch_quantum_update(estimate, counters, buffer, oracle, budget_horizon,
                                                    delta_e, epoch, cfg.estimator, rng);
            } else {
                classical_empirical_update(estimate, counters);
                const auto leftovers = buffer.all();
                oracle.consume_unused(leftovers);
            }
            counters.roll_epoch();
            // The quantum radius log term ln(S^2 A t) carries a fixed
            // confidence; the classical mirror uses the matching fixed
            // delta = 1/(S^2 A) so the two radii differ only in their decay
            // (1/N vs 1/sqrt(N)). Feeding the shrinking per-epoch delta_e
            // into the classical radius instead re-inflates it as epochs
            // lengthen and resurrects already-falsified optimism.
            const double radius_delta =
                (kind == AgentKind::classical) ? 1.0 / (static_cast<double>(S) * S * A) : delta_e;
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    double radius = confidence_radius(kind, S, A, t, counters.n_at(s, a), radius_delta);
                    if (kind == AgentKind::quantum) {
                        // The count-based radius alone understates the
                        // estimator's certified error (its event constant
                        // drops a factor of order C); planning with it evicts
                        // the true row and optimism never recovers. Honor the
                        // certificate up to a bounded inflation of the
                        // nominal radius so the set still shrinks at the 1/N
                        // quantum rate.
                        const double cert = estimate.certified_radius(s, a);
                        radius = std::max(radius,
                                          std::min(cert, cfg.radius_inflation * radius));
                    }
                    radii[static_cast<std::size_t>(s) * A + a] = radius;
                }
            const RoutingHints hints = routing_hints(counters);
            plan = solve_optimistic(S, A, env.rewards(), estimate.phat, radii, &hints);

            ++epoch;
            t_e = 0;
            buffer.begin_epoch(epoch);
            result.epochs.push_back(EpochSummary{epoch, t + 1, 0, plan.objective, delta_e,
                                                 truth_in_set(env, estimate, radii),
                                                 plan.max_flow_residual, stats.pairs_updated,
                                                 stats.pairs_vacuous});
        }
        state = out.next_state;
    }
    result.epochs.back().length = t_e;
    if (result.epochs.back().length == 0) result.epochs.pop_back();  // rollover on the final step
    {
        // the run ends mid-epoch: collapse whatever the buffer still holds so
        // every issued sample is consumed exactly once
        const auto leftovers = buffer.all();
        oracle.consume_unused(leftovers);
    }
    result.total_samples_consumed = oracle.total_consumed();
    return result;
}

}  // namespace qucrl
