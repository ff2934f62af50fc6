#pragma once

#include <vector>

#include "qucrl/mdp.hpp"

namespace qucrl {

// Average-reward evaluation of a policy: gain (long-run average reward) and
// bias vector normalized so bias[0] = 0. Satisfies, for every state s,
//   r_pi(s) - gain + (P_pi bias)(s) - bias(s) = 0
// within 1e-9.
struct GainBias {
    double gain = 0.0;
    std::vector<double> bias;

    double span() const;
};

// Induced chain P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a), row-major S x S.
std::vector<double> induced_chain(const Mdp& mdp, const Policy& policy);

// Number of recurrent classes of a row-stochastic S x S chain (edges with
// probability > edge_tol). Unichain means exactly one.
int count_recurrent_classes(const std::vector<double>& chain, int S, double edge_tol = 1e-13);

// Steady-state occupancy measure rho(s,a) of (policy, mdp): nonnegative,
// sums to 1, and balances flow within 1e-10. Throws NonErgodicChain when the
// induced chain has more than one recurrent class.
std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& policy);

// Solves the average-reward Bellman evaluation equation as one linear system
// in (gain, bias) with the normalization row bias[0] = 0 appended.
GainBias gain_bias(const Mdp& mdp, const Policy& policy);

// Closed-form Bellman error of an optimistic model against the true one:
//   B(s,a) = sum_{s'} (P_opt(s'|s,a) - P(s'|s,a)) * bias_opt(s')
// where bias_opt is the bias of (P_opt, r) under the policy.
std::vector<double> bellman_error(const Mdp& true_mdp, const std::vector<double>& optimistic_P,
                                  const Policy& policy);

struct MixingDiagnostics {
    // hitting_times[k][s*S + s'] = E[T_{pi_k, s -> s'}] for enumerated
    // deterministic policy k; populated only when the policy count is at
    // most hitting_table_cap (aggregates are always computed).
    std::vector<std::vector<double>> hitting_times;
    double t_mix = 0.0;
    double diameter = 0.0;
    long num_policies = 0;
    long num_skipped_policies = 0;     // policies with unreachable pairs
    bool t_mix_is_lower_bound = false; // true when any policy was skipped
};

// Enumerates all A^S deterministic policies (guard: A^S <= 1e6, else
// TooLargeToEnumerate) and solves the first-passage linear systems exactly.
// t_mix maximizes expected hitting time over policies and pairs; the
// diameter minimizes over policies first, then maximizes over pairs.
MixingDiagnostics mixing_diagnostics(const Mdp& mdp, long hitting_table_cap = 4096);

}  // namespace qucrl
