#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qucrl/quantum.hpp"

namespace qucrl {

// In-epoch visits nu, pre-epoch cumulative visits N and cumulative observed
// next-state counts mu. N rolls at epoch boundaries: N <- N + nu, nu <- 0.
struct VisitCounters {
    VisitCounters(int S, int A)
        : S(S), A(A), nu(static_cast<std::size_t>(S) * A, 0), n_cum(static_cast<std::size_t>(S) * A, 0),
          mu(static_cast<std::size_t>(S) * A * S, 0) {}

    int S;
    int A;
    std::vector<long long> nu;
    std::vector<long long> n_cum;
    std::vector<long long> mu;

    long long nu_at(int s, int a) const { return nu[pair(s, a)]; }
    long long n_at(int s, int a) const { return n_cum[pair(s, a)]; }
    long long mu_at(int s, int a, int s2) const { return mu[pair(s, a) * S + s2]; }

    std::size_t pair(int s, int a) const { return static_cast<std::size_t>(s) * A + a; }

    void record(int s, int a, int s2);
    void roll_epoch();
};

// Weighted running estimate P-hat plus the most recent epoch estimate per
// pair. P-hat rows are identically zero until a pair's first applied update.
struct TransitionEstimate {
    TransitionEstimate(int S, int A)
        : S(S), A(A), phat(static_cast<std::size_t>(S) * A * S, 0.0),
          applied_visits(static_cast<std::size_t>(S) * A, 0.0),
          certified_budget(static_cast<std::size_t>(S) * A, 0.0),
          certified_sq(static_cast<std::size_t>(S) * A, 0.0),
          epoch_of_last_update(static_cast<std::size_t>(S) * A, 0),
          last_ptilde(static_cast<std::size_t>(S) * A),
          last_thresholded(static_cast<std::size_t>(S) * A, false) {}

    int S;
    int A;
    std::vector<double> phat;              // S*A*S
    std::vector<double> applied_visits;    // per pair: total nu over applied updates
    std::vector<double> certified_budget;  // per pair: sum of nu_i * b_i over applied updates
    std::vector<double> certified_sq;      // per pair: sum of (nu_i * b_i)^2
    std::vector<int> epoch_of_last_update;
    std::vector<std::vector<double>> last_ptilde;  // empty = never estimated
    std::vector<char> last_thresholded;

    std::span<double> row(int s, int a) {
        return {phat.data() + (static_cast<std::size_t>(s) * A + a) * S, static_cast<std::size_t>(S)};
    }
    std::span<const double> row(int s, int a) const {
        return {phat.data() + (static_cast<std::size_t>(s) * A + a) * S, static_cast<std::size_t>(S)};
    }

    // L1 radius the estimator can actually certify for a pair: the smaller
    // of the worst-case visit-weighted width sum and a sub-Gaussian
    // high-probability bound on the weighted noise (the refresh
    // perturbations are independent and bounded). S + 1 covers any clipped
    // estimate when no refresh ever applied. The agent plans with the larger
    // of this and the nominal count-based radius; a ball smaller than the
    // certified error recurrently evicts the true row and collapses
    // optimism for good.
    double certified_radius(int s, int a) const {
        const std::size_t idx = static_cast<std::size_t>(s) * A + a;
        const double mass = applied_visits[idx];
        if (mass <= 0.0) return static_cast<double>(S) + 1.0;
        // per-coordinate weighted noise is a sum of independent bounded
        // perturbations with sub-Gaussian scale sigma; the L1 norm over S
        // coordinates concentrates around S E|X| with a sqrt(S)-scale tail
        const double worst_l1 = static_cast<double>(S) * certified_budget[idx] / mass;
        const double sigma = std::sqrt(certified_sq[idx] / 3.0) / mass;
        const double quantile_l1 = (0.9 * S + 3.0 * std::sqrt(static_cast<double>(S))) * sigma;
        return std::min(worst_l1, quantile_l1);
    }
};

// One increment of nu(s,a) and mu(s,a,s').
inline void record_visit(VisitCounters& counters, int s, int a, int s2) { counters.record(s, a, s2); }

// P-hat <- (mass * P-hat + nu * P-tilde) / (mass + nu). With mass = 0 this
// reduces to P-hat := P-tilde, which realizes the per-pair first-epoch case.
void combine_weighted(std::span<double> phat_row, double applied_mass, std::span<const double> ptilde,
                      double nu);

struct QuantumUpdateStats {
    int pairs_updated = 0;   // estimates applied to P-hat
    int pairs_vacuous = 0;   // small-n branch fired
};

// End-of-epoch estimate refresh for every pair visited this epoch: budget
// the pair's samples, run the mean estimator (consuming the samples), and
// fold the fresh estimate into P-hat with visit-proportional weights. The
// per-call confidence is delta_e split evenly across the pairs updated this
// epoch. Vacuous (thresholded) estimates leave P-hat unchanged when
// cfg.skip_vacuous_updates is set; with the flag off the zero vector is
// averaged in literally.
QuantumUpdateStats end_of_epoch_quantum_update(TransitionEstimate& estimate, const VisitCounters& counters,
                                               SampleBuffer& buffer, TransitionOracle& oracle,
                                               long long horizon, double delta_e, int completed_epoch,
                                               const EstimatorConfig& cfg, RngStream& rng);

// Classical baseline: P-hat(s'|s,a) = mu(s,a,s') / max(1, N+nu).
void classical_empirical_update(TransitionEstimate& estimate, const VisitCounters& counters);

enum class AgentKind { quantum, classical };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

// L1 confidence radius around P-hat for one pair, capped at 2 (the L1
// diameter of a simplex pair) and floored at 1e-9 so downstream ball
// constraints stay well posed.
//   quantum:   7 S log(S^2 A t) / max(1, N)
//   classical: sqrt(14 S log(2 A t / delta) / max(1, N))
double confidence_radius(AgentKind kind, int S, int A, long long t, long long n_visits, double delta);

// Estimate snapshot in the same structured text format as Mdp rows.
std::string estimate_to_json(const TransitionEstimate& estimate);
TransitionEstimate estimate_from_json(const std::string& text);

}  // namespace qucrl
