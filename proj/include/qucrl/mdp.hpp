#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qucrl/errors.hpp"

namespace qucrl {

// Finite tabular MDP: transition tensor P indexed (s, a, s') and reward
// table r indexed (s, a) with rewards in [0, 1]. The ground-truth instance
// is owned by the simulator; agents only ever see it through the oracle.
class Mdp {
  public:
    Mdp(int num_states, int num_actions, std::vector<double> transitions, std::vector<double> rewards);

    int num_states() const { return S_; }
    int num_actions() const { return A_; }

    double p(int s, int a, int s2) const { return P_[idx(s, a) * S_ + s2]; }
    double reward(int s, int a) const { return r_[idx(s, a)]; }

    std::span<const double> row(int s, int a) const { return {P_.data() + idx(s, a) * S_, static_cast<std::size_t>(S_)}; }

    const std::vector<double>& transitions() const { return P_; }
    const std::vector<double>& rewards() const { return r_; }

    std::size_t idx(int s, int a) const { return static_cast<std::size_t>(s) * A_ + a; }

    bool operator==(const Mdp& other) const = default;

  private:
    int S_ = 0;
    int A_ = 0;
    std::vector<double> P_;  // S*A*S
    std::vector<double> r_;  // S*A
};

// Stochastic stationary policy: pi(a|s), rows over actions sum to 1.
class Policy {
  public:
    Policy(int num_states, int num_actions, std::vector<double> probs);

    // Deterministic policy from an action per state.
    static Policy deterministic(int num_states, int num_actions, const std::vector<int>& actions);
    static Policy uniform(int num_states, int num_actions);

    int num_states() const { return S_; }
    int num_actions() const { return A_; }

    double prob(int s, int a) const { return probs_[static_cast<std::size_t>(s) * A_ + a]; }
    std::span<const double> row(int s) const {
        return {probs_.data() + static_cast<std::size_t>(s) * A_, static_cast<std::size_t>(A_)};
    }

    const std::vector<double>& probs() const { return probs_; }

  private:
    int S_ = 0;
    int A_ = 0;
    std::vector<double> probs_;
};

enum class EnvKind { riverswim, random_ergodic, two_state_cycle };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

// Environment generators. `smoothing` mixes every transition row with the
// uniform distribution: row <- (1-eps)*row + eps/S. riverswim forces A=2 and
// two_state_cycle forces S=2; random_ergodic with eps>0 is irreducible under
// every policy. Deterministic in `seed`.
Mdp make_environment(EnvKind kind, int S, int A, std::uint64_t seed, double smoothing = 0.0);

// JSON document {"S":..,"A":..,"P":[S][A][S],"r":[S][A]}; loading validates
// the Mdp invariants and throws ConfigError on violation.
std::string mdp_to_json(const Mdp& mdp);
Mdp mdp_from_json(const std::string& text);
Mdp load_mdp(const std::string& path);
void save_mdp(const Mdp& mdp, const std::string& path);

}  // namespace qucrl
