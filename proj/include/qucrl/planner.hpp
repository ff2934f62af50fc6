#pragma once

#include <vector>

#include "qucrl/lp.hpp"
#include "qucrl/mdp.hpp"

namespace qucrl {

// Extended LP over joint variables p(s,a,s') = rho(s,a) * P(s'|s,a) plus
// per-entry deviation slacks alpha(s,a,s'). Constraint layout:
//   row 0:                 sum p = 1                                   (EQ)
//   rows 1 .. S:           out-flow(s') <= in-flow(s')                 (LE)
//   rows S+1 .. S+2SAS:    |p - P_hat * rho| <= alpha, two rows each   (LE)
//   last SA rows:          sum_s' alpha <= radius * rho                (LE)
// giving exactly 1 + S + 2*S*A*S + S*A constraint rows.
struct ExtendedLpInstance {
    int S = 0;
    int A = 0;
    LpProblem problem;

    std::size_t p_index(int s, int a, int s2) const {
        return (static_cast<std::size_t>(s) * A + a) * S + s2;
    }
    std::size_t alpha_index(int s, int a, int s2) const {
        return static_cast<std::size_t>(S) * A * S + p_index(s, a, s2);
    }
};

ExtendedLpInstance build_extended_lp(int S, int A, const std::vector<double>& rewards,
                                     const std::vector<double>& phat, const std::vector<double>& radii);

struct PlanResult {
    std::vector<double> occupancy;     // rho_e, S*A
    std::vector<double> optimistic_P;  // P_e, S*A*S
    double objective = 0.0;            // Gamma_e
    Policy policy = Policy::uniform(1, 1);
    double max_flow_residual = 0.0;    // worst |in-flow - out-flow| at the optimum
    long lp_iterations = 0;
};

// Policy completion data for states the occupancy program leaves undefined.
// rows: an S*A*S routing model (empirical next-state frequencies, uniform
// where unvisited); visit_counts (optional): per-pair totals used to break
// routing ties toward the least-visited action.
struct RoutingHints {
    std::vector<double> rows;
    std::vector<long long> visit_counts;
};

// Solves the optimistic program and recovers (rho_e, P_e, pi_e). Rows with
// vanishing occupancy recover P_hat projected to the simplex within the
// pair's ball. States with vanishing occupancy default to the uniform
// policy; with RoutingHints they instead take the action minimizing the
// expected hitting time to the plan's support under the routing model.
PlanResult solve_optimistic(int S, int A, const std::vector<double>& rewards,
                            const std::vector<double>& phat, const std::vector<double>& radii,
                            const RoutingHints* hints = nullptr);

struct KnownModelSolution {
    double gain = 0.0;
    Policy policy = Policy::uniform(1, 1);
    std::vector<double> occupancy;
};

// Known-model occupancy LP with equality flow balance; the regret oracle.
KnownModelSolution solve_known_model(const Mdp& mdp);

// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v);

// A simplex point at minimal L1 distance from v (deterministic choice).
std::vector<double> nearest_simplex_point_l1(const std::vector<double>& v);

}  // namespace qucrl
