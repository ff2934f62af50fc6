#include "qucrl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qucrl {

namespace {

constexpr double kOccupancyFloor = 1e-7;  // below this a p-row is treated as unvisited
// support threshold for policy extraction: must sit above simplex solution
// dust (~1e-9 from the anti-degeneracy perturbation) or ratio extraction
// turns numerical noise into a policy
constexpr double kPolicyFloor = 1e-7;
constexpr double kUnreachable = 1e9;

Policy extract_policy(int S, int A, const std::vector<double>& occupancy) {
    std::vector<double> probs(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        double mass = 0.0;
        for (int a = 0; a < A; ++a) mass += occupancy[static_cast<std::size_t>(s) * A + a];
        if (mass <= kPolicyFloor) {
            for (int a = 0; a < A; ++a) probs[static_cast<std::size_t>(s) * A + a] = 1.0 / A;
            continue;
        }
        double sum = 0.0;
        for (int a = 0; a < A; ++a) {
            const double v = std::max(occupancy[static_cast<std::size_t>(s) * A + a], 0.0) / mass;
            probs[static_cast<std::size_t>(s) * A + a] = v;
            sum += v;
        }
        for (int a = 0; a < A; ++a) probs[static_cast<std::size_t>(s) * A + a] /= sum;
    }
    return Policy(S, A, std::move(probs));
}

// The stationary program says nothing about states its occupancy never
// touches, so ratio extraction is 0/0 there. Route those states toward the
// support instead: minimize the expected hitting time under the supplied
// routing model (empirical next-state frequencies with a uniform prior for
// unvisited pairs). Ties go to the least-visited action when counts are
// given (committed exploration; uniform dithering cannot climb against
// drift), uniformly otherwise.
void route_off_support(int S, int A, const std::vector<double>& routing_rows,
                       const std::vector<double>& occupancy, const std::vector<long long>* visit_counts,
                       std::vector<double>& probs) {
    std::vector<bool> on_support(S, false);
    int supported = 0;
    for (int s = 0; s < S; ++s) {
        double mass = 0.0;
        for (int a = 0; a < A; ++a) mass += occupancy[static_cast<std::size_t>(s) * A + a];
        if (mass > kPolicyFloor) {
            on_support[s] = true;
            ++supported;
        }
    }
    if (supported == S || supported == 0) return;

    auto action_value = [&](int s, int a, const std::vector<double>& h) {
        const double* row = routing_rows.data() + (static_cast<std::size_t>(s) * A + a) * S;
        double v = 1.0;
        for (int s2 = 0; s2 < S; ++s2) v += row[s2] * h[s2];
        return std::min(v, kUnreachable);
    };

    std::vector<double> h(S, kUnreachable);
    for (int s = 0; s < S; ++s)
        if (on_support[s]) h[s] = 0.0;
    for (int sweep = 0; sweep < 100 * S; ++sweep) {
        double change = 0.0;
        for (int s = 0; s < S; ++s) {
            if (on_support[s]) continue;
            double best = kUnreachable;
            for (int a = 0; a < A; ++a) best = std::min(best, action_value(s, a, h));
            change = std::max(change, std::fabs(best - h[s]));
            h[s] = best;
        }
        if (change < 1e-10) break;
    }

    for (int s = 0; s < S; ++s) {
        if (on_support[s]) continue;
        std::vector<double> values(A, kUnreachable);
        double best = kUnreachable;
        for (int a = 0; a < A; ++a) {
            values[a] = action_value(s, a, h);
            best = std::min(best, values[a]);
        }
        if (best >= kUnreachable) continue;  // support unreachable: keep the uniform fallback
        if (visit_counts != nullptr) {
            int pick = -1;
            for (int a = 0; a < A; ++a) {
                if (values[a] > best + 1e-9) continue;
                if (pick < 0 || (*visit_counts)[static_cast<std::size_t>(s) * A + a] <
                                    (*visit_counts)[static_cast<std::size_t>(s) * A + pick])
                    pick = a;
            }
            for (int a = 0; a < A; ++a)
                probs[static_cast<std::size_t>(s) * A + a] = (a == pick) ? 1.0 : 0.0;
        } else {
            int ties = 0;
            for (int a = 0; a < A; ++a)
                if (values[a] <= best + 1e-9) ++ties;
            for (int a = 0; a < A; ++a)
                probs[static_cast<std::size_t>(s) * A + a] = (values[a] <= best + 1e-9) ? 1.0 / ties : 0.0;
        }
    }
}

}  // namespace

std::vector<double> project_to_simplex(std::vector<double> v) {
    // Sort-based projection onto {q >= 0, sum q = 1}.
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double theta = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double trial = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - trial > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = trial;
        }
    }
    if (rho == 0) {  // all mass would vanish; put everything on the max entry
        std::vector<double> q(v.size(), 0.0);
        q[std::max_element(v.begin(), v.end()) - v.begin()] = 1.0;
        return q;
    }
    for (double& x : v) x = std::max(x - theta, 0.0);
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= sum;
    return v;
}

std::vector<double> nearest_simplex_point_l1(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> q(n, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        q[j] = std::max(v[j], 0.0);
        total += q[j];
    }
    if (total >= 1.0) {
        for (double& x : q) x /= total;
        return q;
    }
    if (total == 0.0) {  // nothing to scale; the uniform point is equally near
        q.assign(n, 1.0 / static_cast<double>(n));
        return q;
    }
    // add the missing mass to the largest entry (ties to the lowest index)
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (v[j] > v[best]) best = j;
    q[best] += 1.0 - total;
    return q;
}

// L1 distance from an arbitrary vector to the probability simplex.
double l1_distance_to_simplex(std::span<const double> v) {
    double negatives = 0.0, positives = 0.0;
    for (double x : v) {
        if (x < 0.0)
            negatives -= x;
        else
            positives += x;
    }
    return negatives + std::fabs(1.0 - positives);
}

ExtendedLpInstance build_extended_lp(int S, int A, const std::vector<double>& rewards,
                                     const std::vector<double>& phat, const std::vector<double>& radii) {
    if (S < 1 || A < 1) throw InvalidParams("build_extended_lp: bad dimensions");
    if (rewards.size() != static_cast<std::size_t>(S) * A) throw InvalidParams("build_extended_lp: reward size");
    if (phat.size() != static_cast<std::size_t>(S) * A * S) throw InvalidParams("build_extended_lp: phat size");
    if (radii.size() != static_cast<std::size_t>(S) * A) throw InvalidParams("build_extended_lp: radii size");
    for (double r : radii)
        if (!(r > 0.0)) throw InvalidRadius("build_extended_lp: radii must be positive");
    for (double v : phat)
        if (!std::isfinite(v)) throw InvalidParams("build_extended_lp: non-finite estimate entry");

    // Ball centers are raw estimates, not probability vectors; a ball lying
    // entirely off the simplex would force the pair's occupancy to zero and
    // the plan would abandon it for good. Floor each effective radius at the
    // center's distance to the simplex: enlarging a ball never evicts the
    // true row, so optimism is preserved, and every pair stays plannable.
    std::vector<double> eff_radii(radii);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const std::span<const double> row{phat.data() + (static_cast<std::size_t>(s) * A + a) * S,
                                              static_cast<std::size_t>(S)};
            eff_radii[static_cast<std::size_t>(s) * A + a] =
                std::max(radii[static_cast<std::size_t>(s) * A + a],
                         l1_distance_to_simplex(row) + 1e-9);
        }

    ExtendedLpInstance inst;
    inst.S = S;
    inst.A = A;
    const std::size_t sas = static_cast<std::size_t>(S) * A * S;
    LpProblem& lp = inst.problem;
    lp.num_vars = static_cast<int>(2 * sas);
    lp.objective.assign(lp.num_vars, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            for (int s2 = 0; s2 < S; ++s2)
                lp.objective[inst.p_index(s, a, s2)] = rewards[static_cast<std::size_t>(s) * A + a];

    lp.var_names.resize(lp.num_vars);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            for (int s2 = 0; s2 < S; ++s2) {
                const std::string suffix =
                    std::to_string(s) + "_" + std::to_string(a) + "_" + std::to_string(s2);
                lp.var_names[inst.p_index(s, a, s2)] = "p_" + suffix;
                lp.var_names[inst.alpha_index(s, a, s2)] = "al_" + suffix;
            }

    // (i) normalization
    {
        std::vector<double> row(lp.num_vars, 0.0);
        for (std::size_t j = 0; j < sas; ++j) row[j] = 1.0;
        lp.add_row(std::move(row), RowSense::eq, 1.0);
    }
    // (ii) relaxed flow balance: out-flow(s') <= in-flow(s')
    for (int s2 = 0; s2 < S; ++s2) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int a = 0; a < A; ++a)
            for (int u = 0; u < S; ++u) row[inst.p_index(s2, a, u)] += 1.0;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) row[inst.p_index(s, a, s2)] -= 1.0;
        lp.add_row(std::move(row), RowSense::le, 0.0);
    }
    // (iii) deviation envelope: |p - P_hat * rho| <= alpha
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            for (int s2 = 0; s2 < S; ++s2) {
                const double ph = phat[(static_cast<std::size_t>(s) * A + a) * S + s2];
                std::vector<double> plus(lp.num_vars, 0.0);
                for (int u = 0; u < S; ++u) plus[inst.p_index(s, a, u)] -= ph;
                plus[inst.p_index(s, a, s2)] += 1.0;
                plus[inst.alpha_index(s, a, s2)] = -1.0;
                std::vector<double> minus(lp.num_vars, 0.0);
                for (std::size_t j = 0; j < sas; ++j) minus[j] = -plus[j];
                minus[inst.alpha_index(s, a, s2)] = -1.0;
                lp.add_row(std::move(plus), RowSense::le, 0.0);
                lp.add_row(std::move(minus), RowSense::le, 0.0);
            }
    // (iv) ball coupling: sum_s' alpha <= radius * rho
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double rad = eff_radii[static_cast<std::size_t>(s) * A + a];
            std::vector<double> row(lp.num_vars, 0.0);
            for (int s2 = 0; s2 < S; ++s2) {
                row[inst.alpha_index(s, a, s2)] = 1.0;
                row[inst.p_index(s, a, s2)] -= rad;
            }
            lp.add_row(std::move(row), RowSense::le, 0.0);
        }
    return inst;
}

PlanResult solve_optimistic(int S, int A, const std::vector<double>& rewards,
                            const std::vector<double>& phat, const std::vector<double>& radii,
                            const RoutingHints* hints) {
    const ExtendedLpInstance inst = build_extended_lp(S, A, rewards, phat, radii);
    const LpSolution sol = solve_lp(inst.problem);

    PlanResult plan;
    plan.objective = sol.value;
    plan.lp_iterations = sol.iterations;
    plan.occupancy.assign(static_cast<std::size_t>(S) * A, 0.0);
    plan.optimistic_P.assign(static_cast<std::size_t>(S) * A * S, 0.0);

    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double mass = 0.0;
            for (int s2 = 0; s2 < S; ++s2) mass += sol.x[inst.p_index(s, a, s2)];
            plan.occupancy[static_cast<std::size_t>(s) * A + a] = std::max(mass, 0.0);

            double* row = plan.optimistic_P.data() + (static_cast<std::size_t>(s) * A + a) * S;
            if (mass >= kOccupancyFloor) {
                double sum = 0.0;
                for (int s2 = 0; s2 < S; ++s2) {
                    row[s2] = std::max(sol.x[inst.p_index(s, a, s2)], 0.0) / mass;
                    sum += row[s2];
                }
                for (int s2 = 0; s2 < S; ++s2) row[s2] /= sum;
            } else {
                // unvisited in the solution: payoff-irrelevant, recover the
                // nearest admissible row around the running estimate
                std::vector<double> ph(S);
                for (int s2 = 0; s2 < S; ++s2)
                    ph[s2] = phat[(static_cast<std::size_t>(s) * A + a) * S + s2];
                std::vector<double> q = project_to_simplex(ph);
                double dist = 0.0;
                for (int s2 = 0; s2 < S; ++s2) dist += std::fabs(q[s2] - ph[s2]);
                const double eff = std::max(radii[static_cast<std::size_t>(s) * A + a],
                                            l1_distance_to_simplex(ph) + 1e-9);
                if (dist > eff) q = nearest_simplex_point_l1(ph);
                for (int s2 = 0; s2 < S; ++s2) row[s2] = q[s2];
            }
        }

    for (int s2 = 0; s2 < S; ++s2) {
        double outflow = 0.0, inflow = 0.0;
        for (int a = 0; a < A; ++a)
            for (int u = 0; u < S; ++u) outflow += sol.x[inst.p_index(s2, a, u)];
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) inflow += sol.x[inst.p_index(s, a, s2)];
        plan.max_flow_residual = std::max(plan.max_flow_residual, std::fabs(inflow - outflow));
    }

    Policy extracted = extract_policy(S, A, plan.occupancy);
    std::vector<double> probs = extracted.probs();
    if (hints != nullptr && !hints->rows.empty()) {
        if (hints->rows.size() != static_cast<std::size_t>(S) * A * S)
            throw InvalidParams("solve_optimistic: routing rows have wrong size");
        route_off_support(S, A, hints->rows, plan.occupancy,
                          hints->visit_counts.empty() ? nullptr : &hints->visit_counts, probs);
    }
    plan.policy = Policy(S, A, std::move(probs));
    return plan;
}

KnownModelSolution solve_known_model(const Mdp& mdp) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    LpProblem lp;
    lp.num_vars = S * A;
    lp.objective.assign(lp.num_vars, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) lp.objective[static_cast<std::size_t>(s) * A + a] = mdp.reward(s, a);

    {
        std::vector<double> row(lp.num_vars, 1.0);
        lp.add_row(std::move(row), RowSense::eq, 1.0);
    }
    for (int s2 = 0; s2 < S; ++s2) {
        std::vector<double> row(lp.num_vars, 0.0);
        for (int a = 0; a < A; ++a) row[static_cast<std::size_t>(s2) * A + a] += 1.0;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) row[static_cast<std::size_t>(s) * A + a] -= mdp.p(s, a, s2);
        lp.add_row(std::move(row), RowSense::eq, 0.0);
    }

    const LpSolution sol = solve_lp(lp);
    KnownModelSolution out;
    out.gain = sol.value;
    out.occupancy = sol.x;
    for (double& v : out.occupancy) v = std::max(v, 0.0);
    out.policy = extract_policy(S, A, out.occupancy);
    return out;
}

}  // namespace qucrl
