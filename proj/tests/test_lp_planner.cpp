#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qucrl/evaluation.hpp"
#include "qucrl/planner.hpp"
#include "qucrl/rng.hpp"

using namespace qucrl;

namespace {

// feasible q-interval {q in [0,1] : |q - c0| + |1 - q - c1| <= rad} for a
// two-state row (q, 1-q) around center (c0, c1); convex, so binary search
// from the minimizer is exact
struct QInterval {
    bool empty = true;
    double lo = 0.0, hi = 0.0;
};

QInterval q_interval(double c0, double c1, double rad) {
    auto f = [&](double q) { return std::fabs(q - c0) + std::fabs(1.0 - q - c1); };
    double best_q = 0.0, best = f(0.0);
    for (double cand : {1.0, std::min(std::max(c0, 0.0), 1.0), std::min(std::max(1.0 - c1, 0.0), 1.0)}) {
        if (f(cand) < best) {
            best = f(cand);
            best_q = cand;
        }
    }
    QInterval iv;
    if (best > rad) return iv;
    iv.empty = false;
    double a = 0.0, b = best_q;
    if (f(0.0) <= rad) {
        iv.lo = 0.0;
    } else {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            (f(mid) <= rad ? b : a) = mid;
        }
        iv.lo = b;
    }
    a = best_q;
    b = 1.0;
    if (f(1.0) <= rad) {
        iv.hi = 1.0;
    } else {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            (f(mid) <= rad ? a : b) = mid;
        }
        iv.hi = a;
    }
    return iv;
}

// brute-force optimum of the optimistic program for S=2, A=2 over the
// occupancy simplex at resolution 1/res
double grid_search_optimum(const std::vector<double>& rewards, const std::vector<double>& phat,
                           const std::vector<double>& radii, int res) {
    QInterval iv[4];
    for (int p = 0; p < 4; ++p) iv[p] = q_interval(phat[2 * p], phat[2 * p + 1], radii[p]);

    double best = -1.0;
    for (int i = 0; i <= res; ++i)
        for (int j = 0; i + j <= res; ++j)
            for (int k = 0; i + j + k <= res; ++k) {
                const int l = res - i - j - k;
                const double rho[4] = {static_cast<double>(i) / res, static_cast<double>(j) / res,
                                       static_cast<double>(k) / res, static_cast<double>(l) / res};
                double in_lo = 0.0, in_hi = 0.0;
                bool feasible = true;
                for (int p = 0; p < 4; ++p) {
                    if (rho[p] == 0.0) continue;
                    if (iv[p].empty) {
                        feasible = false;
                        break;
                    }
                    in_lo += rho[p] * iv[p].lo;
                    in_hi += rho[p] * iv[p].hi;
                }
                if (!feasible) continue;
                const double out0 = rho[0] + rho[1];
                if (out0 < in_lo - 1e-12 || out0 > in_hi + 1e-12) continue;
                double value = 0.0;
                for (int p = 0; p < 4; ++p) value += rewards[p] * rho[p];
                best = std::max(best, value);
            }
    return best;
}

}  // namespace

TEST_CASE("solve_lp: trivial equality program") {
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.add_row({1.0}, RowSense::eq, 1.0);
    const LpSolution sol = solve_lp(lp);
    CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solve_lp: infeasible program is reported") {
    LpProblem lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.add_row({1.0}, RowSense::le, 1.0);
    lp.add_row({1.0}, RowSense::ge, 2.0);
    CHECK_THROWS_AS(solve_lp(lp), LpInfeasible);
}

TEST_CASE("extended LP has the documented shape") {
    const int S = 3, A = 2;
    std::vector<double> rewards(S * A, 0.5);
    std::vector<double> phat(static_cast<std::size_t>(S) * A * S, 1.0 / S);
    std::vector<double> radii(S * A, 0.3);
    const ExtendedLpInstance inst = build_extended_lp(S, A, rewards, phat, radii);
    CHECK(inst.problem.num_vars == 2 * S * A * S);
    CHECK(static_cast<int>(inst.problem.rows.size()) == 1 + S + 2 * S * A * S + S * A);  // 46 for 3x2

    CHECK_THROWS_AS(build_extended_lp(S, A, rewards, phat, std::vector<double>(S * A, 0.0)),
                    InvalidRadius);
}

TEST_CASE("solve_optimistic: degenerate single pair") {
    const std::vector<double> rewards = {0.6};
    const std::vector<double> phat = {1.0};
    const std::vector<double> radii = {2.0};
    const PlanResult plan = solve_optimistic(1, 1, rewards, phat, radii);
    CHECK(plan.occupancy[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(plan.objective == doctest::Approx(0.6).epsilon(1e-10));
}

TEST_CASE("solve_optimistic: single-state bandit picks the best arm") {
    const std::vector<double> rewards = {0.3, 0.9};
    const std::vector<double> phat = {1.0, 1.0};
    const std::vector<double> radii = {2.0, 2.0};
    const PlanResult plan = solve_optimistic(1, 2, rewards, phat, radii);
    CHECK(plan.objective == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(plan.occupancy[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(plan.policy.prob(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_optimistic: full-ball optimism saturates at the best reward") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    std::vector<double> phat(6 * 2 * 6, 0.0);
    std::vector<double> radii(6 * 2, 2.0);
    const PlanResult plan = solve_optimistic(6, 2, env.rewards(), phat, radii);
    CHECK(plan.objective == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_optimistic: vanishing radii around the truth recover the optimal gain") {
    const Mdp env = make_environment(EnvKind::random_ergodic, 3, 2, 21, 0.1);
    const double gamma_star = solve_known_model(env).gain;
    std::vector<double> radii(3 * 2, 1e-9);
    const PlanResult plan = solve_optimistic(3, 2, env.rewards(), env.transitions(), radii);
    CHECK(std::fabs(plan.objective - gamma_star) <= 1e-6);
}

TEST_CASE("plan invariants: recovery, ball membership, extraction, flow equality") {
    RngStream rng = RngStream::derive(77, 0x1a);
    for (int rep = 0; rep < 10; ++rep) {
        const int S = 3, A = 2;
        const Mdp env = make_environment(EnvKind::random_ergodic, S, A, 100 + rep, 0.1);
        // estimate = truth plus a small row perturbation, radii comfortably larger
        std::vector<double> phat = env.transitions();
        for (double& v : phat) v += rng.uniform(-0.01, 0.01);
        std::vector<double> radii(S * A, 0.0);
        for (double& r : radii) r = rng.uniform(0.15, 0.5);

        const PlanResult plan = solve_optimistic(S, A, env.rewards(), phat, radii);

        double mass = 0.0;
        for (double v : plan.occupancy) {
            CHECK(v >= -1e-12);
            mass += v;
        }
        CHECK(std::fabs(mass - 1.0) <= 1e-8);

        double objective = 0.0;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                objective += env.reward(s, a) * plan.occupancy[static_cast<std::size_t>(s) * A + a];
        CHECK(std::fabs(objective - plan.objective) <= 1e-8);

        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                double row_sum = 0.0, dist = 0.0;
                for (int s2 = 0; s2 < S; ++s2) {
                    const double pe = plan.optimistic_P[(static_cast<std::size_t>(s) * A + a) * S + s2];
                    CHECK(pe >= -1e-12);
                    row_sum += pe;
                    dist += std::fabs(pe - phat[(static_cast<std::size_t>(s) * A + a) * S + s2]);
                }
                CHECK(std::fabs(row_sum - 1.0) <= 1e-8);
                CHECK(dist <= radii[static_cast<std::size_t>(s) * A + a] + 1e-8);
            }

        for (int s = 0; s < S; ++s) {
            double state_mass = 0.0;
            for (int a = 0; a < A; ++a) state_mass += plan.occupancy[static_cast<std::size_t>(s) * A + a];
            if (state_mass <= 1e-12) continue;
            for (int a = 0; a < A; ++a)
                CHECK(std::fabs(plan.policy.prob(s, a) * state_mass -
                                plan.occupancy[static_cast<std::size_t>(s) * A + a]) <= 1e-10);
        }

        CHECK(plan.max_flow_residual <= 1e-7);

        // optimism: the truth is inside every ball by construction
        const double gamma_star = solve_known_model(env).gain;
        CHECK(plan.objective >= gamma_star - 1e-6);
    }
}

TEST_CASE("deviation slacks cover the achieved row distances at the optimum") {
    const int S = 3, A = 2;
    const Mdp env = make_environment(EnvKind::random_ergodic, S, A, 314, 0.1);
    std::vector<double> phat = env.transitions();
    std::vector<double> radii(S * A, 0.25);
    const ExtendedLpInstance inst = build_extended_lp(S, A, env.rewards(), phat, radii);
    const LpSolution sol = solve_lp(inst.problem);

    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double rho = 0.0;
            for (int s2 = 0; s2 < S; ++s2) rho += sol.x[inst.p_index(s, a, s2)];
            double alpha_sum = 0.0, achieved = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
                alpha_sum += sol.x[inst.alpha_index(s, a, s2)];
                achieved += std::fabs(sol.x[inst.p_index(s, a, s2)] -
                                      phat[(static_cast<std::size_t>(s) * A + a) * S + s2] * rho);
            }
            CHECK(alpha_sum >= achieved - 1e-8);              // slacks envelope the deviations
            CHECK(alpha_sum <= 0.25 * rho + 1e-8);            // and stay inside the ball budget
        }
}

TEST_CASE("solve_optimistic beats the brute-force grid oracle") {
    RngStream rng = RngStream::derive(5150, 0x2b);
    for (int rep = 0; rep < 3; ++rep) {
        const int S = 2, A = 2;
        const Mdp env = make_environment(EnvKind::random_ergodic, S, A, 500 + rep, 0.1);
        std::vector<double> phat = env.transitions();
        for (double& v : phat) v += rng.uniform(-0.05, 0.05);
        std::vector<double> radii(S * A, 0.0);
        for (double& r : radii) r = rng.uniform(0.1, 0.4);

        const PlanResult plan = solve_optimistic(S, A, env.rewards(), phat, radii);
        const double grid_best = grid_search_optimum(env.rewards(), phat, radii, 200);
        CHECK(plan.objective >= grid_best - 0.01);
    }
}

TEST_CASE("solve_known_model: analytic cases") {
    const Mdp bandit(1, 2, {1.0, 1.0}, {0.3, 0.9});
    CHECK(solve_known_model(bandit).gain == doctest::Approx(0.9).epsilon(1e-9));

    const Mdp cycle = make_environment(EnvKind::two_state_cycle, 2, 1, 0);
    CHECK(solve_known_model(cycle).gain == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("solve_known_model: riverswim matches relative value iteration") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    const KnownModelSolution sol = solve_known_model(env);
    const double rvi = oracles::relative_value_iteration(6, 2, env.transitions(), env.rewards(), 1e-10);
    CHECK(std::fabs(sol.gain - rvi) <= 1e-8);
    // the optimal policy swims upstream at the top state
    CHECK(sol.policy.prob(5, 1) > 0.99);
}

TEST_CASE("known-model gain dominates every evaluated policy") {
    const Mdp env = make_environment(EnvKind::random_ergodic, 4, 2, 9, 0.1);
    const double gain = solve_known_model(env).gain;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        RngStream rng = RngStream::derive(seed, 0xfeed);
        std::vector<double> probs(4 * 2, 0.0);
        for (int s = 0; s < 4; ++s) {
            const double u = rng.uniform01();
            probs[static_cast<std::size_t>(s) * 2] = u;
            probs[static_cast<std::size_t>(s) * 2 + 1] = 1.0 - u;
        }
        const GainBias gb = gain_bias(env, Policy(4, 2, probs));
        CHECK(gain >= gb.gain - 1e-7);
    }
}

TEST_CASE("policy extraction falls back to uniform on zero-occupancy states") {
    // state 1 earns nothing and the model can make state 0 absorbing
    const std::vector<double> rewards = {1.0, 0.0};
    std::vector<double> phat = {1.0, 0.0, 0.0, 1.0};
    std::vector<double> radii = {2.0, 2.0};
    const PlanResult plan = solve_optimistic(2, 1, rewards, phat, radii);
    CHECK(plan.policy.prob(1, 0) == doctest::Approx(1.0));  // single action: uniform == certain
    CHECK(plan.occupancy[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_optimistic survives adversarial estimates and radii") {
    // estimates far off the simplex, radii from the floor to the cap
    RngStream rng = RngStream::derive(8888, 0x3c);
    for (int rep = 0; rep < 50; ++rep) {
        const int S = 2 + static_cast<int>(rng.raw() % 3);
        const int A = 1 + static_cast<int>(rng.raw() % 3);
        const Mdp env = make_environment(EnvKind::random_ergodic, S, A, 9000 + rep, 0.05);
        std::vector<double> phat = env.transitions();
        for (double& v : phat) {
            v += rng.uniform(-0.5, 0.5);
            v = std::min(1.0, std::max(-1.0, v));
        }
        std::vector<double> radii(static_cast<std::size_t>(S) * A);
        for (double& r : radii) {
            const double u = rng.uniform01();
            r = (u < 0.2) ? 1e-9 : (u < 0.4 ? 2.0 : rng.uniform(0.05, 1.5));
        }
        const PlanResult plan = solve_optimistic(S, A, env.rewards(), phat, radii);

        double mass = 0.0, max_reward = 0.0;
        for (double v : plan.occupancy) mass += v;
        for (double v : env.rewards()) max_reward = std::max(max_reward, v);
        CHECK(std::fabs(mass - 1.0) <= 1e-8);
        CHECK(plan.objective <= max_reward + 1e-8);
        CHECK(plan.max_flow_residual <= 1e-7);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                double row_sum = 0.0, dist = 0.0, off_simplex = 0.0, pos = 0.0;
                for (int s2 = 0; s2 < S; ++s2) {
                    const double pe = plan.optimistic_P[(static_cast<std::size_t>(s) * A + a) * S + s2];
                    const double ph = phat[(static_cast<std::size_t>(s) * A + a) * S + s2];
                    row_sum += pe;
                    dist += std::fabs(pe - ph);
                    if (ph < 0.0) off_simplex -= ph;
                    else pos += ph;
                }
                off_simplex += std::fabs(1.0 - pos);
                CHECK(std::fabs(row_sum - 1.0) <= 1e-8);
                // within the effective ball (nominal radius floored at the
                // center's simplex distance)
                const double eff =
                    std::max(radii[static_cast<std::size_t>(s) * A + a], off_simplex + 1e-9);
                CHECK(dist <= eff + 1e-6);
            }
    }
}

TEST_CASE("lp text dump is well formed") {
    const ExtendedLpInstance inst =
        build_extended_lp(1, 1, {0.5}, {1.0}, {2.0});
    std::ostringstream ss;
    write_lp_format(inst.problem, ss);
    const std::string text = ss.str();
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("p_0_0_0") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}
