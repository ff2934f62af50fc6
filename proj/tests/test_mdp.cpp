#include <cmath>

#include "doctest.h"
#include "qucrl/mdp.hpp"

using namespace qucrl;

TEST_CASE("mdp invariants are enforced at construction") {
    // rows must be stochastic
    CHECK_THROWS_AS(Mdp(2, 1, {0.5, 0.4, 0.5, 0.5}, {0.0, 0.0}), InvalidParams);
    // probabilities nonnegative
    CHECK_THROWS_AS(Mdp(2, 1, {1.2, -0.2, 0.5, 0.5}, {0.0, 0.0}), InvalidParams);
    // rewards in [0,1]
    CHECK_THROWS_AS(Mdp(1, 1, {1.0}, {1.5}), InvalidParams);
    CHECK_NOTHROW(Mdp(1, 1, {1.0}, {0.7}));
}

TEST_CASE("policy invariants") {
    CHECK_THROWS_AS(Policy(2, 2, {0.5, 0.4, 1.0, 0.0}), InvalidParams);
    CHECK_THROWS_AS(Policy(1, 2, {1.5, -0.5}), InvalidParams);
    const Policy p = Policy::deterministic(2, 2, {1, 0});
    CHECK(p.prob(0, 1) == 1.0);
    CHECK(p.prob(1, 0) == 1.0);
}

TEST_CASE("two_state_cycle is the textbook alternating chain") {
    const Mdp env = make_environment(EnvKind::two_state_cycle, 2, 1, 0);
    CHECK(env.num_states() == 2);
    CHECK(env.p(0, 0, 1) == 1.0);
    CHECK(env.p(1, 0, 0) == 1.0);
    CHECK(env.reward(0, 0) == 1.0);
    CHECK(env.reward(1, 0) == 0.0);
}

TEST_CASE("random_ergodic generation is deterministic in the seed") {
    const Mdp a = make_environment(EnvKind::random_ergodic, 4, 2, 7, 0.1);
    const Mdp b = make_environment(EnvKind::random_ergodic, 4, 2, 7, 0.1);
    CHECK(a == b);
    const Mdp c = make_environment(EnvKind::random_ergodic, 4, 2, 8, 0.1);
    CHECK(a.transitions() != c.transitions());
}

TEST_CASE("riverswim has stochastic rows and the two standard rewards") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    CHECK(env.num_actions() == 2);
    for (int s = 0; s < 6; ++s)
        for (int a = 0; a < 2; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < 6; ++s2) sum += env.p(s, a, s2);
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    // only r(0, left) and r(5, right) are nonzero
    for (int s = 0; s < 6; ++s)
        for (int a = 0; a < 2; ++a) {
            if (s == 0 && a == 0)
                CHECK(env.reward(s, a) > 0.0);
            else if (s == 5 && a == 1)
                CHECK(env.reward(s, a) == 1.0);
            else
                CHECK(env.reward(s, a) == 0.0);
        }
    // left is the deterministic downstream action
    CHECK(env.p(3, 0, 2) == 1.0);
    CHECK(env.p(0, 0, 0) == 1.0);
}

TEST_CASE("generator parameter validation") {
    CHECK_THROWS_AS(make_environment(EnvKind::random_ergodic, 0, 2, 0), InvalidParams);
    CHECK_THROWS_AS(make_environment(EnvKind::random_ergodic, 3, 0, 0), InvalidParams);
    CHECK_THROWS_AS(make_environment(EnvKind::random_ergodic, 3, 2, 0, 1.5), InvalidParams);
    CHECK_THROWS_AS(make_environment(EnvKind::random_ergodic, 3, 2, 0, -0.1), InvalidParams);
}

TEST_CASE("smoothing mixes rows toward uniform") {
    const Mdp env = make_environment(EnvKind::two_state_cycle, 2, 1, 0, 0.2);
    CHECK(env.p(0, 0, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(env.p(0, 0, 1) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("mdp json round trip and validation") {
    const Mdp env = make_environment(EnvKind::random_ergodic, 3, 2, 42, 0.05);
    const std::string text = mdp_to_json(env);
    const Mdp back = mdp_from_json(text);
    CHECK(back == env);

    CHECK_THROWS_AS(mdp_from_json("{\"S\": 1}"), ConfigError);
    CHECK_THROWS_AS(mdp_from_json("not json"), ConfigError);
    // invariant violation must be rejected by the loader
    CHECK_THROWS_AS(mdp_from_json(R"({"S":1,"A":1,"P":[[[0.9]]],"r":[[0.0]]})"), ConfigError);
    CHECK_THROWS_AS(mdp_from_json(R"({"S":1,"A":1,"P":[[[1.0]]],"r":[[2.0]]})"), ConfigError);
}
