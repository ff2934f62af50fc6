#include <cmath>

#include "doctest.h"
#include "qucrl/quantum.hpp"
#include "qucrl/verification.hpp"

using namespace qucrl;

namespace {

Mdp deterministic_hop_env() {
    // 4 states, 1 action, state 0 jumps to state 3 with certainty
    std::vector<double> P(4 * 1 * 4, 0.0);
    P[0 * 4 + 3] = 1.0;
    P[1 * 4 + 0] = 1.0;
    P[2 * 4 + 1] = 1.0;
    P[3 * 4 + 2] = 1.0;
    std::vector<double> r(4, 0.25);
    return Mdp(4, 1, std::move(P), std::move(r));
}

}  // namespace

TEST_CASE("oracle step: point-mass row, known reward, seeded determinism") {
    const Mdp env = deterministic_hop_env();
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(1, 0);
    const StepOutcome out = oracle.step(0, 0, 1, rng);
    CHECK(out.next_state == 3);
    CHECK(out.reward == 0.25);
    CHECK_FALSE(oracle.consumed(out.sample));

    // identical seed and arguments give the identical outcome
    TransitionOracle oracle2(env);
    RngStream rng2 = RngStream::derive(1, 0);
    const StepOutcome out2 = oracle2.step(0, 0, 1, rng2);
    CHECK(out2.next_state == out.next_state);
    CHECK(out2.sample == out.sample);
}

TEST_CASE("oracle step: empirical frequencies approach the row") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(33, 0);
    const long draws = 100000;
    std::vector<double> freq(6, 0.0);
    for (long k = 0; k < draws; ++k) freq[static_cast<std::size_t>(oracle.step(2, 1, k, rng).next_state)] += 1.0;
    for (int s2 = 0; s2 < 6; ++s2) CHECK(std::fabs(freq[s2] / draws - env.p(2, 1, s2)) <= 0.01);
}

TEST_CASE("experiment budget formula") {
    EstimatorConfig cfg;
    CHECK(experiment_budget(0, 10000, 6, cfg) == 0);
    // ln(1e4 * sqrt(6)) ~ 10.106, sqrt ~ 3.179, floor(100 / 3.179) = 31
    CHECK(experiment_budget(100, 10000, 6, cfg) == 31);
    EstimatorConfig starved = cfg;
    starved.c = 1e6;
    CHECK(experiment_budget(100, 10000, 6, starved) == 0);
    CHECK_THROWS_AS(experiment_budget(100, 1, 6, cfg), InvalidHorizon);

    long prev = 0;
    for (long long nu = 0; nu <= 300; nu += 7) {
        const long n = experiment_budget(nu, 10000, 6, cfg);
        CHECK(n >= prev);
        CHECK(n <= nu);
        prev = n;
    }
    // n never exceeds the sample count even for tiny c
    EstimatorConfig tiny = cfg;
    tiny.c = 1e-9;
    CHECK(experiment_budget(50, 10000, 6, tiny) == 50);
}

TEST_CASE("qbounded: small-n branch outputs zero and still consumes everything") {
    const Mdp env = deterministic_hop_env();
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(2, 0);
    std::vector<SampleId> ids;
    for (int k = 0; k < 5; ++k) ids.push_back(oracle.step(1, 0, k, rng).sample);

    EstimatorConfig cfg;
    const QEstimate est = oracle.qbounded_estimate(ids, 0, 0.1, cfg, rng);
    CHECK(est.thresholded);
    for (double v : est.values) CHECK(v == 0.0);
    for (SampleId id : ids) CHECK(oracle.consumed(id));
    CHECK(oracle.total_consumed() == 5);
}

TEST_CASE("qbounded: collapse is permanent and keys must match") {
    const Mdp env = deterministic_hop_env();
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(3, 0);
    const SampleId a = oracle.step(1, 0, 1, rng).sample;
    const SampleId b = oracle.step(2, 0, 2, rng).sample;

    EstimatorConfig cfg;
    std::vector<SampleId> mixed = {a, b};
    CHECK_THROWS_AS(oracle.qbounded_estimate(mixed, 10, 0.1, cfg, rng), MixedKeys);

    std::vector<SampleId> just_a = {a};
    oracle.qbounded_estimate(just_a, 10, 0.1, cfg, rng);
    CHECK_THROWS_AS(oracle.qbounded_estimate(just_a, 10, 0.1, cfg, rng), DoubleConsumption);
    CHECK_THROWS_AS(oracle.consume_unused(just_a), DoubleConsumption);
}

TEST_CASE("qbounded: zero-noise mode reproduces a deterministic row exactly") {
    const Mdp env = deterministic_hop_env();
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(4, 0);
    const SampleId id = oracle.step(0, 0, 1, rng).sample;
    EstimatorConfig cfg;
    cfg.noise_mode = NoiseMode::zero_noise;
    const SampleId ids[1] = {id};
    const QEstimate est = oracle.qbounded_estimate(ids, 50, 0.1, cfg, rng);
    REQUIRE_FALSE(est.thresholded);
    for (int s2 = 0; s2 < 4; ++s2) CHECK(est.values[s2] == env.p(0, 0, s2));
}

TEST_CASE("qbounded: adversarial mode sits exactly at the bound") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(5, 0);
    const SampleId id = oracle.step(2, 1, 1, rng).sample;
    EstimatorConfig cfg;
    cfg.noise_mode = NoiseMode::adversarial_at_bound;
    const long n = 64;
    const double delta = 0.05;
    const double b = std::log(6.0 / delta) / n;
    const SampleId ids[1] = {id};
    const QEstimate est = oracle.qbounded_estimate(ids, n, delta, cfg, rng);
    for (int s2 = 0; s2 < 6; ++s2) {
        const double err = std::fabs(est.values[s2] - env.p(2, 1, s2));
        CHECK(err <= b + 1e-15);
        // unclipped coordinates are exactly at the bound
        if (est.values[s2] > -1.0 + 1e-12 && est.values[s2] < 1.0 - 1e-12)
            CHECK(err == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("qbounded: conformance of the published error law") {
    // S=6, delta=0.05, n=64: at least 95% of trials within log(S/delta)/n ~ 0.0748
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    TransitionOracle oracle(env);
    RngStream rng = RngStream::derive(6, 0);
    EstimatorConfig cfg;
    const long n = 64;
    const double delta = 0.05;
    const double bound = std::log(6.0 / delta) / n;
    CHECK(bound == doctest::Approx(0.0748).epsilon(2e-3));

    const int trials = 2000;
    int within = 0;
    for (int k = 0; k < trials; ++k) {
        const SampleId id = oracle.step(2, 1, k, rng).sample;
        const SampleId ids[1] = {id};
        const QEstimate est = oracle.qbounded_estimate(ids, n, delta, cfg, rng);
        double err = 0.0;
        for (int s2 = 0; s2 < 6; ++s2) err = std::max(err, std::fabs(est.values[s2] - env.p(2, 1, s2)));
        if (err <= bound) ++within;
    }
    // expected conformance is 1 - delta exactly (the conforming branch never
    // exceeds the bound); allow the binomial 3-sigma wiggle on 2000 trials
    const double sigma = std::sqrt(delta * (1.0 - delta) / trials);
    CHECK(static_cast<double>(within) / trials >= 1.0 - delta - 3.0 * sigma);
    CHECK(1.0 - static_cast<double>(within) / trials <= delta + 3.0 * std::sqrt(delta / trials));
}

TEST_CASE("acceptance-grade estimator guarantee and rate checks") {
    const CheckResult guarantee = check_estimator_guarantee(Exec::serial, 500);
    INFO(guarantee.detail);
    CHECK(guarantee.pass);
    const CheckResult rate = check_quadratic_rate(Exec::serial, 500);
    INFO(rate.detail);
    CHECK(rate.pass);
}

TEST_CASE("sample buffer conserves the number of oracle steps") {
    const Mdp env = make_environment(EnvKind::riverswim, 6, 2, 0);
    TransitionOracle oracle(env);
    SampleBuffer buffer(6, 2);
    buffer.begin_epoch(1);
    RngStream rng = RngStream::derive(7, 0);
    int calls = 0;
    for (int k = 0; k < 57; ++k) {
        const int s = k % 6;
        const int a = k % 2;
        const StepOutcome out = oracle.step(s, a, k, rng);
        buffer.push(s, a, out.sample);
        ++calls;
    }
    CHECK(static_cast<int>(buffer.total_size()) == calls);
    CHECK(oracle.total_issued() == calls);
    buffer.begin_epoch(2);
    CHECK(buffer.total_size() == 0);
}
