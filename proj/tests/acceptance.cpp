// Acceptance suite: one pass/fail line per criterion. The long-horizon
// regret comparison dominates the runtime; QUCRL_THREADS caps the replica
// parallelism used throughout.

#include <cstdio>
#include <iostream>
#include <vector>

#include "qucrl/verification.hpp"

using namespace qucrl;

namespace {

int criterion_index = 0;
int passed = 0;
bool all_pass = true;

void report(const CheckResult& res) {
    ++criterion_index;
    std::printf("%s  criterion %d (%s): %s\n", res.pass ? "PASS" : "FAIL", criterion_index,
                res.name.c_str(), res.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && res.pass;
    if (res.pass) ++passed;
}

}  // namespace

int main() {
    const EstimatorConfig est = acceptance_estimator_config();
    std::printf("acceptance estimator: c=%.3g, L2=%.3g, noise=%s, skip_vacuous=%s\n", est.c, est.L2,
                to_string(est.noise_mode).c_str(), est.skip_vacuous_updates ? "on" : "off");

    // 1. estimator guarantee
    report(check_estimator_guarantee(Exec::parallel, 2000));

    // 2. quadratic-rate shape
    report(check_quadratic_rate(Exec::parallel, 2000));

    // 3. gain-difference identity
    report(check_gain_difference_identity(100));

    // 4. bellman error bound and bias span
    report(check_bellman_bound_and_bias_span(100));

    // 5 and 6 share the optimism runs
    OptimismCheckParams opt_params;
    opt_params.horizon = 50000;
    opt_params.num_seeds = 5;
    opt_params.estimator = est;
    const OptimismCheckResult opt = check_optimism(opt_params, Exec::parallel);
    {
        CheckResult combined = opt.optimism;
        combined.pass = opt.optimism.pass && opt.set_failure.pass;
        combined.detail = opt.optimism.detail + "; " + opt.set_failure.detail +
                          "; bad-event budget sum 1/t_e^6 = " + std::to_string(opt.bad_event_budget);
        report(combined);
        report(opt.flow_equality);
    }

    // 7 and 8 share the separation runs
    SeparationCheckParams sep_params;
    sep_params.horizon = 200000;
    sep_params.num_seeds = 20;
    sep_params.window_lo = 20000;
    sep_params.estimator = est;
    sep_params.out_dir = "acceptance_out";
    const SeparationCheckResult sep = check_regret_separation(sep_params, Exec::parallel);
    {
        CheckResult growth;
        growth.name = "regret growth separation";
        growth.pass = sep.quantum_slope.pass && sep.classical_slope.pass && sep.separation.pass;
        growth.detail =
            sep.quantum_slope.detail + "; " + sep.classical_slope.detail + "; " + sep.separation.detail;
        report(growth);
        report(sep.epoch_bound);
    }

    // 9. determinism
    report(check_determinism("acceptance_out"));

    std::printf("%d/%d criteria passed%s\n", passed, criterion_index,
                all_pass ? "" : " (see README, \"Acceptance status\", for the growth-rate clauses)");
    return all_pass ? 0 : 1;
}
