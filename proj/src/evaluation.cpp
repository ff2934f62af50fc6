#include "qucrl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qucrl/linalg.hpp"

namespace qucrl {

namespace {

void check_compatible(const Mdp& mdp, const Policy& policy) {
    if (mdp.num_states() != policy.num_states() || mdp.num_actions() != policy.num_actions())
        throw InvalidParams("policy dimensions do not match mdp");
}

// Tarjan SCC over the chain's positive-probability edges.
struct SccFinder {
    const std::vector<double>& chain;
    int S;
    double tol;
    std::vector<int> index, low, comp;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;

    SccFinder(const std::vector<double>& c, int s, double t)
        : chain(c), S(s), tol(t), index(s, -1), low(s, 0), comp(s, -1), on_stack(s, false) {}

    void strongconnect(int v) {
        // iterative Tarjan to avoid recursion depth issues
        struct Frame {
            int v;
            int next;
        };
        std::vector<Frame> call;
        call.push_back({v, 0});
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            bool descended = false;
            for (int w = f.next; w < S; ++w) {
                f.next = w + 1;
                if (chain[static_cast<std::size_t>(f.v) * S + w] <= tol) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[f.v] = std::min(low[f.v], index[w]);
            }
            if (descended) continue;
            if (low[f.v] == index[f.v]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if (w == f.v) break;
                }
                ++next_comp;
            }
            const int child = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[child]);
        }
    }

    void run() {
        for (int v = 0; v < S; ++v)
            if (index[v] < 0) strongconnect(v);
    }
};

}  // namespace

double GainBias::span() const {
    if (bias.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(bias.begin(), bias.end());
    return *hi - *lo;
}

std::vector<double> induced_chain(const Mdp& mdp, const Policy& policy) {
    check_compatible(mdp, policy);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    std::vector<double> chain(static_cast<std::size_t>(S) * S, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double pa = policy.prob(s, a);
            if (pa == 0.0) continue;
            for (int s2 = 0; s2 < S; ++s2) chain[static_cast<std::size_t>(s) * S + s2] += pa * mdp.p(s, a, s2);
        }
    return chain;
}

int count_recurrent_classes(const std::vector<double>& chain, int S, double edge_tol) {
    SccFinder scc(chain, S, edge_tol);
    scc.run();
    // a component is recurrent iff it has no edge leaving it
    std::vector<bool> leaves(scc.next_comp, false);
    for (int s = 0; s < S; ++s)
        for (int s2 = 0; s2 < S; ++s2)
            if (chain[static_cast<std::size_t>(s) * S + s2] > edge_tol && scc.comp[s] != scc.comp[s2])
                leaves[scc.comp[s]] = true;
    int classes = 0;
    for (bool l : leaves)
        if (!l) ++classes;
    return classes;
}

std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& policy) {
    check_compatible(mdp, policy);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const std::vector<double> chain = induced_chain(mdp, policy);

    // Stack (I - P^T) with a normalization row and solve least squares; for
    // a unichain model the system has full column rank and zero residual.
    Matrix m(S + 1, S);
    for (int i = 0; i < S; ++i) {
        for (int j = 0; j < S; ++j) m.at(i, j) = (i == j ? 1.0 : 0.0) - chain[static_cast<std::size_t>(j) * S + i];
    }
    for (int j = 0; j < S; ++j) m.at(S, j) = 1.0;
    Vector b(S + 1, 0.0);
    b[S] = 1.0;

    const LeastSquaresResult res = least_squares_qr(std::move(m), std::move(b));
    const bool bad = res.min_r_diag < 1e-10 || res.residual > 1e-9;
    double min_x = 0.0;
    for (double v : res.x) min_x = std::min(min_x, v);
    if (bad || min_x < -1e-9) {
        if (count_recurrent_classes(chain, S) != 1)
            throw NonErgodicChain("induced chain has more than one recurrent class");
        throw SingularSystem("stationary distribution solve failed");
    }

    std::vector<double> rho(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        const double ps = std::max(res.x[s], 0.0);
        for (int a = 0; a < A; ++a) rho[static_cast<std::size_t>(s) * A + a] = ps * policy.prob(s, a);
    }
    return rho;
}

GainBias gain_bias(const Mdp& mdp, const Policy& policy) {
    check_compatible(mdp, policy);
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const std::vector<double> chain = induced_chain(mdp, policy);

    std::vector<double> r_pi(S, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) r_pi[s] += policy.prob(s, a) * mdp.reward(s, a);

    // Unknowns y = (gain, bias_0..bias_{S-1}); rows are the evaluation
    // equations plus the normalization bias_0 = 0.
    Matrix m(S + 1, S + 1);
    Vector b(S + 1, 0.0);
    for (int s = 0; s < S; ++s) {
        m.at(s, 0) = 1.0;
        for (int s2 = 0; s2 < S; ++s2)
            m.at(s, 1 + s2) = (s == s2 ? 1.0 : 0.0) - chain[static_cast<std::size_t>(s) * S + s2];
        b[s] = r_pi[s];
    }
    m.at(S, 1) = 1.0;

    auto sol = lu_solve(std::move(m), std::move(b));
    if (!sol) {
        if (count_recurrent_classes(chain, S) != 1)
            throw NonErgodicChain("induced chain has more than one recurrent class");
        throw SingularSystem("gain/bias linear solve is singular");
    }

    GainBias gb;
    gb.gain = (*sol)[0];
    gb.bias.assign(sol->begin() + 1, sol->end());

    // evaluation residual check (contract: 1e-9)
    for (int s = 0; s < S; ++s) {
        double acc = r_pi[s] - gb.gain - gb.bias[s];
        for (int s2 = 0; s2 < S; ++s2) acc += chain[static_cast<std::size_t>(s) * S + s2] * gb.bias[s2];
        if (std::fabs(acc) > 1e-9) throw SingularSystem("gain/bias residual exceeds tolerance");
    }
    return gb;
}

std::vector<double> bellman_error(const Mdp& true_mdp, const std::vector<double>& optimistic_P,
                                  const Policy& policy) {
    const int S = true_mdp.num_states();
    const int A = true_mdp.num_actions();
    if (optimistic_P.size() != static_cast<std::size_t>(S) * A * S)
        throw InvalidParams("bellman_error: optimistic tensor has wrong size");

    const Mdp optimistic(S, A, optimistic_P, true_mdp.rewards());
    const GainBias gb = gain_bias(optimistic, policy);

    std::vector<double> errors(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                acc += (optimistic.p(s, a, s2) - true_mdp.p(s, a, s2)) * gb.bias[s2];
            errors[static_cast<std::size_t>(s) * A + a] = acc;
        }
    return errors;
}

MixingDiagnostics mixing_diagnostics(const Mdp& mdp, long hitting_table_cap) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();

    double policies = 1.0;
    for (int s = 0; s < S; ++s) {
        policies *= A;
        if (policies > 1e6) throw TooLargeToEnumerate("A^S exceeds enumeration guard of 1e6");
    }
    const long num_policies = static_cast<long>(policies);

    MixingDiagnostics diag;
    diag.num_policies = num_policies;
    const bool keep_tables = num_policies <= hitting_table_cap;

    // min over policies per (s,s') pair, for the diameter
    std::vector<double> best_hit(static_cast<std::size_t>(S) * S, std::numeric_limits<double>::infinity());

    std::vector<int> actions(S, 0);
    for (long k = 0; k < num_policies; ++k) {
        {
            long rem = k;
            for (int s = 0; s < S; ++s) {
                actions[s] = static_cast<int>(rem % A);
                rem /= A;
            }
        }
        std::vector<double> chain(static_cast<std::size_t>(S) * S);
        for (int s = 0; s < S; ++s)
            for (int s2 = 0; s2 < S; ++s2) chain[static_cast<std::size_t>(s) * S + s2] = mdp.p(s, actions[s], s2);

        // reachability screen: every target must be reachable from every state
        bool reachable_everywhere = true;
        std::vector<std::vector<int>> preds(S);
        for (int s = 0; s < S && reachable_everywhere; ++s) {
            for (int s2 = 0; s2 < S; ++s2)
                if (chain[static_cast<std::size_t>(s) * S + s2] > 1e-13) preds[s2].push_back(s);
        }
        std::vector<double> table(keep_tables ? static_cast<std::size_t>(S) * S : 0, 0.0);
        // staged per-policy minima; merged into best_hit only if the policy
        // turns out to mix (a skipped policy must not influence the diameter)
        std::vector<double> policy_hit(static_cast<std::size_t>(S) * S,
                                       std::numeric_limits<double>::infinity());
        double policy_max_hit = 0.0;
        bool skipped = false;

        for (int target = 0; target < S && !skipped; ++target) {
            // backward reachability from the target
            std::vector<bool> can_reach(S, false);
            can_reach[target] = true;
            std::vector<int> queue{target};
            while (!queue.empty()) {
                const int v = queue.back();
                queue.pop_back();
                for (int u : preds[v])
                    if (!can_reach[u]) {
                        can_reach[u] = true;
                        queue.push_back(u);
                    }
            }
            for (int s = 0; s < S; ++s)
                if (!can_reach[s]) skipped = true;
            if (skipped) break;
            if (S == 1) continue;

            // first-passage system over non-target states:
            // h(s) = 1 + sum_{u != target} P(u|s) h(u)
            Matrix m(S - 1, S - 1);
            Vector rhs(S - 1, 1.0);
            auto reduced = [&](int s) { return s < target ? s : s - 1; };
            for (int s = 0; s < S; ++s) {
                if (s == target) continue;
                const int i = reduced(s);
                for (int u = 0; u < S; ++u) {
                    if (u == target) continue;
                    m.at(i, reduced(u)) =
                        (s == u ? 1.0 : 0.0) - chain[static_cast<std::size_t>(s) * S + u];
                }
            }
            auto sol = lu_solve(std::move(m), std::move(rhs));
            if (!sol) {
                skipped = true;
                break;
            }
            for (int s = 0; s < S; ++s) {
                const double h = (s == target) ? 0.0 : (*sol)[reduced(s)];
                if (!(h >= -1e-9) || !std::isfinite(h)) {
                    skipped = true;
                    break;
                }
                if (keep_tables) table[static_cast<std::size_t>(s) * S + target] = std::max(h, 0.0);
                policy_max_hit = std::max(policy_max_hit, h);
                policy_hit[static_cast<std::size_t>(s) * S + target] = std::max(h, 0.0);
            }
        }

        if (skipped) {
            ++diag.num_skipped_policies;
            diag.t_mix_is_lower_bound = true;
            if (keep_tables) diag.hitting_times.emplace_back();  // placeholder keeps indices aligned
            continue;
        }
        diag.t_mix = std::max(diag.t_mix, policy_max_hit);
        for (std::size_t i = 0; i < policy_hit.size(); ++i) best_hit[i] = std::min(best_hit[i], policy_hit[i]);
        if (keep_tables) diag.hitting_times.push_back(std::move(table));
    }

    for (int s = 0; s < S; ++s)
        for (int s2 = 0; s2 < S; ++s2) {
            if (s == s2) continue;
            const double h = best_hit[static_cast<std::size_t>(s) * S + s2];
            if (std::isfinite(h)) diag.diameter = std::max(diag.diameter, h);
        }
    return diag;
}

}  // namespace qucrl
