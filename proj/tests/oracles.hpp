// Test-only oracles: independent reference computations the library results
// are checked against. Deliberately self-contained (own Gaussian
// elimination, own iteration loops) so they share no code with the
// implementation paths under test.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// dense Ax = b, partial pivoting; local to the oracles on purpose
inline std::vector<double> gauss(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
        if (std::fabs(a[piv][k]) < 1e-13) throw std::runtime_error("oracle gauss: singular");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// stationary state distribution of a row-stochastic chain by power iteration
inline std::vector<double> power_iteration_stationary(const std::vector<double>& chain, int S,
                                                      double tol = 1e-12, long max_iter = 2000000) {
    std::vector<double> x(S, 1.0 / S), y(S, 0.0);
    for (long it = 0; it < max_iter; ++it) {
        for (int j = 0; j < S; ++j) {
            double acc = 0.0;
            for (int i = 0; i < S; ++i) acc += x[i] * chain[static_cast<std::size_t>(i) * S + j];
            y[j] = acc;
        }
        double diff = 0.0, sum = 0.0;
        for (int j = 0; j < S; ++j) {
            diff = std::max(diff, std::fabs(y[j] - x[j]));
            sum += y[j];
        }
        for (int j = 0; j < S; ++j) x[j] = y[j] / sum;
        if (diff < tol) return x;
    }
    throw std::runtime_error("oracle power iteration did not converge");
}

// discounted policy evaluation: V solving V = r_pi + gamma P_pi V
inline std::vector<double> discounted_policy_value(const std::vector<double>& chain,
                                                   const std::vector<double>& r_pi, int S, double gamma) {
    std::vector<std::vector<double>> a(S, std::vector<double>(S, 0.0));
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < S; ++j)
            a[i][j] = (i == j ? 1.0 : 0.0) - gamma * chain[static_cast<std::size_t>(i) * S + j];
    return gauss(std::move(a), r_pi);
}

// optimal average reward by relative value iteration, stopping at the given
// span residual
inline double relative_value_iteration(int S, int A, const std::vector<double>& P,
                                       const std::vector<double>& r, double span_tol = 1e-10,
                                       long max_iter = 2000000) {
    std::vector<double> v(S, 0.0), w(S, 0.0);
    for (long it = 0; it < max_iter; ++it) {
        for (int s = 0; s < S; ++s) {
            double best = -1e300;
            for (int a = 0; a < A; ++a) {
                double q = r[static_cast<std::size_t>(s) * A + a];
                for (int s2 = 0; s2 < S; ++s2)
                    q += P[(static_cast<std::size_t>(s) * A + a) * S + s2] * v[s2];
                best = std::max(best, q);
            }
            w[s] = best;
        }
        double lo = 1e300, hi = -1e300;
        for (int s = 0; s < S; ++s) {
            const double d = w[s] - v[s];
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const double ref = w[0];
        for (int s = 0; s < S; ++s) v[s] = w[s] - ref;
        if (hi - lo < span_tol) return 0.5 * (hi + lo);
    }
    throw std::runtime_error("oracle RVI did not converge");
}

// Monte-Carlo expected hitting time under a deterministic policy
struct McEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

inline McEstimate mc_hitting_time(const std::vector<double>& P, int S, int A,
                                  const std::vector<int>& policy, int from, int to, long rollouts,
                                  std::uint64_t seed, long cap = 10000000) {
    std::mt19937_64 engine(seed);
    auto unif = [&]() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
    double sum = 0.0, sumsq = 0.0;
    for (long k = 0; k < rollouts; ++k) {
        int s = from;
        long steps = 0;
        while (s != to) {
            const double u = unif();
            double acc = 0.0;
            const int a = policy[s];
            int next = S - 1;
            for (int s2 = 0; s2 < S; ++s2) {
                acc += P[(static_cast<std::size_t>(s) * A + a) * S + s2];
                if (u < acc) {
                    next = s2;
                    break;
                }
            }
            s = next;
            if (++steps > cap) throw std::runtime_error("oracle MC rollout exceeded cap");
        }
        sum += static_cast<double>(steps);
        sumsq += static_cast<double>(steps) * static_cast<double>(steps);
    }
    McEstimate est;
    est.mean = sum / static_cast<double>(rollouts);
    const double var = (sumsq - sum * sum / static_cast<double>(rollouts)) / (static_cast<double>(rollouts) - 1.0);
    est.stderr_mean = std::sqrt(std::max(var, 0.0) / static_cast<double>(rollouts));
    return est;
}

}  // namespace oracles
