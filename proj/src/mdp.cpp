#include "qucrl/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qucrl/rng.hpp"

namespace qucrl {

namespace {

constexpr double kStochasticTol = 1e-12;

void validate_mdp(int S, int A, const std::vector<double>& P, const std::vector<double>& r) {
    if (S < 1 || A < 1) throw InvalidParams("Mdp: S and A must be positive");
    if (P.size() != static_cast<std::size_t>(S) * A * S) throw InvalidParams("Mdp: transition tensor has wrong size");
    if (r.size() != static_cast<std::size_t>(S) * A) throw InvalidParams("Mdp: reward table has wrong size");
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
                const double v = P[(static_cast<std::size_t>(s) * A + a) * S + s2];
                if (v < 0.0) throw InvalidParams("Mdp: negative transition probability");
                sum += v;
            }
            if (std::fabs(sum - 1.0) > kStochasticTol)
                throw InvalidParams("Mdp: transition row does not sum to 1");
            const double rv = r[static_cast<std::size_t>(s) * A + a];
            if (rv < 0.0 || rv > 1.0) throw InvalidParams("Mdp: reward outside [0,1]");
        }
    }
}

void smooth_rows(int S, std::vector<double>& P, double eps) {
    if (eps == 0.0) return;
    const double u = eps / S;
    for (std::size_t row = 0; row < P.size() / S; ++row) {
        double sum = 0.0;
        for (int s2 = 0; s2 < S; ++s2) {
            double& v = P[row * S + s2];
            v = (1.0 - eps) * v + u;
            sum += v;
        }
        // renormalize away accumulated rounding so the 1e-12 invariant holds
        for (int s2 = 0; s2 < S; ++s2) P[row * S + s2] /= sum;
    }
}

Mdp make_riverswim(int S, std::uint64_t /*seed*/, double eps) {
    if (S < 2) throw InvalidParams("riverswim needs S >= 2");
    const int A = 2;  // 0 = left, 1 = right
    std::vector<double> P(static_cast<std::size_t>(S) * A * S, 0.0);
    std::vector<double> r(static_cast<std::size_t>(S) * A, 0.0);
    auto at = [&](int s, int a, int s2) -> double& {
        return P[(static_cast<std::size_t>(s) * A + a) * S + s2];
    };
    for (int s = 0; s < S; ++s) {
        at(s, 0, std::max(s - 1, 0)) = 1.0;  // left: deterministic downstream
        if (s == 0) {
            at(s, 1, 0) = 0.7;
            at(s, 1, 1) = 0.3;
        } else if (s == S - 1) {
            at(s, 1, s - 1) = 0.4;
            at(s, 1, s) = 0.6;
        } else {
            at(s, 1, s - 1) = 0.1;
            at(s, 1, s) = 0.6;
            at(s, 1, s + 1) = 0.3;
        }
    }
    r[0 * A + 0] = 0.005;            // small reward for loitering downstream
    r[(S - 1) * A + 1] = 1.0;        // large reward for swimming upstream
    smooth_rows(S, P, eps);
    return Mdp(S, A, std::move(P), std::move(r));
}

Mdp make_random_ergodic(int S, int A, std::uint64_t seed, double eps) {
    RngStream rng = RngStream::derive(seed, 0x7261u /* "ra" */);
    std::vector<double> P(static_cast<std::size_t>(S) * A * S, 0.0);
    std::vector<double> r(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            // Dirichlet(1,...,1) row via normalized exponentials
            double sum = 0.0;
            for (int s2 = 0; s2 < S; ++s2) {
                double u = rng.uniform01();
                if (u <= 0.0) u = 0x1.0p-53;
                const double g = -std::log(u);
                P[(static_cast<std::size_t>(s) * A + a) * S + s2] = g;
                sum += g;
            }
            for (int s2 = 0; s2 < S; ++s2) P[(static_cast<std::size_t>(s) * A + a) * S + s2] /= sum;
            r[static_cast<std::size_t>(s) * A + a] = rng.uniform01();
        }
    }
    smooth_rows(S, P, eps);
    return Mdp(S, A, std::move(P), std::move(r));
}

Mdp make_two_state_cycle(int A, double eps) {
    const int S = 2;
    std::vector<double> P(static_cast<std::size_t>(S) * A * S, 0.0);
    std::vector<double> r(static_cast<std::size_t>(S) * A, 0.0);
    for (int a = 0; a < A; ++a) {
        P[(0 * static_cast<std::size_t>(A) + a) * S + 1] = 1.0;
        P[(1 * static_cast<std::size_t>(A) + a) * S + 0] = 1.0;
        r[0 * static_cast<std::size_t>(A) + a] = 1.0;
        r[1 * static_cast<std::size_t>(A) + a] = 0.0;
    }
    smooth_rows(S, P, eps);
    return Mdp(S, A, std::move(P), std::move(r));
}

}  // namespace

Mdp::Mdp(int num_states, int num_actions, std::vector<double> transitions, std::vector<double> rewards)
    : S_(num_states), A_(num_actions), P_(std::move(transitions)), r_(std::move(rewards)) {
    validate_mdp(S_, A_, P_, r_);
}

Policy::Policy(int num_states, int num_actions, std::vector<double> probs)
    : S_(num_states), A_(num_actions), probs_(std::move(probs)) {
    if (S_ < 1 || A_ < 1) throw InvalidParams("Policy: S and A must be positive");
    if (probs_.size() != static_cast<std::size_t>(S_) * A_) throw InvalidParams("Policy: wrong table size");
    for (int s = 0; s < S_; ++s) {
        double sum = 0.0;
        for (int a = 0; a < A_; ++a) {
            const double v = probs_[static_cast<std::size_t>(s) * A_ + a];
            if (v < 0.0) throw InvalidParams("Policy: negative probability");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kStochasticTol) throw InvalidParams("Policy: row does not sum to 1");
    }
}

Policy Policy::deterministic(int num_states, int num_actions, const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) != num_states) throw InvalidParams("Policy: one action per state required");
    std::vector<double> probs(static_cast<std::size_t>(num_states) * num_actions, 0.0);
    for (int s = 0; s < num_states; ++s) {
        const int a = actions[s];
        if (a < 0 || a >= num_actions) throw InvalidParams("Policy: action index out of range");
        probs[static_cast<std::size_t>(s) * num_actions + a] = 1.0;
    }
    return Policy(num_states, num_actions, std::move(probs));
}

Policy Policy::uniform(int num_states, int num_actions) {
    std::vector<double> probs(static_cast<std::size_t>(num_states) * num_actions, 1.0 / num_actions);
    return Policy(num_states, num_actions, std::move(probs));
}

std::string to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::riverswim: return "riverswim";
        case EnvKind::random_ergodic: return "random_ergodic";
        case EnvKind::two_state_cycle: return "two_state_cycle";
    }
    return "unknown";
}

EnvKind env_kind_from_string(const std::string& name) {
    if (name == "riverswim") return EnvKind::riverswim;
    if (name == "random_ergodic") return EnvKind::random_ergodic;
    if (name == "two_state_cycle") return EnvKind::two_state_cycle;
    throw ConfigError("unknown environment kind: " + name);
}

Mdp make_environment(EnvKind kind, int S, int A, std::uint64_t seed, double smoothing) {
    if (S < 1 || A < 1) throw InvalidParams("make_environment: S and A must be positive");
    if (smoothing < 0.0 || smoothing > 1.0) throw InvalidParams("make_environment: smoothing outside [0,1]");
    switch (kind) {
        case EnvKind::riverswim: return make_riverswim(S, seed, smoothing);
        case EnvKind::random_ergodic: return make_random_ergodic(S, A, seed, smoothing);
        case EnvKind::two_state_cycle: return make_two_state_cycle(A, smoothing);
    }
    throw InvalidParams("make_environment: unknown kind");
}

std::string mdp_to_json(const Mdp& mdp) {
    nlohmann::json j;
    j["S"] = mdp.num_states();
    j["A"] = mdp.num_actions();
    auto P = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        auto row_s = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            auto row_a = nlohmann::json::array();
            for (int s2 = 0; s2 < mdp.num_states(); ++s2) row_a.push_back(mdp.p(s, a, s2));
            row_s.push_back(std::move(row_a));
        }
        P.push_back(std::move(row_s));
    }
    j["P"] = std::move(P);
    auto r = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        auto row = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) row.push_back(mdp.reward(s, a));
        r.push_back(std::move(row));
    }
    j["r"] = std::move(r);
    return j.dump(2);
}

Mdp mdp_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("Mdp JSON parse error: ") + e.what());
    }
    try {
        const int S = j.at("S").get<int>();
        const int A = j.at("A").get<int>();
        if (S < 1 || A < 1) throw ConfigError("Mdp JSON: S and A must be positive");
        std::vector<double> P(static_cast<std::size_t>(S) * A * S);
        std::vector<double> r(static_cast<std::size_t>(S) * A);
        const auto& jp = j.at("P");
        const auto& jr = j.at("r");
        if (static_cast<int>(jp.size()) != S || static_cast<int>(jr.size()) != S)
            throw ConfigError("Mdp JSON: P/r outer dimension mismatch");
        for (int s = 0; s < S; ++s) {
            if (static_cast<int>(jp[s].size()) != A || static_cast<int>(jr[s].size()) != A)
                throw ConfigError("Mdp JSON: action dimension mismatch");
            for (int a = 0; a < A; ++a) {
                if (static_cast<int>(jp[s][a].size()) != S) throw ConfigError("Mdp JSON: row length mismatch");
                for (int s2 = 0; s2 < S; ++s2)
                    P[(static_cast<std::size_t>(s) * A + a) * S + s2] = jp[s][a][s2].get<double>();
                r[static_cast<std::size_t>(s) * A + a] = jr[s][a].get<double>();
            }
        }
        try {
            return Mdp(S, A, std::move(P), std::move(r));
        } catch (const InvalidParams& e) {
            throw ConfigError(std::string("Mdp JSON: invariant violation: ") + e.what());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("Mdp JSON: ") + e.what());
    }
}

Mdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return mdp_from_json(ss.str());
}

void save_mdp(const Mdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path);
    out << mdp_to_json(mdp) << '\n';
    if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace qucrl
