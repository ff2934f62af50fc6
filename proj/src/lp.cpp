#include "qucrl/lp.hpp"

#include "qucrl/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace qucrl {

void LpProblem::add_row(std::vector<double> coeffs, RowSense sense, double rhs) {
    if (static_cast<int>(coeffs.size()) != num_vars) throw InvalidParams("LpProblem: row width mismatch");
    rows.push_back(Row{std::move(coeffs), sense, rhs});
}

namespace {

// Tableau layout: columns [structural | slack/surplus | artificial | rhs],
// one row per constraint plus the objective row at the bottom.
class SimplexTableau {
  public:
    SimplexTableau(const LpProblem& p, const LpOptions& opt) : p_(p), opt_(opt) {
        m_ = static_cast<int>(p.rows.size());
        n_ = p.num_vars;

        // count auxiliary columns
        num_slack_ = 0;
        num_art_ = 0;
        for (const auto& row : p.rows) {
            if (row.sense != RowSense::eq) ++num_slack_;
            // ge rows (after rhs normalization) and eq rows need artificials;
            // le rows with nonnegative rhs start feasible on the slack.
        }

        // rhs-normalized senses
        senses_.resize(m_);
        rhs_.resize(m_);
        coeffs_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const auto& row = p.rows[i];
            double flip = row.rhs < 0.0 ? -1.0 : 1.0;
            rhs_[i] = row.rhs * flip;
            RowSense s = row.sense;
            if (flip < 0.0) {
                if (s == RowSense::le) s = RowSense::ge;
                else if (s == RowSense::ge) s = RowSense::le;
            }
            senses_[i] = s;
            for (int j = 0; j < n_; ++j) coeffs_[static_cast<std::size_t>(i) * n_ + j] = row.coeffs[j] * flip;
            if (s == RowSense::eq || s == RowSense::ge) ++num_art_;
        }

        cols_ = n_ + num_slack_ + num_art_ + 1;
        t_.assign(static_cast<std::size_t>(m_ + 1) * cols_, 0.0);
        basis_.assign(m_, -1);
        aux_row_.assign(num_slack_ + num_art_, -1);
        aux_sign_.assign(num_slack_ + num_art_, 1.0);

        int slack_at = n_;
        int art_at = n_ + num_slack_;
        art_begin_ = art_at;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) at(i, j) = coeffs_[static_cast<std::size_t>(i) * n_ + j];
            // deterministic micro-perturbation: these programs are massively
            // degenerate (most right-hand sides are zero) and floating-point
            // noise defeats Bland's rule; distinct ratios keep the pivot
            // path finite while staying far inside the feasibility tolerance
            const std::uint64_t mix = (static_cast<std::uint64_t>(i) + 1) * 0x9e3779b97f4a7c15ULL;
            at(i, cols_ - 1) = rhs_[i] + 1e-11 * (1.0 + static_cast<double>(mix % 1024) / 1024.0);
            switch (senses_[i]) {
                case RowSense::le:
                    at(i, slack_at) = 1.0;
                    aux_row_[slack_at - n_] = i;
                    basis_[i] = slack_at;
                    ++slack_at;
                    break;
                case RowSense::ge:
                    at(i, slack_at) = -1.0;
                    aux_row_[slack_at - n_] = i;
                    aux_sign_[slack_at - n_] = -1.0;
                    ++slack_at;
                    at(i, art_at) = 1.0;
                    aux_row_[art_at - n_] = i;
                    basis_[i] = art_at;
                    ++art_at;
                    break;
                case RowSense::eq:
                    at(i, art_at) = 1.0;
                    aux_row_[art_at - n_] = i;
                    basis_[i] = art_at;
                    ++art_at;
                    break;
            }
        }
        max_iter_ = opt.max_iterations > 0 ? opt.max_iterations
                                           : 200L * (m_ + cols_) + 5000L;
    }

    LpSolution solve() {
        if (num_art_ > 0) {
            // Phase 1: minimize the sum of artificials.
            for (int j = 0; j < cols_; ++j) at(m_, j) = 0.0;
            for (int j = art_begin_; j < art_begin_ + num_art_; ++j) at(m_, j) = 1.0;
            price_out();
            iterate(/*restrict_artificials=*/false);
            if (at(m_, cols_ - 1) < -opt_.feasibility_tol * 10.0 - 1e-12)
                throw LpInfeasible("phase 1 ended with positive artificial sum");
            purge_artificials();
        }

        // Phase 2: maximize the original objective (stored negated: we
        // minimize -c'x with the classic "row m holds z - c" convention).
        for (int j = 0; j < cols_; ++j) at(m_, j) = 0.0;
        for (int j = 0; j < n_; ++j) at(m_, j) = -p_.objective[j];
        price_out();
        iterate(/*restrict_artificials=*/true);
        refactorize();

        LpSolution sol;
        sol.x.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= 0 && basis_[i] < n_) sol.x[basis_[i]] = std::max(at(i, cols_ - 1), 0.0);
        sol.value = 0.0;
        for (int j = 0; j < n_; ++j) sol.value += p_.objective[j] * sol.x[j];
        sol.iterations = iterations_;
        verify_feasible(sol.x);
        return sol;
    }

  private:
    double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * cols_ + j]; }

    // Express the objective row in terms of nonbasic variables.
    void price_out() {
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[i];
            const double f = at(m_, b);
            if (f == 0.0) continue;
            double* obj = &t_[static_cast<std::size_t>(m_) * cols_];
            const double* row = &t_[static_cast<std::size_t>(i) * cols_];
            for (int j = 0; j < cols_; ++j) obj[j] -= f * row[j];
        }
    }

    void pivot(int pr, int pc) {
        double* prow = &t_[static_cast<std::size_t>(pr) * cols_];
        const double inv = 1.0 / prow[pc];
        for (int j = 0; j < cols_; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == pr) continue;
            double* row = &t_[static_cast<std::size_t>(i) * cols_];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (int j = 0; j < cols_; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
        ++iterations_;
    }

    void iterate(bool restrict_artificials) {
        const int limit = restrict_artificials ? art_begin_ : cols_ - 1;
        long stall = 0;
        double last_obj = at(m_, cols_ - 1);
        bool bland = opt_.bland_from_start;
        for (long it = 0; it < max_iter_; ++it) {
            int pc = -1;
            if (!bland) {
                double best = -opt_.pivot_tol;
                for (int j = 0; j < limit; ++j) {
                    const double v = at(m_, j);
                    if (v < best) {
                        best = v;
                        pc = j;
                    }
                }
            } else {
                for (int j = 0; j < limit; ++j) {
                    if (at(m_, j) < -opt_.pivot_tol) {
                        pc = j;
                        break;
                    }
                }
            }
            if (pc < 0) return;  // optimal

            // two-pass ratio test: find the tightest ratio with a small
            // feasibility relaxation, then take the numerically largest
            // pivot among the rows inside it (tiny pivots wreck the tableau)
            double theta = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, pc);
                if (a <= opt_.pivot_tol) continue;
                theta = std::min(theta, (at(i, cols_ - 1) + 1e-9) / a);
            }
            if (!std::isfinite(theta))
                throw LpNumericalFailure("unbounded pivot column (feasible set should be bounded)");
            int pr = -1;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, pc);
                if (a <= opt_.pivot_tol) continue;
                if (at(i, cols_ - 1) / a > theta) continue;
                if (pr < 0) {
                    pr = i;
                    continue;
                }
                // Bland mode keeps the lowest basis index for anti-cycling
                if (bland ? basis_[i] < basis_[pr] : a > at(pr, pc)) pr = i;
            }
            if (pr < 0) throw LpNumericalFailure("ratio test found no pivot row");
            pivot(pr, pc);

            const double obj = at(m_, cols_ - 1);
            if (std::fabs(obj - last_obj) < 1e-13) {
                if (++stall > 64) bland = true;  // Bland's rule from here on, sticky
            } else {
                stall = 0;
            }
            last_obj = obj;
        }
        throw LpNumericalFailure("simplex iteration limit reached");
    }

    // Re-solves the final basis against the original, unperturbed system so
    // the returned vertex carries neither the anti-degeneracy perturbation
    // nor roundoff accumulated over hundreds of pivots.
    void refactorize() {
        Matrix basis_matrix(m_, m_);
        for (int k = 0; k < m_; ++k) {
            const int j = basis_[k];
            if (j < n_) {
                for (int i = 0; i < m_; ++i)
                    basis_matrix.at(i, k) = coeffs_[static_cast<std::size_t>(i) * n_ + j];
            } else {
                basis_matrix.at(aux_row_[j - n_], k) = aux_sign_[j - n_];
            }
        }
        const Matrix saved = basis_matrix;
        const auto values = lu_solve(std::move(basis_matrix), rhs_);
        if (!values) return;  // singular: keep the tableau values
        double residual = 0.0;
        for (int i = 0; i < m_; ++i) {
            double acc = -rhs_[i];
            for (int k = 0; k < m_; ++k) acc += saved.at(i, k) * (*values)[k];
            residual = std::max(residual, std::fabs(acc));
        }
        if (residual > opt_.feasibility_tol * 0.1) return;  // ill-conditioned refit
        for (int k = 0; k < m_; ++k) {
            if ((*values)[k] < -opt_.feasibility_tol) return;  // reject inconsistent refit
        }
        for (int k = 0; k < m_; ++k) at(k, cols_ - 1) = (*values)[k];
    }

    // After phase 1, pivot remaining artificials out of the basis or drop
    // their (redundant) rows by zeroing; then forbid artificial columns.
    void purge_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) continue;
            int pc = -1;
            for (int j = 0; j < art_begin_; ++j) {
                if (std::fabs(at(i, j)) > opt_.pivot_tol) {
                    pc = j;
                    break;
                }
            }
            if (pc >= 0) {
                pivot(i, pc);
            } else {
                // redundant row: every structural coefficient eliminated
                for (int j = 0; j < cols_; ++j) at(i, j) = 0.0;
            }
        }
    }

    void verify_feasible(const std::vector<double>& x) const {
        for (double v : x)
            if (v < -opt_.feasibility_tol)
                throw LpNumericalFailure("negative variable in solution: " + std::to_string(v));
        for (int i = 0; i < m_; ++i) {
            const auto& row = p_.rows[i];
            double lhs = 0.0;
            for (int j = 0; j < n_; ++j) lhs += row.coeffs[j] * x[j];
            const double gap = lhs - row.rhs;
            const double tol = opt_.feasibility_tol * std::max(1.0, std::fabs(row.rhs));
            const auto fail = [&](const char* what) {
                throw LpNumericalFailure(std::string(what) + " violated in solution: row " +
                                         std::to_string(i) + " gap " + std::to_string(gap));
            };
            switch (row.sense) {
                case RowSense::le:
                    if (gap > tol) fail("LE row");
                    break;
                case RowSense::ge:
                    if (gap < -tol) fail("GE row");
                    break;
                case RowSense::eq:
                    if (std::fabs(gap) > tol) fail("EQ row");
                    break;
            }
        }
    }

    const LpProblem& p_;
    LpOptions opt_;
    int m_ = 0, n_ = 0, cols_ = 0;
    int num_slack_ = 0, num_art_ = 0, art_begin_ = 0;
    std::vector<double> t_;
    std::vector<double> coeffs_;
    std::vector<double> rhs_;
    std::vector<RowSense> senses_;
    std::vector<int> basis_;
    std::vector<int> aux_row_;     // constraint row of each slack/artificial column
    std::vector<double> aux_sign_; // +1 slack, -1 surplus
    long iterations_ = 0;
    long max_iter_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
    if (problem.num_vars <= 0) throw InvalidParams("solve_lp: no variables");
    if (static_cast<int>(problem.objective.size()) != problem.num_vars)
        throw InvalidParams("solve_lp: objective size mismatch");
    try {
        SimplexTableau tableau(problem, options);
        return tableau.solve();
    } catch (const LpNumericalFailure&) {
        if (options.bland_from_start) throw;
        // retry once on a fresh tableau along the slower but steadier
        // lowest-index pivot path
        LpOptions retry = options;
        retry.bland_from_start = true;
        SimplexTableau tableau(problem, retry);
        return tableau.solve();
    }
}

void write_lp_format(const LpProblem& problem, std::ostream& out) {
    auto name = [&](int j) -> std::string {
        if (j < static_cast<int>(problem.var_names.size()) && !problem.var_names[j].empty())
            return problem.var_names[j];
        return "x" + std::to_string(j);
    };
    auto term = [&](double v, int j, bool first) {
        std::ostringstream ss;
        if (first)
            ss << v << " " << name(j);
        else
            ss << (v < 0 ? " - " : " + ") << std::fabs(v) << " " << name(j);
        return ss.str();
    };

    out << "Maximize\n obj:";
    bool first = true;
    for (int j = 0; j < problem.num_vars; ++j) {
        if (problem.objective[j] == 0.0) continue;
        out << " " << term(problem.objective[j], j, first);
        first = false;
    }
    if (first) out << " 0 " << name(0);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < problem.rows.size(); ++i) {
        const auto& row = problem.rows[i];
        out << " c" << i << ":";
        first = true;
        for (int j = 0; j < problem.num_vars; ++j) {
            if (row.coeffs[j] == 0.0) continue;
            out << " " << term(row.coeffs[j], j, first);
            first = false;
        }
        if (first) out << " 0 " << name(0);
        switch (row.sense) {
            case RowSense::le: out << " <= "; break;
            case RowSense::ge: out << " >= "; break;
            case RowSense::eq: out << " = "; break;
        }
        out << row.rhs << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < problem.num_vars; ++j) out << " 0 <= " << name(j) << "\n";
    out << "End\n";
}

}  // namespace qucrl
