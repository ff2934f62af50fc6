#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qucrl/errors.hpp"

namespace qucrl {

enum class RowSense { le, ge, eq };

// Dense linear program: maximize c'x subject to row constraints and x >= 0.
struct LpProblem {
    int num_vars = 0;
    std::vector<double> objective;

    struct Row {
        std::vector<double> coeffs;
        RowSense sense = RowSense::le;
        double rhs = 0.0;
    };
    std::vector<Row> rows;

    std::vector<std::string> var_names;  // optional, used by the text dump

    void add_row(std::vector<double> coeffs, RowSense sense, double rhs);
};

struct LpSolution {
    double value = 0.0;
    std::vector<double> x;
    long iterations = 0;
};

struct LpOptions {
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-8;
    long max_iterations = 0;      // 0 = automatic from problem size
    bool bland_from_start = false;  // used by the clean-retry path
};

// Two-phase dense simplex, Dantzig pricing with lowest-index tie-breaks and
// a switch to Bland's rule after a stall (anti-cycling). Throws LpInfeasible
// when phase 1 cannot reach feasibility and LpNumericalFailure when the
// returned point fails the feasibility re-check.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

// Plain-text dump in the conventional LP interchange format (objective,
// constraint rows, bounds) for cross-checking against external solvers.
void write_lp_format(const LpProblem& problem, std::ostream& out);

}  // namespace qucrl
