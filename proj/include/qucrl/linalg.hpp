#pragma once

#include <optional>
#include <vector>

namespace qucrl {

using Vector = std::vector<double>;

// Small dense row-major matrix. Everything in this project is desk scale
// (S at most a few dozen), so no attempt is made at blocking or sparsity.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// Solves Ax = b by LU with partial pivoting. Returns nullopt when a pivot
// falls below tol relative to the matrix scale (singular system).
std::optional<Vector> lu_solve(Matrix a, Vector b, double tol = 1e-12);

struct LeastSquaresResult {
    Vector x;
    double min_r_diag = 0.0;  // smallest |R_ii| from the QR factorization
    double residual = 0.0;    // max-norm of Ax - b
};

// Householder QR least squares for m >= n systems. min_r_diag near zero
// signals rank deficiency.
LeastSquaresResult least_squares_qr(Matrix a, Vector b);

}  // namespace qucrl
