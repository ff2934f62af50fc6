#include "qucrl/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "qucrl/errors.hpp"

namespace qucrl {

std::optional<Vector> lu_solve(Matrix a, Vector b, double tol) {
    const int n = a.rows();
    if (n != a.cols() || static_cast<int>(b.size()) != n)
        throw InvalidParams("lu_solve: dimension mismatch");

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a.at(i, j)));
    if (scale == 0.0) return std::nullopt;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(a.at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < tol * scale) return std::nullopt;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / a.at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = a.at(i, k) * inv;
            if (f == 0.0) continue;
            a.at(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
            b[i] -= f * b[k];
        }
    }

    Vector x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a.at(i, j) * x[j];
        x[i] = s / a.at(i, i);
    }
    return x;
}

LeastSquaresResult least_squares_qr(Matrix a, Vector b) {
    const int m = a.rows();
    const int n = a.cols();
    if (m < n || static_cast<int>(b.size()) != m)
        throw InvalidParams("least_squares_qr: dimension mismatch");

    const Matrix a0 = a;
    const Vector b0 = b;

    // Householder reflections applied in place to a and b.
    for (int k = 0; k < n; ++k) {
        double norm = 0.0;
        for (int i = k; i < m; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        if (a.at(k, k) > 0.0) norm = -norm;

        Vector v(m - k);
        for (int i = k; i < m; ++i) v[i - k] = a.at(i, k);
        v[0] -= norm;
        double vnorm2 = 0.0;
        for (double vi : v) vnorm2 += vi * vi;
        if (vnorm2 == 0.0) continue;

        for (int j = k; j < n; ++j) {
            double dot = 0.0;
            for (int i = k; i < m; ++i) dot += v[i - k] * a.at(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (int i = k; i < m; ++i) a.at(i, j) -= f * v[i - k];
        }
        double dot = 0.0;
        for (int i = k; i < m; ++i) dot += v[i - k] * b[i];
        const double f = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) b[i] -= f * v[i - k];
    }

    LeastSquaresResult res;
    res.min_r_diag = std::fabs(a.at(0, 0));
    for (int k = 1; k < n; ++k) res.min_r_diag = std::min(res.min_r_diag, std::fabs(a.at(k, k)));

    res.x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a.at(i, j) * res.x[j];
        res.x[i] = (a.at(i, i) != 0.0) ? s / a.at(i, i) : 0.0;
    }

    for (int i = 0; i < m; ++i) {
        double s = -b0[i];
        for (int j = 0; j < n; ++j) s += a0.at(i, j) * res.x[j];
        res.residual = std::max(res.residual, std::fabs(s));
    }
    return res;
}

}  // namespace qucrl
