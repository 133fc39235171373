// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace fpm::detail {

// Cholesky factorization of a small symmetric positive definite matrix with
// Jacobi equilibration. The moment matrices of weighted Taylor fits mix
// columns of order 1, h and h^2, so their raw condition number carries an
// h^-4 factor; scaling rows/columns by 1/sqrt(diag) removes that without
// changing the least-squares solution.
//
// `cond` is a cheap condition estimate of the scaled matrix: the squared
// ratio of extreme Cholesky pivots. factor() fails on non-positive pivots
// (rank-deficient stencil geometry) or when the estimate exceeds the limit.
template <int N>
struct SymFactor {
    double L[N][N] = {};
    double s[N] = {};
    double cond = 0.0;

    bool factor(const double (&A)[N][N], double cond_limit) {
        for (int k = 0; k < N; ++k) {
            if (!(A[k][k] > 0.0) || !std::isfinite(A[k][k])) return false;
            s[k] = 1.0 / std::sqrt(A[k][k]);
        }
        double dmin = 0.0, dmax = 0.0;
        for (int j = 0; j < N; ++j) {
            double d = A[j][j] * s[j] * s[j];  // == 1, kept for clarity
            for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
            if (!(d > 0.0)) return false;
            L[j][j] = std::sqrt(d);
            dmin = (j == 0) ? d : std::min(dmin, d);
            dmax = (j == 0) ? d : std::max(dmax, d);
            for (int i = j + 1; i < N; ++i) {
                double v = A[i][j] * s[i] * s[j];
                for (int k = 0; k < j; ++k) v -= L[i][k] * L[j][k];
                L[i][j] = v / L[j][j];
            }
        }
        cond = dmax / dmin;
        cond *= cond;
        return cond <= cond_limit;
    }

    void solve(const double (&b)[N], double (&x)[N]) const {
        double y[N];
        for (int i = 0; i < N; ++i) {
            double v = b[i] * s[i];
            for (int k = 0; k < i; ++k) v -= L[i][k] * y[k];
            y[i] = v / L[i][i];
        }
        for (int i = N - 1; i >= 0; --i) {
            double v = y[i];
            for (int k = i + 1; k < N; ++k) v -= L[k][i] * y[k];
            y[i] = v / L[i][i];
        }
        for (int i = 0; i < N; ++i) x[i] = y[i] * s[i];
    }
};

inline constexpr double kCondLimit = 1e12;

}  // namespace fpm::detail
