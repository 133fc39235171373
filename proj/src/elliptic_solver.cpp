// SPDX-License-Identifier: Apache-2.0
#include "fpm/elliptic_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fpm/detail/sym_solve.hpp"
#include "fpm/errors.hpp"

namespace fpm {

SparseRow assemble_row(const ParticleCloud& cloud, const NeighborTable& table,
                       int i, const RowSpec& spec) {
    const auto& ps = cloud.particles();

    if (spec.kind == RowSpec::Kind::Dirichlet) {
        SparseRow row;
        row.rhs = spec.bc_value;
        return row;
    }

    const int m = table.count(i);
    if (m < 5)
        throw StencilError(ps[i].id,
                           "particle " + std::to_string(ps[i].id) +
                               ": elliptic row needs at least 5 neighbors, has " +
                               std::to_string(m));

    // The fit minimizes the weighted Taylor residual subject to the PDE
    // (interior) or the boundary condition (Neumann) holding at the particle:
    //   c . a = fc,  c = (0, B1, B2, C, 0, C)  or  (0, nx, ny, 0, 0, 0).
    // The constraint coefficients (k, density gradients) can exceed the
    // Taylor moment scales by many orders of magnitude, which makes the
    // augmented normal equations numerically singular even though the
    // constrained problem itself is benign. Eliminating the constraint
    // exactly (null-space parametrization a = a_p + Z y, Z an orthonormal
    // basis of the plane c.a = 0) keeps the reduced system as well
    // conditioned as the plain moment matrix.
    const bool neumann = spec.kind == RowSpec::Kind::Neumann;
    double c[6];
    double fc;
    if (neumann) {
        const Vec2 n = ps[i].wall_normal;
        c[0] = 0.0, c[1] = n.x, c[2] = n.y, c[3] = 0.0, c[4] = 0.0, c[5] = 0.0;
        fc = spec.bc_value;
    } else {
        c[0] = 0.0, c[1] = spec.B.x, c[2] = spec.B.y, c[3] = spec.C, c[4] = 0.0,
        c[5] = spec.C;
        fc = spec.f;
    }
    double cn2 = 0.0;
    for (double v : c) cn2 += v * v;
    if (!(cn2 > 0.0) || !std::isfinite(cn2))
        throw StencilError(ps[i].id, "particle " + std::to_string(ps[i].id) +
                                         ": elliptic row with zero constraint");

    // Moment matrix of the 6-term fit, neighbor rows only.
    double A[6][6] = {};
    double m6[6];
    for (int k = table.begin(i); k < table.end(i); ++k) {
        const double dx = table.dx[k], dy = table.dy[k];
        m6[0] = 1.0;
        m6[1] = dx;
        m6[2] = dy;
        m6[3] = 0.5 * dx * dx;
        m6[4] = dx * dy;
        m6[5] = 0.5 * dy * dy;
        const double wk = table.w[k];
        for (int r = 0; r < 6; ++r)
            for (int s = r; s < 6; ++s) A[r][s] += wk * m6[r] * m6[s];
    }
    for (int r = 0; r < 6; ++r)
        for (int s = 0; s < r; ++s) A[r][s] = A[s][r];

    // Householder basis of the constraint null space: reflect c onto the
    // axis of its largest component, the remaining five reflector columns
    // span {a : c.a = 0}.
    const double cn = std::sqrt(cn2);
    double chat[6];
    int kmax = 0;
    for (int r = 0; r < 6; ++r) {
        chat[r] = c[r] / cn;
        if (std::abs(chat[r]) > std::abs(chat[kmax])) kmax = r;
    }
    const double sgn = chat[kmax] >= 0.0 ? 1.0 : -1.0;
    double v[6];
    for (int r = 0; r < 6; ++r) v[r] = chat[r];
    v[kmax] += sgn;
    const double inv = 1.0 / (1.0 + std::abs(chat[kmax]));  // 2 / v.v

    double Z[6][5];
    int col = 0;
    for (int j = 0; j < 6; ++j) {
        if (j == kmax) continue;
        for (int r = 0; r < 6; ++r) Z[r][col] = (r == j ? 1.0 : 0.0) - inv * v[j] * v[r];
        ++col;
    }

    // Reduced normal matrix S = Z^T A Z and projected value selector u.
    double T[6][5];
    for (int r = 0; r < 6; ++r)
        for (int q = 0; q < 5; ++q) {
            double acc = 0.0;
            for (int s = 0; s < 6; ++s) acc += A[r][s] * Z[s][q];
            T[r][q] = acc;
        }
    double S[5][5];
    for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q) {
            double acc = 0.0;
            for (int r = 0; r < 6; ++r) acc += Z[r][p] * T[r][q];
            S[p][q] = acc;
        }
    double u[5];
    for (int p = 0; p < 5; ++p) u[p] = Z[0][p];

    detail::SymFactor<5> f;
    if (!f.factor(S, detail::kCondLimit))
        throw StencilError(ps[i].id,
                           "particle " + std::to_string(ps[i].id) +
                               ": degenerate elliptic stencil (condition estimate " +
                               std::to_string(f.cond) + ")");

    // g = Z S^{-1} Z^T e1; the fitted value at the particle is
    //   a0 = g . (M^T W b) + (a_p[0] - g . (A a_p)),  a_p = (fc/|c|^2) c,
    // one sparse equation in the neighbor values.
    double z[5];
    f.solve(u, z);
    double g[6];
    for (int r = 0; r < 6; ++r) {
        double acc = 0.0;
        for (int p = 0; p < 5; ++p) acc += Z[r][p] * z[p];
        g[r] = acc;
    }

    SparseRow row;
    row.neighbors.reserve(m);
    for (int k = table.begin(i); k < table.end(i); ++k) {
        const double dx = table.dx[k], dy = table.dy[k];
        const double gm = g[0] + g[1] * dx + g[2] * dy + g[3] * 0.5 * dx * dx +
                          g[4] * dx * dy + g[5] * 0.5 * dy * dy;
        row.neighbors.emplace_back(table.nbr[k], -table.w[k] * gm);
    }
    const double scale = fc / cn2;
    double gAc = 0.0;
    for (int r = 0; r < 6; ++r) {
        double acc = 0.0;
        for (int s = 0; s < 6; ++s) acc += A[r][s] * c[s];
        gAc += g[r] * acc;
    }
    row.rhs = scale * (c[0] - gAc);
    return row;
}

LinearSystem assemble_system(const ParticleCloud& cloud,
                             const NeighborTable& table,
                             const std::vector<RowSpec>& specs) {
    LinearSystem sys;
    sys.rows.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        sys.rows[i] = assemble_row(cloud, table, static_cast<int>(i), specs[i]);
    return sys;
}

namespace {

// Borrowed CSR view of a system with an implicit unit diagonal; the sweep
// loop below is the hot path shared by relax() and PressureSystem.
struct CsrView {
    const int* ptr;
    const int* col;
    const double* val;
    const double* rhs;
    int n;
};

SolveResult relax_csr(const CsrView& sys, std::vector<double>& psi, double eps,
                      int max_sweeps, SweepMode mode, bool modulo_constant,
                      double omega) {
    const int n = sys.n;
    const int* ptr = sys.ptr;
    const int* col = sys.col;
    const double* val = sys.val;
    const double* rhs = sys.rhs;
    if (static_cast<int>(psi.size()) != n)
        throw InternalError("initial guess size does not match system");

    if (modulo_constant && n > 0) {
        double m = 0.0;
        for (double v : psi) m += v;
        m /= n;
        for (double& v : psi) v -= m;
    }

    std::vector<double> next(mode == SweepMode::Jacobi ? n : 0);
    std::vector<double> prev(modulo_constant ? n : 0);
    double ratio = 0.0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        if (modulo_constant) prev = psi;
        double change = 0.0, denom = 0.0;
        if (mode == SweepMode::GaussSeidel) {
            for (int i = 0; i < n; ++i) {
                double v = rhs[i];
                for (int k = ptr[i]; k < ptr[i + 1]; ++k)
                    v -= val[k] * psi[col[k]];
                if (omega != 1.0) v = psi[i] + omega * (v - psi[i]);
                change += std::abs(v - psi[i]);
                denom += std::abs(v);
                psi[i] = v;
            }
        } else {
            for (int i = 0; i < n; ++i) {
                double v = rhs[i];
                for (int k = ptr[i]; k < ptr[i + 1]; ++k)
                    v -= val[k] * psi[col[k]];
                if (omega != 1.0) v = psi[i] + omega * (v - psi[i]);
                change += std::abs(v - psi[i]);
                denom += std::abs(v);
                next[i] = v;
            }
            psi.swap(next);
        }
        if (modulo_constant && n > 0) {
            double m = 0.0;
            for (double v : psi) m += v;
            m /= n;
            change = denom = 0.0;
            for (int i = 0; i < n; ++i) {
                psi[i] -= m;
                change += std::abs(psi[i] - prev[i]);
                denom += std::abs(psi[i]);
            }
        }
        if (change < eps * denom || (denom == 0.0 && change == 0.0))
            return {sweep, denom > 0 ? change / denom : 0.0};
        ratio = denom > 0 ? change / denom : std::numeric_limits<double>::infinity();
    }
    throw SolveError(ratio, "iterative solve did not converge within " +
                                std::to_string(max_sweeps) +
                                " sweeps (last relative change " +
                                std::to_string(ratio) + ")");
}

// Over-relaxation cuts the sweep count several-fold. The system is
// nonsymmetric, so convergence at omega > 1 is not guaranteed; fall back to
// the plain sweep from the same starting point if it fails.
PressureSolveReport sor_with_fallback(const CsrView& sys,
                                      std::vector<double>& pressure,
                                      double eps, int max_sweeps,
                                      double stall_accept) {
    const double kOmega = 1.7;
    PressureSolveReport rep;
    std::vector<double> start = pressure;
    try {
        const SolveResult res = relax_csr(sys, pressure, eps, max_sweeps,
                                          SweepMode::GaussSeidel, true, kOmega);
        rep.sweeps = res.sweeps;
        rep.final_change = res.final_change;
        return rep;
    } catch (const SolveError&) {
        pressure = start;
    }
    try {
        const SolveResult res = relax_csr(sys, pressure, eps, max_sweeps,
                                          SweepMode::GaussSeidel, true, 1.0);
        rep.sweeps = max_sweeps + res.sweeps;
        rep.final_change = res.final_change;
    } catch (const SolveError& err) {
        if (err.final_change > stall_accept) throw;
        rep.sweeps = 2 * max_sweeps;
        rep.stalled = true;
        rep.final_change = err.final_change;
    }
    return rep;
}

}  // namespace

SolveResult relax(const LinearSystem& system, std::vector<double>& psi,
                  double eps, int max_sweeps, SweepMode mode,
                  bool modulo_constant, double omega) {
    const int n = static_cast<int>(system.rows.size());
    std::vector<int> ptr(n + 1, 0), col;
    std::vector<double> val, rhs(n);
    std::size_t nnz = 0;
    for (int i = 0; i < n; ++i) nnz += system.rows[i].neighbors.size();
    col.reserve(nnz);
    val.reserve(nnz);
    for (int i = 0; i < n; ++i) {
        ptr[i] = static_cast<int>(col.size());
        for (const auto& [j, c] : system.rows[i].neighbors) {
            col.push_back(j);
            val.push_back(c);
        }
        rhs[i] = system.rows[i].rhs;
    }
    ptr[n] = static_cast<int>(col.size());
    return relax_csr({ptr.data(), col.data(), val.data(), rhs.data(), n}, psi,
                     eps, max_sweeps, mode, modulo_constant, omega);
}

PressureSystem PressureSystem::build(const ParticleCloud& cloud,
                                     const NeighborTable& table,
                                     const StencilCache& stencils) {
    const auto& ps = cloud.particles();
    const int n = static_cast<int>(ps.size());

    PressureSystem sys;
    sys.rho_s_.resize(n);
    for (int i = 0; i < n; ++i) sys.rho_s_[i] = ps[i].rho_smooth;

    // Rows are assembled with a unit source; the resulting right-hand side
    // is the per-row slope, scaled by the actual source at solve time.
    sys.ptr_.resize(n + 1, 0);
    sys.rhs_slope_.resize(n);
    std::size_t guess = static_cast<std::size_t>(n) * 24;
    sys.col_.reserve(guess);
    sys.val_.reserve(guess);
    for (int i = 0; i < n; ++i) {
        sys.ptr_[i] = static_cast<int>(sys.col_.size());
        RowSpec spec;
        if (ps[i].is_wall()) {
            spec = RowSpec::neumann(0.0);
        } else {
            const Vec2 g = stencils.apply(cloud, table, i, sys.rho_s_).gradient();
            spec = RowSpec::interior(-g / sys.rho_s_[i], 1.0, 1.0);
        }
        const SparseRow row = assemble_row(cloud, table, i, spec);
        sys.rhs_slope_[i] = ps[i].is_wall() ? 0.0 : row.rhs;
        for (const auto& [j, c] : row.neighbors) {
            sys.col_.push_back(j);
            sys.val_.push_back(c);
        }
    }
    sys.ptr_[n] = static_cast<int>(sys.col_.size());
    return sys;
}

PressureSolveReport PressureSystem::solve(const std::vector<double>& div,
                                          double dt, double eps, int max_sweeps,
                                          std::vector<double>& pressure,
                                          double stall_accept) const {
    const int n = static_cast<int>(rho_s_.size());
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i)
        rhs[i] = rhs_slope_[i] * rho_s_[i] * div[i] / dt;
    return sor_with_fallback({ptr_.data(), col_.data(), val_.data(), rhs.data(), n},
                             pressure, eps, max_sweeps, stall_accept);
}

PressureSolveReport solve_pressure_poisson(const ParticleCloud& cloud,
                                           const NeighborTable& table,
                                           const StencilCache& stencils,
                                           const std::vector<double>& div_vstar,
                                           double dt, double eps, int max_sweeps,
                                           std::vector<double>& pressure,
                                           double stall_accept) {
    return PressureSystem::build(cloud, table, stencils)
        .solve(div_vstar, dt, eps, max_sweeps, pressure, stall_accept);
}

}  // namespace fpm
