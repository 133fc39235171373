// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fpm/ls_operators.hpp"
#include "fpm/particle_cloud.hpp"

namespace fpm {

// Per-particle equation selector for the scalar elliptic problem
//   B . grad(psi) + C * lap(psi) = f.
// Interior rows enforce the PDE as a least-squares constraint on the local
// Taylor fit; Neumann rows constrain the normal derivative instead (using
// the particle's wall normal); Dirichlet rows pin the value directly.
struct RowSpec {
    enum class Kind { Interior, Neumann, Dirichlet };
    Kind kind = Kind::Interior;
    Vec2 B;
    double C = 0.0;
    double f = 0.0;
    double bc_value = 0.0;  // Neumann: prescribed normal derivative; Dirichlet: value

    static RowSpec interior(Vec2 B, double C, double f) {
        return {Kind::Interior, B, C, f, 0.0};
    }
    static RowSpec neumann(double flux) {
        return {Kind::Neumann, {}, 0.0, 0.0, flux};
    }
    static RowSpec dirichlet(double value) {
        return {Kind::Dirichlet, {}, 0.0, 0.0, value};
    }
};

// One sparse equation  psi_i + sum_j coeff_j * psi_j = rhs  with an implicit
// unit diagonal. Neighbor keys are cloud indices.
struct SparseRow {
    std::vector<std::pair<int, double>> neighbors;
    double rhs = 0.0;
};

struct LinearSystem {
    std::vector<SparseRow> rows;  // one per particle, in cloud order
};

// Builds the row for particle index i from its Taylor moment matrix
// augmented with the PDE / boundary constraint.
SparseRow assemble_row(const ParticleCloud& cloud, const NeighborTable& table,
                       int i, const RowSpec& spec);

LinearSystem assemble_system(const ParticleCloud& cloud,
                             const NeighborTable& table,
                             const std::vector<RowSpec>& specs);

enum class SweepMode { GaussSeidel, Jacobi };

struct SolveResult {
    int sweeps = 0;
    double final_change = 0.0;  // relative change of the last sweep
};

// Relaxes psi in place, sweeping rows in ascending index order, until the
// sweep-to-sweep relative change  sum|dpsi| / sum|psi|  drops below eps.
// Throws SolveError when max_sweeps is exhausted first.
//
// `modulo_constant` handles systems whose every row annihilates constants
// (the all-Neumann pressure problem): such systems fix psi only up to a
// constant, and any right-hand-side incompatibility makes plain sweeps
// drift along that constant forever, so the change criterion never trips.
// Sweeps are shift-equivariant there, so re-zeroing the mean each sweep is
// a pure reparametrization; change and norm are then measured between the
// mean-zero representatives.
// `omega` over-relaxes each update (1 = plain sweep); values in (1, 2)
// accelerate smooth-dominated solves severalfold but are not guaranteed to
// converge on nonsymmetric rows, so callers that raise it should be ready
// to retry at 1.
SolveResult relax(const LinearSystem& system, std::vector<double>& psi,
                  double eps, int max_sweeps,
                  SweepMode mode = SweepMode::GaussSeidel,
                  bool modulo_constant = false, double omega = 1.0);

struct PressureSolveReport {
    int sweeps = 0;
    bool stalled = false;        // cap hit; iterate kept because it was still shrinking
    double final_change = 0.0;
};

// Pressure projection system:
//   -(grad rho_s / rho_s) . grad p + lap p = rho_s * div / dt
// with homogeneous Neumann walls; rho_s is the smoothed density stored on
// the particles. The matrix depends only on the frozen geometry and rho_s,
// and each row's right-hand side is linear in its source value, so the
// assembly and the flattened sparse storage are built once and reused for
// every projection pass of a step (the divergence source changes, the
// matrix does not).
class PressureSystem {
  public:
    static PressureSystem build(const ParticleCloud& cloud,
                                const NeighborTable& table,
                                const StencilCache& stencils);

    // Solves with source rho_s_i * div_i / dt at interior rows, homogeneous
    // Neumann at walls. Warm-starts from `pressure`, removes the mean (the
    // all-Neumann system only fixes p up to a constant). Sweeps are
    // over-relaxed; on failure the solve falls back to a plain sweep from
    // the same start.
    //
    // Strong density contrasts push the relaxation rate of the per-phase
    // pressure offset very close to 1, so a solve can hit the sweep cap
    // while the change is small and still falling. Such an iterate is kept
    // and flagged as stalled; only a change above `stall_accept` throws.
    PressureSolveReport solve(const std::vector<double>& div, double dt,
                              double eps, int max_sweeps,
                              std::vector<double>& pressure,
                              double stall_accept = 1e-3) const;

  private:
    // CSR of the off-diagonal coefficients (implicit unit diagonal) and the
    // factor turning a row's source value into its right-hand side.
    std::vector<int> ptr_, col_;
    std::vector<double> val_;
    std::vector<double> rhs_slope_;  // zero on wall rows
    std::vector<double> rho_s_;
};

// One-shot convenience wrapper: build the system and solve once.
PressureSolveReport solve_pressure_poisson(const ParticleCloud& cloud,
                                           const NeighborTable& table,
                                           const StencilCache& stencils,
                                           const std::vector<double>& div_vstar,
                                           double dt, double eps, int max_sweeps,
                                           std::vector<double>& pressure,
                                           double stall_accept = 1e-3);

}  // namespace fpm
