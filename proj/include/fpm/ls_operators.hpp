// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "fpm/detail/sym_solve.hpp"
#include "fpm/particle_cloud.hpp"

namespace fpm {

// First and second spatial derivatives of a scalar field at one particle,
// recovered from a weighted least-squares fit of second-order Taylor
// expansions over the neighbor cloud.
struct DerivativeApprox {
    double ddx = 0, ddy = 0;
    double d2dx2 = 0, d2dxdy = 0, d2dy2 = 0;

    Vec2 gradient() const { return {ddx, ddy}; }
    double laplacian() const { return d2dx2 + d2dy2; }
};

// Flattened per-particle neighbor lists with cached weights and offsets.
// Built once per step (positions are frozen within a step) and shared by
// the smoothing, derivative and assembly passes.
struct NeighborTable {
    std::vector<int> offsets;  // size N+1
    std::vector<int> nbr;      // neighbor indices, ascending within a range
    std::vector<double> w;     // Gaussian weight of the pair
    std::vector<double> dx;    // x_j - x_i
    std::vector<double> dy;

    int begin(int i) const { return offsets[i]; }
    int end(int i) const { return offsets[i + 1]; }
    int count(int i) const { return offsets[i + 1] - offsets[i]; }

    static NeighborTable build(const ParticleCloud& cloud);
};

// Per-particle factored moment matrices for the 5-term Taylor fit. Building
// the cache factors each stencil once; apply() then differentiates any field
// with two triangular solves.
class StencilCache {
  public:
    enum class Status : unsigned char { Ok = 0, TooFewNeighbors, Degenerate };

    static StencilCache build(const ParticleCloud& cloud,
                              const NeighborTable& table);

    Status status(int i) const { return status_[i]; }

    // Derivatives of `field` (indexed like the cloud) at particle index i.
    // center_value overrides field[i] when differentiating a quantity not
    // stored per particle. Throws StencilError if the stencil is unusable.
    DerivativeApprox apply(const ParticleCloud& cloud, const NeighborTable& table,
                           int i, const std::vector<double>& field,
                           double center_value) const;
    DerivativeApprox apply(const ParticleCloud& cloud, const NeighborTable& table,
                           int i, const std::vector<double>& field) const {
        return apply(cloud, table, i, field, field[i]);
    }

    // Differentiates two fields against the same stencil in one pass. The
    // geometry terms and the scattered neighbor loads are shared, so this is
    // nearly twice as fast as two apply() calls; the stepping loop leans on
    // it for velocity pairs (divergence, viscous terms).
    void apply2(const ParticleCloud& cloud, const NeighborTable& table, int i,
                const std::vector<double>& fa, const std::vector<double>& fb,
                DerivativeApprox& da, DerivativeApprox& db) const;

  private:
    void require_usable(const ParticleCloud& cloud, const NeighborTable& table,
                        int i) const;

    std::vector<detail::SymFactor<5>> factors_;
    std::vector<Status> status_;
};

// Per-particle factored moment matrices for the 6-term (constant plus
// Taylor) value fit over the stencil including the particle itself.
// fitted2() evaluates the fit at the particle: fields that are locally
// quadratic are reproduced exactly, so replacing values by their fits
// damps only what the polynomial cannot represent -- stencil-scale noise
// -- without acting as an artificial viscosity on resolved motion.
class ValueFitCache {
  public:
    static ValueFitCache build(const ParticleCloud& cloud,
                               const NeighborTable& table);

    // Fitted values of two fields at particle i in one pass. Falls back to
    // a Shepard mean (self weight 1) where the stencil cannot support the
    // six-term fit.
    void fitted2(const NeighborTable& table, int i,
                 const std::vector<double>& fa, const std::vector<double>& fb,
                 double& va, double& vb) const;

  private:
    std::vector<detail::SymFactor<6>> factors_;
    std::vector<char> ok_;
};

// Second-order Taylor expansion row for an offset (dx, dy); the fitted
// coefficient vector then reads (ddx, ddy, d2dx2, d2dxdy, d2dy2).
inline void taylor_row(double dx, double dy, double (&m)[5]) {
    m[0] = dx;
    m[1] = dy;
    m[2] = 0.5 * dx * dx;
    m[3] = dx * dy;
    m[4] = 0.5 * dy * dy;
}

// One-off fit at particle `id`; field is indexed like cloud.particles().
// Convenience path for callers outside the stepping loop.
DerivativeApprox fit_derivatives(const ParticleCloud& cloud, int id,
                                 const std::vector<double>& field);

Vec2 ls_gradient(const ParticleCloud& cloud, int id,
                 const std::vector<double>& field);
double ls_laplacian(const ParticleCloud& cloud, int id,
                    const std::vector<double>& field);
double ls_divergence(const ParticleCloud& cloud, int id,
                     const std::vector<double>& fx,
                     const std::vector<double>& fy);

// Shepard (normalized weighted mean) smoothing. Each iteration replaces the
// value at every particle by the weighted mean over itself (weight 1) and
// its neighbors. Result stays within the min/max of the input.
std::vector<double> shepard_smooth(const ParticleCloud& cloud,
                                   const NeighborTable& table,
                                   std::vector<double> field, int iterations);

// Field value at an arbitrary point from a 6-term (constant + Taylor) fit
// over particles within h; falls back to a Shepard mean when fewer than six
// neighbors or a degenerate geometry. Empty ball -> nullopt.
std::optional<double> ls_interpolate(const ParticleCloud& cloud, const Vec2& p,
                                     const std::vector<double>& field);

// Weighted mean over particles within `radius` of p (Gaussian stretched to
// that radius). Empty ball -> nullopt.
std::optional<double> shepard_mean(const ParticleCloud& cloud, const Vec2& p,
                                   const std::vector<double>& field,
                                   double radius);

}  // namespace fpm
