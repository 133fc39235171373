// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fpm/ls_operators.hpp"
#include "fpm/particle_cloud.hpp"

namespace fpm {

// Per-particle interface quantities for the continuum surface force model.
// Slots are indexed like the cloud's particle array; particles away from
// the interface carry has_normal = 0 and zero curvature/delta.
struct InterfaceField {
    std::vector<double> color_smooth;
    std::vector<Vec2> grad_c;
    std::vector<char> has_normal;
    std::vector<Vec2> normal;     // unit length, points into the liquid
    std::vector<char> corrected;  // prescribed-angle adjustment applied
    std::vector<double> kappa;
    std::vector<double> delta_s;  // surface delta, |grad of smoothed color|
    double grad_threshold = 0.0;
};

struct InterfaceParams {
    double theta_rad = 1.5707963267948966;
    double beta = 1.0;  // contact band half-width in units of h
    int color_smooth_iters = 3;
};

// Smoothed color field: Shepard-averaged copies of the raw phase color.
std::vector<double> smoothed_color(const ParticleCloud& cloud, const NeighborTable& table,
                                   int iterations);

// Gradient of the smoothed color everywhere; unit normals where the
// gradient magnitude clears the resolution threshold.
void interface_normals(const ParticleCloud& cloud, const NeighborTable& table,
                       const StencilCache& stencils, InterfaceField& field);

// Replaces normals near contact lines (wall particles that see both
// phases, plus anything within beta*h of one) with the direction that a
// meniscus meeting the wall at theta would have.
void apply_contact_angle(const ParticleCloud& cloud, const NeighborTable& table,
                         double theta_rad, double beta, InterfaceField& field);

// kappa = -div(normal) from a least-squares fit over neighbors that carry
// a normal themselves; delta_s = |grad of smoothed color|.
void curvature_and_delta(const ParticleCloud& cloud, const NeighborTable& table,
                         InterfaceField& field);

// Full pipeline: smooth, normals, contact angle, curvature.
InterfaceField build_interface_field(const ParticleCloud& cloud, const NeighborTable& table,
                                     const StencilCache& stencils, const InterfaceParams& params);

// Volume force sigma * kappa * normal * delta_s, zero off the interface.
std::vector<Vec2> surface_tension_force(const ParticleCloud& cloud, const InterfaceField& field,
                                        double sigma);

}  // namespace fpm
