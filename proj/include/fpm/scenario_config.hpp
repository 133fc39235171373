// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fpm/vec2.hpp"

namespace fpm {

struct Rect {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
};

// Initial liquid region; everything else in the domain is gas.
enum class PhaseShape { Uniform, HalfPlane, Rectangle, Semicircle };

struct PhaseRegion {
    PhaseShape shape = PhaseShape::Uniform;
    double y_fill = 0.0;   // HalfPlane: liquid where y < y_fill
    Rect box;              // Rectangle: liquid inside box
    Vec2 center;           // Semicircle: liquid within radius of center
    double radius = 0.0;

    bool liquid_at(const Vec2& p) const {
        switch (shape) {
            case PhaseShape::Uniform:   return true;
            case PhaseShape::HalfPlane: return p.y < y_fill;
            case PhaseShape::Rectangle: return box.contains(p);
            case PhaseShape::Semicircle:
                return (p - center).norm2() <= radius * radius;
        }
        return false;
    }
};

// Which velocity moves the particles: the velocity the step started from, or
// the freshly projected one.
enum class AdvectWith { CurrentVelocity, CorrectedVelocity };

struct ScenarioConfig {
    std::string name = "custom";

    Rect domain;
    PhaseRegion phase;

    // Material parameters.
    double rho_liquid = 0.0;
    double mu_liquid = 0.0;
    double rho_gas = 0.0;
    double mu_gas = 0.0;
    double sigma = 0.0;       // surface tension coefficient [N/m]
    double theta_deg = 90.0;  // static contact angle
    Vec2 gravity;

    // Discretization.
    double h = 0.0;                 // interaction radius
    double spacing_factor = 3.0;    // initial spacing dx0 = h / spacing_factor
    double dt = 2e-4;
    double t_end = 0.0;
    double alpha = 6.25;            // Gaussian weight exponent
    double beta = 1.0;              // contact-line correction radius, in units of h

    // Solver. The projection repeats on the measured divergence until the
    // step's reduction target, so the first solve only needs to be accurate
    // to the stencil-mismatch floor; tightening eps below 1e-5 buys nothing
    // but sweeps.
    double eps_solver = 1e-5;
    int max_sweeps = 10000;

    // Field smoothing.
    int color_smooth_iters = 3;
    int material_smooth_iters = 0;  // 0 = auto (3, or 10 when a phase ratio >= 100)

    AdvectWith advect_with = AdvectWith::CurrentVelocity;
    bool smoothed_density_in_momentum = true;

    // Fraction of the local quadratic-fit velocity blended into the
    // corrected field each step. Drains the stencil-scale velocity noise
    // the projection cannot reach, which weakly viscous liquids otherwise
    // accumulate until it dominates the divergence; smooth motion is
    // reproduced by the fit and passes through untouched.
    double vel_blend = 0.4;

    // Particle management.
    bool management = true;
    double merge_factor = 0.2;      // merge distance = merge_factor * dx0

    double output_interval = 0.05;  // snapshot cadence [s]

    double dx0() const { return h / spacing_factor; }
    double theta_rad() const;

    // Effective smoothing iteration count for a material field whose phase
    // ratio is `ratio` (>= 1).
    int material_iters_for(double ratio) const;

    // Returns every violated constraint as a human-readable message;
    // empty means the configuration is usable.
    std::vector<std::string> validate() const;
};

}  // namespace fpm
