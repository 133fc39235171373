// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fpm/vec2.hpp"

namespace fpm {

// Phase color. The gas/liquid values are also the raw color field used by the
// interface reconstruction, so the jump across the interface is exactly 1.
enum class Phase : int { Gas = 1, Liquid = 2 };

enum class Kind : int { Interior = 0, Wall = 1 };

struct Particle {
    int id = -1;
    Kind kind = Kind::Interior;
    Phase color = Phase::Liquid;  // immutable after seeding

    Vec2 pos;
    Vec2 vel;
    double pressure = 0.0;

    double rho = 0.0;  // material density, immutable
    double mu = 0.0;   // material dynamic viscosity, immutable

    // Shepard-smoothed fields, refreshed every step.
    double rho_smooth = 0.0;
    double mu_smooth = 0.0;
    double color_smooth = 0.0;

    // Unit outward normal; meaningful only for kind == Wall.
    Vec2 wall_normal;

    bool is_wall() const { return kind == Kind::Wall; }
    bool is_liquid() const { return color == Phase::Liquid; }
};

}  // namespace fpm
