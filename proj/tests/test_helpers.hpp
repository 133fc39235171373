// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "fpm/particle_cloud.hpp"
#include "fpm/scenario_config.hpp"

namespace testutil {

// Unit-square single-phase configuration, handy for operator tests.
inline fpm::ScenarioConfig unit_square(double h) {
    fpm::ScenarioConfig c;
    c.name = "unit";
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.phase.shape = fpm::PhaseShape::Uniform;
    c.rho_liquid = 1.0;
    c.mu_liquid = 1.0;
    c.rho_gas = 1.0;
    c.mu_gas = 1.0;
    c.sigma = 0.0;
    c.h = h;
    c.t_end = 0.0;
    return c;
}

// Liquid disk in the middle of the unit square (does not touch any wall).
inline fpm::ScenarioConfig centered_disk(double h, double radius) {
    fpm::ScenarioConfig c = unit_square(h);
    c.name = "disk";
    c.phase.shape = fpm::PhaseShape::Semicircle;
    c.phase.center = {0.5, 0.5};
    c.phase.radius = radius;
    c.rho_liquid = 2.0;
    c.mu_liquid = 0.02;
    c.rho_gas = 1.0;
    c.mu_gas = 0.01;
    return c;
}

// Random interior jitter of at most `amount * dx0` per coordinate, so the
// lattice regularity cannot mask operator defects. Walls stay put.
inline void jitter(fpm::ParticleCloud& cloud, double amount, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-amount, amount);
    const double dx0 = cloud.dx0();
    for (auto& p : cloud.particles()) {
        if (p.is_wall()) continue;
        p.pos.x += d(rng) * dx0;
        p.pos.y += d(rng) * dx0;
    }
    cloud.rebuild_index();
}

}  // namespace testutil
