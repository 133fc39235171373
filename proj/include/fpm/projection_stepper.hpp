// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "fpm/interface_csf.hpp"
#include "fpm/ls_operators.hpp"
#include "fpm/particle_cloud.hpp"
#include "fpm/scenario_config.hpp"

namespace fpm {

struct StepReport {
    double t = 0.0;             // time after the step
    int solver_sweeps = 0;      // pressure relaxation sweeps, all passes
    int projection_iters = 0;   // correction passes run this step
    bool solver_stalled = false;  // sweep cap hit while still shrinking slowly
    int particles_merged = 0;   // interior pairs collapsed
    int particles_filled = 0;   // void cells reseeded
    int clamped = 0;            // particles pushed back into the domain
    double max_velocity = 0.0;
    double div_star_rms = 0.0;  // interior divergence of the predictor field
    double div_rms = 0.0;       // interior divergence after projection
    std::size_t n_liquid = 0;
    std::size_t n_gas = 0;
};

struct ManageReport {
    int merged = 0;  // pairs collapsed (each removes 2, adds 1)
    int filled = 0;
};

// Collapses interior same-phase pairs closer than merge_factor * dx0 and
// reseeds empty cells of the original seeding lattice. Field values for
// inserted particles come from least-squares interpolation.
ManageReport manage_particles(ParticleCloud& cloud, const ScenarioConfig& cfg);

// Chorin-style pressure projection over a particle cloud. Owns the cloud
// and advances it one dt per step() call:
//   interface force -> viscous/gravity predictor -> pressure Poisson
//   -> velocity correction -> advection -> cloud management.
class Stepper {
  public:
    explicit Stepper(const ScenarioConfig& cfg);
    Stepper(const ScenarioConfig& cfg, ParticleCloud cloud);

    StepReport step();

    const ParticleCloud& cloud() const { return cloud_; }
    ParticleCloud& cloud() { return cloud_; }
    double time() const { return t_; }
    int steps_taken() const { return steps_; }
    const ScenarioConfig& config() const { return cfg_; }
    // Interface state from the most recent step (empty before the first).
    const InterfaceField& interface_field() const { return iface_; }

  private:
    ScenarioConfig cfg_;
    ParticleCloud cloud_;
    InterfaceField iface_;
    double t_ = 0.0;
    int steps_ = 0;
    // Warm starts for the repeated projection passes; one field per pass,
    // carried between steps while the particle count is unchanged.
    std::vector<std::vector<double>> inc_warm_;
};

}  // namespace fpm
