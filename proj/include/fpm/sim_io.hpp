// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fpm/particle_cloud.hpp"
#include "fpm/scenario_config.hpp"

namespace fpm {

// "snapshot_000042.csv"
std::string snapshot_filename(int index);

// Particle state as CSV, ascending id, doubles at %.9g:
//   id,kind,color,x,y,u,v,p,rho_smooth
void write_snapshot(const ParticleCloud& cloud, const std::string& path);

struct RunOptions {
    std::string out_dir = ".";
    double snapshot_interval = -1.0;  // <= 0 uses the config's output interval
    int log_every = 50;               // progress cadence in run.log, steps
    bool echo_progress = false;       // mirror progress lines to stdout
};

struct RunSummary {
    int steps = 0;
    double t_final = 0.0;
    int snapshots = 0;
    std::size_t particles_final = 0;
    std::string diagnostics_path;
    std::string log_path;
};

// Seeds the scenario, advances it to t_end, writing snapshots on the
// interval grid, a per-step diagnostics CSV (t,L,H,dp,ke,N) and a run log.
// `defaulted` lists config keys that fell back to defaults, echoed in the
// log so a run records what it actually used.
RunSummary run_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                        const std::vector<std::string>& defaulted = {});

struct ConvergenceRow {
    double h = 0.0;
    std::size_t particles = 0;
    double linf = 0.0;
    int sweeps = 0;
    double eps_used = 0.0;  // tolerance the relaxation actually met
    bool failed = false;    // no ladder tier converged
};

struct ConvergenceResult {
    int example = 1;
    std::vector<ConvergenceRow> rows;
    double order = 0.0;  // least-squares slope of ln(err) against ln(h)
};

// Solves the manufactured two-material diffusion problem on the unit
// square at each h and reports the max-norm error against the closed form.
// Coarse clouds leave the smoothed coefficient under-resolved and the
// resulting relaxation semi-convergent, so each h starts at `eps` and
// relaxes the tolerance tenfold (up to 1e-3) until the sweep converges;
// rows record the tolerance met, or are marked failed.
ConvergenceResult run_diffusion_convergence(int example, const std::vector<double>& hs,
                                            double eps = 1e-6, int max_sweeps = 30000,
                                            bool echo_progress = false);

// errors.csv in out_dir: h,particles,linf_error,sweeps
void write_convergence(const ConvergenceResult& r, const std::string& out_dir);

}  // namespace fpm
