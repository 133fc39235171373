// SPDX-License-Identifier: Apache-2.0
#include "fpm/sim_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "fpm/config_io.hpp"
#include "fpm/elliptic_solver.hpp"
#include "fpm/errors.hpp"
#include "fpm/projection_stepper.hpp"
#include "fpm/scenarios.hpp"

namespace fpm {

namespace {

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string snapshot_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%06d.csv", index);
    return buf;
}

void write_snapshot(const ParticleCloud& cloud, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "id,kind,color,x,y,u,v,p,rho_smooth\n";
    for (const auto& p : cloud.particles()) {
        out << p.id << ',' << static_cast<int>(p.kind) << ',' << static_cast<int>(p.color)
            << ',' << g9(p.pos.x) << ',' << g9(p.pos.y) << ',' << g9(p.vel.x) << ','
            << g9(p.vel.y) << ',' << g9(p.pressure) << ',' << g9(p.rho_smooth) << '\n';
    }
}

namespace {

void write_diag_row(std::ofstream& out, const Diagnostics& d) {
    out << g9(d.t) << ',' << g9(d.L) << ',' << g9(d.H) << ',' << g9(d.dp) << ','
        << g9(d.ke) << ',' << d.n << '\n';
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                        const std::vector<std::string>& defaulted) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    const std::string dir = opts.out_dir;

    std::ofstream log = open_out(dir + "/run.log");
    log << "scenario " << cfg.name << "\n";
    if (!defaulted.empty()) {
        log << "defaulted keys:";
        for (const auto& k : defaulted) log << ' ' << k;
        log << "\n";
    }
    log << "effective configuration:\n" << emit_config(cfg) << "\n";

    Stepper stepper(cfg);
    const double dt = cfg.dt;
    const int n_steps = static_cast<int>(std::lround(cfg.t_end / dt));
    const double interval =
        opts.snapshot_interval > 0.0 ? opts.snapshot_interval : cfg.output_interval;

    log << "seeded " << stepper.cloud().size() << " particles ("
        << stepper.cloud().count(Kind::Interior) << " interior, "
        << stepper.cloud().count(Kind::Wall) << " wall)\n";
    log << "steps " << n_steps << ", dt " << g9(dt) << ", snapshot interval " << g9(interval)
        << "\n";
    log.flush();

    std::ofstream diag = open_out(dir + "/diagnostics.csv");
    diag << "t,L,H,dp,ke,N\n";
    write_diag_row(diag, compute_diagnostics(stepper.cloud(), 0.0));

    int snap_index = 0;
    write_snapshot(stepper.cloud(), dir + "/" + snapshot_filename(snap_index));
    ++snap_index;
    double last_snap_t = 0.0;

    auto t0 = std::chrono::steady_clock::now();
    for (int s = 1; s <= n_steps; ++s) {
        StepReport rep = stepper.step();
        write_diag_row(diag, compute_diagnostics(stepper.cloud(), rep.t));

        if (rep.t + 0.5 * dt >= snap_index * interval) {
            write_snapshot(stepper.cloud(), dir + "/" + snapshot_filename(snap_index));
            last_snap_t = rep.t;
            ++snap_index;
        }
        if (opts.log_every > 0 && (s % opts.log_every == 0 || s == n_steps)) {
            auto el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
            std::string line = "step " + std::to_string(s) + "/" + std::to_string(n_steps) +
                               " t=" + g9(rep.t) + " sweeps=" + std::to_string(rep.solver_sweeps) +
                               " vmax=" + g9(rep.max_velocity) + " div*=" + g9(rep.div_star_rms) +
                               " div=" + g9(rep.div_rms) +
                               " merged=" + std::to_string(rep.particles_merged) +
                               " filled=" + std::to_string(rep.particles_filled) + " N=" +
                               std::to_string(stepper.cloud().size()) + " wall=" +
                               g9(el.count()) + "s";
            log << line << "\n";
            log.flush();
            if (opts.echo_progress) std::printf("%s\n", line.c_str());
        }
    }

    if (n_steps > 0 && last_snap_t + 0.25 * dt < stepper.time()) {
        write_snapshot(stepper.cloud(), dir + "/" + snapshot_filename(snap_index));
        ++snap_index;
    }

    RunSummary sum;
    sum.steps = n_steps;
    sum.t_final = stepper.time();
    sum.snapshots = snap_index;
    sum.particles_final = stepper.cloud().size();
    sum.diagnostics_path = dir + "/diagnostics.csv";
    sum.log_path = dir + "/run.log";
    log << "done, final N=" << sum.particles_final << "\n";
    return sum;
}

ConvergenceResult run_diffusion_convergence(int example, const std::vector<double>& hs,
                                            double eps, int max_sweeps, bool echo_progress) {
    DiffusionCase prob = manufactured_diffusion(example);
    ConvergenceResult result;
    result.example = example;

    for (double h : hs) {
        ScenarioConfig cfg;
        cfg.name = "diffusion";
        cfg.domain = {0.0, 1.0, 0.0, 1.0};
        cfg.phase.shape = PhaseShape::Uniform;
        cfg.rho_liquid = cfg.rho_gas = 1.0;
        cfg.mu_liquid = cfg.mu_gas = 1e-3;
        cfg.sigma = 0.0;
        cfg.theta_deg = 90.0;
        cfg.h = h;
        cfg.t_end = 0.0;

        ParticleCloud cloud = ParticleCloud::seed(cfg);
        NeighborTable table = NeighborTable::build(cloud);
        StencilCache stencils = StencilCache::build(cloud, table);

        const auto& ps = cloud.particles();
        std::vector<double> k(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) k[i] = prob.k_at(ps[i].pos);
        std::vector<double> k_s = shepard_smooth(cloud, table, k, 3);

        std::vector<RowSpec> specs(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (ps[i].is_wall()) {
                specs[i] = RowSpec::dirichlet(prob.exact(ps[i].pos));
            } else {
                Vec2 grad_k = stencils.apply(cloud, table, i, k_s).gradient();
                specs[i] = RowSpec::interior(grad_k, k_s[i], prob.source(ps[i].pos));
            }
        }
        LinearSystem system = assemble_system(cloud, table, specs);

        ConvergenceRow row;
        row.h = h;
        row.particles = ps.size();
        row.failed = true;
        for (double tier = eps; tier <= 1e-3 * (1.0 + 1e-12); tier *= 10.0) {
            std::vector<double> psi(ps.size(), 0.0);
            try {
                SolveResult sr = relax(system, psi, tier, max_sweeps);
                row.sweeps = sr.sweeps;
                row.eps_used = tier;
                row.failed = false;
            } catch (const SolveError&) {
                continue;
            }
            row.linf = 0.0;
            for (std::size_t i = 0; i < ps.size(); ++i)
                row.linf = std::max(row.linf, std::abs(psi[i] - prob.exact(ps[i].pos)));
            break;
        }
        if (row.failed) row.linf = std::numeric_limits<double>::quiet_NaN();

        result.rows.push_back(row);
        if (echo_progress) {
            if (row.failed)
                std::printf("h=%-8g N=%-7zu failed: no tolerance tier converged\n", h,
                            ps.size());
            else
                std::printf("h=%-8g N=%-7zu Linf=%.6e sweeps=%d eps=%g\n", h, ps.size(),
                            row.linf, row.sweeps, row.eps_used);
        }
    }

    // err ~ C h^p; p from the least-squares slope in log-log over the
    // converged rows.
    int fitted = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : result.rows) {
        if (r.failed) continue;
        double x = std::log(r.h), y = std::log(r.linf);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++fitted;
    }
    if (fitted >= 2) {
        const double n = static_cast<double>(fitted);
        result.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return result;
}

void write_convergence(const ConvergenceResult& r, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out = open_out(out_dir + "/errors.csv");
    out << "h,particles,linf_error,sweeps,eps\n";
    for (const auto& row : r.rows) {
        out << g9(row.h) << ',' << row.particles << ',';
        if (row.failed)
            out << "failed";
        else
            out << g9(row.linf);
        out << ',' << row.sweeps << ',' << g9(row.eps_used) << '\n';
    }
}

}  // namespace fpm
