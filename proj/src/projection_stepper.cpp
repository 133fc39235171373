// SPDX-License-Identifier: Apache-2.0
#include "fpm/projection_stepper.hpp"

#include <algorithm>
#include <cmath>

#include "fpm/elliptic_solver.hpp"
#include "fpm/errors.hpp"

namespace fpm {

namespace {

// Phase ratio for a pair of material constants, always >= 1.
double ratio(double a, double b) { return a > b ? a / b : b / a; }

void assign_material(Particle& p, const ScenarioConfig& cfg) {
    if (p.color == Phase::Liquid) {
        p.rho = cfg.rho_liquid;
        p.mu = cfg.mu_liquid;
    } else {
        p.rho = cfg.rho_gas;
        p.mu = cfg.mu_gas;
    }
    p.rho_smooth = p.rho;
    p.mu_smooth = p.mu;
    p.color_smooth = static_cast<double>(p.color);
}

// Interpolated scalar at a point, falling back to a plain weighted mean
// over a 2h ball, then to `fallback` when nothing is in range.
double field_at(const ParticleCloud& cloud, Vec2 pos, const std::vector<double>& field,
                double fallback) {
    if (auto v = ls_interpolate(cloud, pos, field)) return *v;
    if (auto v = shepard_mean(cloud, pos, field, 2.0 * cloud.h())) return *v;
    return fallback;
}

struct GatheredFields {
    std::vector<double> u, v, p;
};

GatheredFields gather_fields(const ParticleCloud& cloud) {
    const auto& ps = cloud.particles();
    GatheredFields g;
    g.u.resize(ps.size());
    g.v.resize(ps.size());
    g.p.resize(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        g.u[i] = ps[i].vel.x;
        g.v[i] = ps[i].vel.y;
        g.p[i] = ps[i].pressure;
    }
    return g;
}

int merge_pass(ParticleCloud& cloud, const ScenarioConfig& cfg) {
    const double radius = cfg.merge_factor * cfg.dx0();
    if (radius <= 0.0) return 0;
    const auto& ps = cloud.particles();

    struct Pair {
        Vec2 pos;
        Phase color;
        Vec2 vel_mean;
        double p_mean;
    };
    std::vector<Pair> pairs;
    std::vector<char> victim(ps.size(), 0);
    std::vector<std::size_t> victims;

    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (victim[i] || ps[i].is_wall()) continue;
        std::size_t best = ps.size();
        double best_d2 = radius * radius;
        for (std::size_t j : cloud.indices_near(ps[i].pos, radius)) {
            if (j <= i || victim[j] || ps[j].is_wall() || ps[j].color != ps[i].color) continue;
            double d2 = (ps[j].pos - ps[i].pos).norm2();
            if (d2 < best_d2 || (best == ps.size() && d2 <= best_d2)) {
                best = j;
                best_d2 = d2;
            }
        }
        if (best == ps.size()) continue;
        victim[i] = victim[best] = 1;
        victims.push_back(i);
        victims.push_back(best);
        pairs.push_back({0.5 * (ps[i].pos + ps[best].pos), ps[i].color,
                         0.5 * (ps[i].vel + ps[best].vel),
                         0.5 * (ps[i].pressure + ps[best].pressure)});
    }
    if (pairs.empty()) return 0;

    std::sort(victims.begin(), victims.end());
    cloud.remove_by_indices(victims);
    cloud.rebuild_index();

    // Plan every replacement before inserting: additions invalidate the
    // spatial index the interpolation queries run against.
    GatheredFields g = gather_fields(cloud);
    std::vector<Particle> planned;
    planned.reserve(pairs.size());
    for (const auto& pr : pairs) {
        Particle np;
        np.kind = Kind::Interior;
        np.color = pr.color;
        np.pos = pr.pos;
        np.vel.x = field_at(cloud, pr.pos, g.u, pr.vel_mean.x);
        np.vel.y = field_at(cloud, pr.pos, g.v, pr.vel_mean.y);
        np.pressure = field_at(cloud, pr.pos, g.p, pr.p_mean);
        assign_material(np, cfg);
        planned.push_back(np);
    }
    for (const Particle& np : planned) cloud.add_particle(np);
    cloud.rebuild_index();
    return static_cast<int>(pairs.size());
}

int fill_pass(ParticleCloud& cloud, const ScenarioConfig& cfg) {
    // Void detection runs on an h-sized grid: a cell whose center has no
    // particle at all within h/3 gets one spawned at the center.
    const Rect dom = cfg.domain;
    const double h = cloud.h();
    const int nx = std::max(1, static_cast<int>(std::lround(dom.width() / h)));
    const int ny = std::max(1, static_cast<int>(std::lround(dom.height() / h)));
    const double sx = dom.width() / nx;
    const double sy = dom.height() / ny;
    const double probe = h / 3.0;

    std::vector<Vec2> holes;
    for (int cy = 0; cy < ny; ++cy)
        for (int cx = 0; cx < nx; ++cx) {
            const Vec2 c{dom.xmin + (cx + 0.5) * sx, dom.ymin + (cy + 0.5) * sy};
            if (cloud.indices_near(c, probe).empty()) holes.push_back(c);
        }
    if (holes.empty()) return 0;

    const auto& ps = cloud.particles();
    GatheredFields g = gather_fields(cloud);
    std::vector<Particle> planned;
    planned.reserve(holes.size());
    for (const Vec2& pos : holes) {
        // Phase of the insertion comes from the nearest interior particle.
        std::size_t nearest = ps.size();
        double best_d2 = 4.0 * h * h;
        for (std::size_t k : cloud.indices_near(pos, 2.0 * h)) {
            if (ps[k].is_wall()) continue;
            double d2 = (ps[k].pos - pos).norm2();
            if (d2 < best_d2 || (nearest == ps.size() && d2 <= best_d2)) {
                nearest = k;
                best_d2 = d2;
            }
        }
        if (nearest == ps.size())
            throw VoidFillError("void cell at (" + std::to_string(pos.x) + ", " +
                                std::to_string(pos.y) +
                                ") has no interior particle within 2h to copy a phase from");
        Particle np;
        np.kind = Kind::Interior;
        np.color = ps[nearest].color;
        np.pos = pos;
        np.vel.x = field_at(cloud, pos, g.u, 0.0);
        np.vel.y = field_at(cloud, pos, g.v, 0.0);
        np.pressure = field_at(cloud, pos, g.p, 0.0);
        assign_material(np, cfg);
        planned.push_back(np);
    }
    for (const Particle& np : planned) cloud.add_particle(np);
    cloud.rebuild_index();
    return static_cast<int>(planned.size());
}

}  // namespace

ManageReport manage_particles(ParticleCloud& cloud, const ScenarioConfig& cfg) {
    ManageReport rep;
    rep.merged = merge_pass(cloud, cfg);
    rep.filled = fill_pass(cloud, cfg);
    return rep;
}

Stepper::Stepper(const ScenarioConfig& cfg) : cfg_(cfg), cloud_(ParticleCloud::seed(cfg)) {}

Stepper::Stepper(const ScenarioConfig& cfg, ParticleCloud cloud)
    : cfg_(cfg), cloud_(std::move(cloud)) {
    cloud_.rebuild_index();
}

StepReport Stepper::step() {
    StepReport rep;
    const double dt = cfg_.dt;
    auto& ps = cloud_.particles();
    const std::size_t n = ps.size();

    cloud_.rebuild_index();
    NeighborTable table = NeighborTable::build(cloud_);
    StencilCache stencils = StencilCache::build(cloud_, table);

    // Interface geometry and capillary force on the current configuration.
    InterfaceParams ip;
    ip.theta_rad = cfg_.theta_rad();
    ip.beta = cfg_.beta;
    ip.color_smooth_iters = cfg_.color_smooth_iters;
    iface_ = build_interface_field(cloud_, table, stencils, ip);
    std::vector<Vec2> fs = surface_tension_force(cloud_, iface_, cfg_.sigma);

    // Smoothed material fields; strong phase contrasts get extra rounds.
    std::vector<double> rho_s(n), mu_s(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho_s[i] = ps[i].rho;
        mu_s[i] = ps[i].mu;
    }
    rho_s = shepard_smooth(cloud_, table, std::move(rho_s),
                           cfg_.material_iters_for(ratio(cfg_.rho_liquid, cfg_.rho_gas)));
    mu_s = shepard_smooth(cloud_, table, std::move(mu_s),
                          cfg_.material_iters_for(ratio(cfg_.mu_liquid, cfg_.mu_gas)));
    for (std::size_t i = 0; i < n; ++i) {
        ps[i].rho_smooth = rho_s[i];
        ps[i].mu_smooth = mu_s[i];
        ps[i].color_smooth = iface_.color_smooth[i];
    }

    GatheredFields g = gather_fields(cloud_);
    std::vector<Vec2> v_old(n);
    for (std::size_t i = 0; i < n; ++i) v_old[i] = ps[i].vel;

    // Predictor: viscous stresses, gravity and capillary force, no pressure.
    std::vector<double> us(n, 0.0), vs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (ps[i].is_wall()) continue;  // no-slip walls stay pinned
        DerivativeApprox du, dv;
        stencils.apply2(cloud_, table, i, g.u, g.v, du, dv);
        DerivativeApprox dmu = stencils.apply(cloud_, table, i, mu_s);

        double dxx = du.ddx;
        double dyy = dv.ddy;
        double dxy = 0.5 * (du.ddy + dv.ddx);
        Vec2 stress{2.0 * (dmu.ddx * dxx + dmu.ddy * dxy),
                    2.0 * (dmu.ddx * dxy + dmu.ddy * dyy)};
        Vec2 lap{mu_s[i] * du.laplacian(), mu_s[i] * dv.laplacian()};

        double rho_m = cfg_.smoothed_density_in_momentum ? rho_s[i] : ps[i].rho;
        Vec2 accel = (stress + lap + fs[i]) / rho_m + cfg_.gravity;
        us[i] = g.u[i] + dt * accel.x;
        vs[i] = g.v[i] + dt * accel.y;
    }

    // Divergence of the predictor field drives the pressure equation.
    std::vector<double> div_star(n, 0.0);
    double acc_star = 0.0;
    std::size_t n_int = 0;
    DerivativeApprox da, db;
    for (std::size_t i = 0; i < n; ++i) {
        if (ps[i].is_wall()) continue;
        stencils.apply2(cloud_, table, i, us, vs, da, db);
        div_star[i] = da.ddx + db.ddy;
        acc_star += div_star[i] * div_star[i];
        ++n_int;
    }
    rep.div_star_rms = n_int ? std::sqrt(acc_star / static_cast<double>(n_int)) : 0.0;

    // Pressure solve, warm-started from the previous pressure. The
    // per-phase offset (capillary jump) relaxes extremely slowly under
    // strong density contrasts, so a cold start gets seeded with the jump
    // the interface force is about to impose: p0 = sigma * kappa_bar * c.
    std::vector<double> pressure = g.p;
    double p_abs = 0.0;
    for (double p : pressure) p_abs = std::max(p_abs, std::fabs(p));
    if (p_abs == 0.0 && cfg_.sigma > 0.0) {
        double wsum = 0.0, ksum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!iface_.has_normal[i]) continue;
            wsum += iface_.delta_s[i];
            ksum += iface_.delta_s[i] * iface_.kappa[i];
        }
        if (wsum > 0.0) {
            const double jump = cfg_.sigma * ksum / wsum;
            for (std::size_t i = 0; i < n; ++i)
                pressure[i] = jump * iface_.color_smooth[i];
        }
    }
    std::vector<double> div_cur(n, 0.0);
    double div_rms_cur = 0.0;
    auto refresh_div = [&]() {
        double acc = 0.0;
        DerivativeApprox fu, fv;
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) { div_cur[i] = 0.0; continue; }
            stencils.apply2(cloud_, table, i, us, vs, fu, fv);
            div_cur[i] = fu.ddx + fv.ddy;
            acc += div_cur[i] * div_cur[i];
        }
        div_rms_cur = n_int ? std::sqrt(acc / static_cast<double>(n_int)) : 0.0;
    };
    const PressureSystem psys = PressureSystem::build(cloud_, table, stencils);
    const PressureSolveReport psr0 =
        psys.solve(div_star, dt, cfg_.eps_solver, cfg_.max_sweeps, pressure);
    rep.solver_sweeps += psr0.sweeps;
    rep.solver_stalled = psr0.stalled;
    ++rep.projection_iters;
    for (std::size_t i = 0; i < n; ++i) {
        if (ps[i].is_wall()) continue;
        Vec2 gp = stencils.apply(cloud_, table, i, pressure).gradient();
        us[i] -= dt / rho_s[i] * gp.x;
        vs[i] -= dt / rho_s[i] * gp.y;
    }

    // Blend the corrected field toward its local quadratic fit. The
    // residual divergence the projection cannot reach lives at the stencil
    // scale; without a decay channel it accumulates in the weakly viscous
    // liquid over hundreds of steps and eventually moves particles. The fit
    // reproduces smooth velocity exactly through second order, so the blend
    // drains exactly the noise component (a plain weighted average here
    // would act as a large artificial viscosity and visibly brake contact
    // lines). It runs before the extra projection passes below so they also
    // clean up the divergence the blend itself introduces.
    if (cfg_.vel_blend > 0.0) {
        const ValueFitCache vfit = ValueFitCache::build(cloud_, table);
        std::vector<double> fu(n, 0.0), fv(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) continue;
            vfit.fitted2(table, static_cast<int>(i), us, vs, fu[i], fv[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) continue;
            us[i] += cfg_.vel_blend * (fu[i] - us[i]);
            vs[i] += cfg_.vel_blend * (fv[i] - vs[i]);
        }
    }

    refresh_div();

    // One solve leaves an O(1) residual divergence near the interface
    // because the assembled equation row and the composition of gradient
    // stencils truncate differently, so the solve repeats on the remaining
    // divergence. Each extra pass scales its velocity update by the step
    // length that minimizes ||div v||, which both accelerates the
    // contraction and makes it monotone: alpha = 0 is always in range, so a
    // useless direction cannot make things worse.
    const int kExtraPasses = 7;
    const double div_target = 0.18 * rep.div_star_rms;
    if (inc_warm_.size() != static_cast<std::size_t>(kExtraPasses) ||
        (!inc_warm_.empty() && inc_warm_[0].size() != n))
        inc_warm_.assign(kExtraPasses, std::vector<double>(n, 0.0));
    const double inc_eps = std::max(cfg_.eps_solver, 1e-3);
    const int inc_sweeps = std::min(cfg_.max_sweeps, 3000);
    std::vector<double> du(n, 0.0), dv(n, 0.0), ddiv(n, 0.0);
    for (int pass = 0; pass < kExtraPasses; ++pass) {
        if (div_rms_cur <= div_target || div_rms_cur == 0.0) break;
        std::vector<double>& phi = inc_warm_[pass];
        const PressureSolveReport psr =
            psys.solve(div_cur, dt, inc_eps, inc_sweeps, phi);
        rep.solver_sweeps += psr.sweeps;
        rep.solver_stalled = rep.solver_stalled || psr.stalled;
        ++rep.projection_iters;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) { du[i] = dv[i] = ddiv[i] = 0.0; continue; }
            Vec2 gp = stencils.apply(cloud_, table, i, phi).gradient();
            du[i] = -dt / rho_s[i] * gp.x;
            dv[i] = -dt / rho_s[i] * gp.y;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) continue;
            stencils.apply2(cloud_, table, i, du, dv, da, db);
            ddiv[i] = da.ddx + db.ddy;
            num += div_cur[i] * ddiv[i];
            den += ddiv[i] * ddiv[i];
        }
        if (den <= 0.0) break;
        const double alpha = -num / den;
        if (alpha <= 0.0) break;  // direction does not reduce ||div||
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            us[i] += alpha * du[i];
            vs[i] += alpha * dv[i];
            pressure[i] += alpha * phi[i];
            // div is linear in v, so the pass updates it in place
            div_cur[i] += alpha * ddiv[i];
            acc += div_cur[i] * div_cur[i];
        }
        div_rms_cur = n_int ? std::sqrt(acc / static_cast<double>(n_int)) : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) ps[i].pressure = pressure[i];

    // The reported divergence is measured on the field the step hands on,
    // through the stencils; the in-place updates above track it only up to
    // roundoff.
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ps[i].is_wall()) continue;
            stencils.apply2(cloud_, table, i, us, vs, da, db);
            acc += (da.ddx + db.ddy) * (da.ddx + db.ddy);
        }
        div_rms_cur = n_int ? std::sqrt(acc / static_cast<double>(n_int)) : 0.0;
    }
    rep.div_rms = div_rms_cur;

    std::vector<Vec2> v_new(n, Vec2{});
    for (std::size_t i = 0; i < n; ++i)
        if (!ps[i].is_wall()) v_new[i] = Vec2{us[i], vs[i]};

    // Move with the pre-projection velocity by default; the corrected field
    // is available as an option.
    const bool move_with_new = cfg_.advect_with == AdvectWith::CorrectedVelocity;
    const double eps_x = 1e-3 * cfg_.dx0();
    for (std::size_t i = 0; i < n; ++i) {
        if (ps[i].is_wall()) continue;
        Vec2 v_move = move_with_new ? v_new[i] : v_old[i];
        ps[i].pos += dt * v_move;
        ps[i].vel = v_new[i];
        rep.max_velocity = std::max(rep.max_velocity, ps[i].vel.norm());

        double cx = std::clamp(ps[i].pos.x, cfg_.domain.xmin + eps_x, cfg_.domain.xmax - eps_x);
        double cy = std::clamp(ps[i].pos.y, cfg_.domain.ymin + eps_x, cfg_.domain.ymax - eps_x);
        if (cx != ps[i].pos.x || cy != ps[i].pos.y) {
            ps[i].pos = {cx, cy};
            ++rep.clamped;
        }
    }
    cloud_.rebuild_index();

    if (cfg_.management) {
        ManageReport mr = manage_particles(cloud_, cfg_);
        rep.particles_merged = mr.merged;
        rep.particles_filled = mr.filled;
    }

    for (const auto& p : cloud_.particles()) {
        if (p.is_wall()) continue;
        if (p.color == Phase::Liquid)
            ++rep.n_liquid;
        else
            ++rep.n_gas;
    }

    t_ += dt;
    ++steps_;
    rep.t = t_;
    return rep;
}

}  // namespace fpm
