// SPDX-License-Identifier: Apache-2.0
#include "fpm/interface_csf.hpp"

#include <algorithm>
#include <cmath>

#include "fpm/detail/sym_solve.hpp"
#include "fpm/errors.hpp"

namespace fpm {

std::vector<double> smoothed_color(const ParticleCloud& cloud, const NeighborTable& table,
                                   int iterations) {
    const auto& ps = cloud.particles();
    std::vector<double> c(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) c[i] = static_cast<double>(ps[i].color);
    return shepard_smooth(cloud, table, std::move(c), iterations);
}

void interface_normals(const ParticleCloud& cloud, const NeighborTable& table,
                       const StencilCache& stencils, InterfaceField& field) {
    const auto& ps = cloud.particles();
    const std::size_t n = ps.size();
    field.grad_c.assign(n, Vec2{});
    field.has_normal.assign(n, 0);
    field.normal.assign(n, Vec2{});
    field.corrected.assign(n, 0);

    int cmin = static_cast<int>(Phase::Liquid), cmax = static_cast<int>(Phase::Gas);
    for (const auto& p : ps) {
        cmin = std::min(cmin, static_cast<int>(p.color));
        cmax = std::max(cmax, static_cast<int>(p.color));
    }
    field.grad_threshold = 0.01 * static_cast<double>(cmax - cmin) / cloud.h();
    if (cmax == cmin) return;  // single phase, no interface anywhere

    for (std::size_t i = 0; i < n; ++i) {
        DerivativeApprox d = stencils.apply(cloud, table, i, field.color_smooth);
        field.grad_c[i] = d.gradient();
        double mag = field.grad_c[i].norm();
        if (mag > field.grad_threshold) {
            field.has_normal[i] = 1;
            field.normal[i] = field.grad_c[i] / mag;
        }
    }
}

namespace {

// Wall particle whose neighborhood (self included) holds both phases.
std::vector<char> contact_line_walls(const ParticleCloud& cloud, const NeighborTable& table) {
    const auto& ps = cloud.particles();
    std::vector<char> mark(ps.size(), 0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i].is_wall()) continue;
        bool liquid = ps[i].color == Phase::Liquid;
        bool gas = ps[i].color == Phase::Gas;
        const int ii = static_cast<int>(i);
        for (int k = table.begin(ii); k < table.end(ii) && !(liquid && gas); ++k) {
            const auto& q = ps[table.nbr[k]];
            liquid = liquid || q.color == Phase::Liquid;
            gas = gas || q.color == Phase::Gas;
        }
        if (liquid && gas) mark[i] = 1;
    }
    return mark;
}

}  // namespace

void apply_contact_angle(const ParticleCloud& cloud, const NeighborTable& table,
                         double theta_rad, double beta, InterfaceField& field) {
    const auto& ps = cloud.particles();
    std::vector<char> at_line = contact_line_walls(cloud, table);
    bool any = std::find(at_line.begin(), at_line.end(), char(1)) != at_line.end();
    if (!any) return;

    const double band_radius = beta * cloud.h();
    const double cos_t = std::cos(theta_rad);
    const double sin_t = std::sin(theta_rad);

    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!field.has_normal[i]) continue;

        // Nearest contact-line wall particle within the band; scan order is
        // ascending id so ties resolve to the smallest id.
        std::size_t best = ps.size();
        double best_d2 = band_radius * band_radius;
        for (std::size_t k : cloud.indices_near(ps[i].pos, band_radius)) {
            if (!at_line[k]) continue;
            double d2 = (ps[k].pos - ps[i].pos).norm2();
            if (d2 < best_d2 || (best == ps.size() && d2 <= best_d2)) {
                best = k;
                best_d2 = d2;
            }
        }
        if (best == ps.size()) continue;

        Vec2 nw = ps[best].wall_normal;  // unit, points into the fluid
        Vec2 ni = field.normal[i];
        Vec2 tang = ni - ni.dot(nw) * nw;
        double tm = tang.norm();
        if (tm < 1e-12) continue;  // normal parallel to the wall normal, direction ambiguous
        tang = tang / tm;

        field.normal[i] = cos_t * nw + sin_t * tang;
        field.corrected[i] = 1;
    }
}

void curvature_and_delta(const ParticleCloud& cloud, const NeighborTable& table,
                         InterfaceField& field) {
    const auto& ps = cloud.particles();
    const std::size_t n = ps.size();
    field.kappa.assign(n, 0.0);
    field.delta_s.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        if (!field.has_normal[i]) continue;
        field.delta_s[i] = field.grad_c[i].norm();

        // Divergence of the unit normal from a least-squares fit restricted
        // to neighbors that carry a normal; others hold no meaningful value.
        double A[5][5] = {};
        double bx[5] = {};
        double by[5] = {};
        int used = 0;
        const int ii = static_cast<int>(i);
        for (int k = table.begin(ii); k < table.end(ii); ++k) {
            const int j = table.nbr[k];
            if (!field.has_normal[j]) continue;
            double m[5];
            taylor_row(table.dx[k], table.dy[k], m);
            for (int r = 0; r < 5; ++r) {
                for (int c = r; c < 5; ++c) A[r][c] += table.w[k] * m[r] * m[c];
                bx[r] += table.w[k] * m[r] * (field.normal[j].x - field.normal[i].x);
                by[r] += table.w[k] * m[r] * (field.normal[j].y - field.normal[i].y);
            }
            ++used;
        }
        if (used < 5) continue;  // curvature left at zero, too little support
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < r; ++c) A[r][c] = A[c][r];

        detail::SymFactor<5> f;
        if (!f.factor(A, detail::kCondLimit)) continue;
        double ax[5], ay[5];
        f.solve(bx, ax);
        f.solve(by, ay);
        field.kappa[i] = -(ax[0] + ay[1]);
    }

    // One delta-weighted averaging pass along the band. The raw divergence
    // of the normals oscillates at the stencil scale, worst at the contact
    // line where the stencils are one-sided; the force inherits the noise
    // and leaves divergence behind that the pressure cannot cancel.
    std::vector<double> smoothed(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!field.has_normal[i]) continue;
        double acc = 0.0, wsum = 0.0;
        const int ii = static_cast<int>(i);
        for (int k = table.begin(ii); k < table.end(ii); ++k) {
            const int j = table.nbr[k];
            if (!field.has_normal[j]) continue;
            const double w = table.w[k] * field.delta_s[j];
            acc += w * field.kappa[j];
            wsum += w;
        }
        const double wi = field.delta_s[i];  // self term
        acc += wi * field.kappa[i];
        wsum += wi;
        smoothed[i] = wsum > 0.0 ? acc / wsum : field.kappa[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        if (field.has_normal[i]) field.kappa[i] = smoothed[i];
}

InterfaceField build_interface_field(const ParticleCloud& cloud, const NeighborTable& table,
                                     const StencilCache& stencils,
                                     const InterfaceParams& params) {
    InterfaceField field;
    field.color_smooth = smoothed_color(cloud, table, params.color_smooth_iters);
    interface_normals(cloud, table, stencils, field);
    apply_contact_angle(cloud, table, params.theta_rad, params.beta, field);
    curvature_and_delta(cloud, table, field);
    return field;
}

std::vector<Vec2> surface_tension_force(const ParticleCloud& cloud, const InterfaceField& field,
                                        double sigma) {
    std::vector<Vec2> force(cloud.particles().size(), Vec2{});
    for (std::size_t i = 0; i < force.size(); ++i) {
        if (!field.has_normal[i]) continue;
        // kappa * grad(c~): the prescribed contact angle acts through the
        // curvature only. Using the rotated direction in the force as well
        // adds a non-gradient component at the contact line that no
        // pressure can counter, and the projection residual parks there.
        force[i] = sigma * field.kappa[i] * field.grad_c[i];
    }
    return force;
}

}  // namespace fpm
