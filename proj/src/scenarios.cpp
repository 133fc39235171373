// SPDX-License-Identifier: Apache-2.0
#include "fpm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpm/errors.hpp"

namespace fpm {

using std::numbers::pi;

CapGeometry cap_geometry(double R0, double theta_rad) {
    if (!(R0 > 0)) throw ConfigError("cap geometry requires R0 > 0");
    if (!(theta_rad > 0) || !(theta_rad < pi))
        throw ConfigError("cap geometry requires a contact angle in (0, pi)");
    const double st = std::sin(theta_rad);
    const double ct = std::cos(theta_rad);
    CapGeometry g;
    g.R = R0 * std::sqrt(pi / (2.0 * (theta_rad - st * ct)));
    g.H = g.R * (1.0 - ct);
    g.L = 2.0 * g.R * st;
    return g;
}

double eotvos_number(double rho_l, double g, double R0, double sigma) {
    return rho_l * g * R0 * R0 / sigma;
}

double gravity_for_eotvos(double Eo, double rho_l, double R0, double sigma) {
    return Eo * sigma / (rho_l * R0 * R0);
}

GravityAsymptotics gravity_asymptotics(double R0, double theta_rad,
                                       double sigma, double rho_l, double g) {
    GravityAsymptotics a;
    a.H0 = cap_geometry(R0, theta_rad).H;
    a.H_inf = (g > 0) ? 2.0 * std::sqrt(sigma / (rho_l * g)) *
                            std::sin(0.5 * theta_rad)
                      : std::numeric_limits<double>::infinity();
    return a;
}

// --- manufactured diffusion -----------------------------------------------
//
// Both cases share the structure phi = s(x,y) / k, where s carries a factor
// that vanishes on the material interface. Then k * grad(phi) = grad(s) is
// continuous, and f = div(k grad phi) = lap(s) in each constant-k region.

namespace {

constexpr double kInclusionRadius = 0.1;  // example 2 ellipse size

double shape_fn(int example, const Vec2& p) {
    const double u = std::sin(0.5 * pi * p.x);
    const double r2 = 1.0 + p.x * p.x + p.y * p.y;
    if (example == 1)
        return u * (p.x - 0.5) * (p.y - 0.5) * r2;
    const double E = (p.x - 0.5) * (p.x - 0.5) +
                     4.0 * (p.y - 0.5) * (p.y - 0.5) -
                     kInclusionRadius * kInclusionRadius;
    return u * E * r2;
}

double shape_laplacian(int example, const Vec2& p) {
    const double x = p.x, y = p.y;
    const double u = std::sin(0.5 * pi * x);
    const double up = 0.5 * pi * std::cos(0.5 * pi * x);
    const double upp = -0.25 * pi * pi * u;
    const double r2 = 1.0 + x * x + y * y;
    if (example == 1) {
        const double P = x - 0.5, Q = y - 0.5;
        const double sxx =
            Q * (upp * P * r2 + 2.0 * up * r2 + 4.0 * x * up * P + 4.0 * x * u +
                 2.0 * u * P);
        const double syy = u * P * (4.0 * y + 2.0 * Q);
        return sxx + syy;
    }
    const double E = (x - 0.5) * (x - 0.5) + 4.0 * (y - 0.5) * (y - 0.5) -
                     kInclusionRadius * kInclusionRadius;
    const double Ex = 2.0 * (x - 0.5);
    const double Ey = 8.0 * (y - 0.5);
    const double sxx = upp * E * r2 + 2.0 * up * Ex * r2 + 4.0 * x * up * E +
                       2.0 * u * r2 + 4.0 * x * u * Ex + 2.0 * u * E;
    const double syy = u * (8.0 * r2 + 4.0 * y * Ey + 2.0 * E);
    return sxx + syy;
}

}  // namespace

double DiffusionCase::k_at(const Vec2& p) const {
    if (example == 1) return p.x <= 0.5 ? 1000.0 : 1.0;
    const double E = (p.x - 0.5) * (p.x - 0.5) +
                     4.0 * (p.y - 0.5) * (p.y - 0.5) -
                     kInclusionRadius * kInclusionRadius;
    return E < 0.0 ? 1000.0 : 1.0;
}

double DiffusionCase::exact(const Vec2& p) const {
    return shape_fn(example, p) / k_at(p);
}

double DiffusionCase::source(const Vec2& p) const {
    return shape_laplacian(example, p);
}

DiffusionCase manufactured_diffusion(int example) {
    if (example != 1 && example != 2)
        throw ConfigError("manufactured diffusion case must be 1 or 2, got " +
                          std::to_string(example));
    return DiffusionCase{example};
}

// --- diagnostics -----------------------------------------------------------

Diagnostics compute_diagnostics(const ParticleCloud& cloud, double t) {
    Diagnostics d;
    d.t = t;
    d.n = cloud.size();
    double xmin = 0, xmax = 0, ymax = 0;
    double p_liq = 0, p_gas = 0;
    std::size_t n_liq = 0, n_gas = 0;
    bool first = true;
    const double cell_area = cloud.dx0() * cloud.dx0();
    for (const auto& p : cloud.particles()) {
        if (p.is_wall()) continue;
        if (p.is_liquid()) {
            if (first) {
                xmin = xmax = p.pos.x;
                ymax = p.pos.y;
                first = false;
            } else {
                xmin = std::min(xmin, p.pos.x);
                xmax = std::max(xmax, p.pos.x);
                ymax = std::max(ymax, p.pos.y);
            }
            d.ke += 0.5 * p.rho * p.vel.norm2() * cell_area;
            p_liq += p.pressure;
            ++n_liq;
        } else {
            p_gas += p.pressure;
            ++n_gas;
        }
    }
    if (n_liq > 0) {
        d.L = xmax - xmin;
        d.H = ymax;
    }
    if (n_liq > 0 && n_gas > 0)
        d.dp = p_liq / n_liq - p_gas / n_gas;
    return d;
}

// --- builtin catalog --------------------------------------------------------

namespace {

ScenarioConfig sessile_base() {
    ScenarioConfig c;
    c.rho_liquid = 797.88;  // ethanol
    c.mu_liquid = 0.0018;
    c.rho_gas = 1.0;
    c.mu_gas = 0.01;
    c.sigma = 0.02361;
    c.h = 0.005;
    c.dt = 5e-5;
    return c;
}

ScenarioConfig wall_adhesion(double theta_deg, double fill) {
    ScenarioConfig c;
    c.domain = {0.0, 0.112, 0.0, 0.152};
    c.phase.shape = PhaseShape::HalfPlane;
    c.phase.y_fill = fill;
    c.rho_liquid = 1000.0;
    c.mu_liquid = 0.0091;
    c.rho_gas = 1.0;
    c.mu_gas = 1.86e-5;
    c.sigma = 0.072;
    c.theta_deg = theta_deg;
    c.h = 0.004;
    c.dt = 2e-4;
    c.t_end = 3.0;
    return c;
}

ScenarioConfig sessile_rect(double theta_deg) {
    ScenarioConfig c = sessile_base();
    c.domain = {0.0, 0.4, 0.0, 0.12};
    c.phase.shape = PhaseShape::Rectangle;
    c.phase.box = {0.15, 0.25, 0.0, 0.06};
    c.theta_deg = theta_deg;
    c.t_end = 10.0;
    return c;
}

ScenarioConfig sessile_circle(double theta_deg) {
    ScenarioConfig c = sessile_base();
    c.domain = {0.0, 0.3, 0.0, 0.123};
    c.phase.shape = PhaseShape::Semicircle;
    c.phase.center = {0.15, 0.0};
    c.phase.radius = 0.06;
    c.mu_liquid = 0.1;  // stiffer liquid so equilibrium is reached quickly
    c.theta_deg = theta_deg;
    c.t_end = 15.0;
    return c;
}

ScenarioConfig sessile_gravity(double Eo) {
    ScenarioConfig c = sessile_circle(130.0);
    c.gravity = {0.0, -gravity_for_eotvos(Eo, c.rho_liquid, c.phase.radius,
                                          c.sigma)};
    if (Eo > 12.0) {  // wide puddles need a wider tank
        c.domain = {0.0, 0.6, 0.0, 0.123};
        c.phase.center = {0.3, 0.0};
    }
    return c;
}

const std::vector<std::pair<std::string, ScenarioConfig (*)()>>& catalog() {
    static const std::vector<std::pair<std::string, ScenarioConfig (*)()>> c = {
        {"wall-adhesion-175", [] { return wall_adhesion(175.0, 0.02); }},
        {"wall-adhesion-5", [] { return wall_adhesion(5.0, 0.05); }},
        {"sessile-rect-30", [] { return sessile_rect(30.0); }},
        {"sessile-rect-60", [] { return sessile_rect(60.0); }},
        {"sessile-rect-90", [] { return sessile_rect(90.0); }},
        {"sessile-rect-120", [] { return sessile_rect(120.0); }},
        {"sessile-rect-150", [] { return sessile_rect(150.0); }},
        {"sessile-circle-30", [] { return sessile_circle(30.0); }},
        {"sessile-circle-60", [] { return sessile_circle(60.0); }},
        {"sessile-circle-90", [] { return sessile_circle(90.0); }},
        {"sessile-circle-120", [] { return sessile_circle(120.0); }},
        {"sessile-circle-150", [] { return sessile_circle(150.0); }},
        {"sessile-gravity-eo0.12", [] { return sessile_gravity(0.12); }},
        {"sessile-gravity-eo1.2", [] { return sessile_gravity(1.2); }},
        {"sessile-gravity-eo12", [] { return sessile_gravity(12.0); }},
        {"sessile-gravity-eo25", [] { return sessile_gravity(25.0); }},
    };
    return c;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, make] : catalog()) names.push_back(name);
    return names;
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& [n, make] : catalog())
        if (n == name) return true;
    return false;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    for (const auto& [n, make] : catalog())
        if (n == name) {
            ScenarioConfig c = make();
            c.name = name;
            return c;
        }
    std::ostringstream os;
    os << "unknown scenario '" << name << "'; available:";
    for (const auto& [n, make] : catalog()) os << ' ' << n;
    throw ConfigError(os.str());
}

}  // namespace fpm
