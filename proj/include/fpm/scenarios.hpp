// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fpm/particle_cloud.hpp"
#include "fpm/scenario_config.hpp"

namespace fpm {

// Equilibrium circular-cap shape of a sessile drop that starts as a
// half-disk of radius R0 and meets the wall at contact angle theta. Area
// conservation fixes the cap radius R; H and L are the apex height and the
// wetted width between the two contact points.
struct CapGeometry {
    double R = 0, H = 0, L = 0;
};
CapGeometry cap_geometry(double R0, double theta_rad);

// Pressure jump across a circular interface of radius R.
inline double laplace_delta_p(double sigma, double R) { return sigma / R; }

double eotvos_number(double rho_l, double g, double R0, double sigma);
double gravity_for_eotvos(double Eo, double rho_l, double R0, double sigma);

// Sessile-drop height limits under gravity: H0 is the zero-gravity cap
// height, H_inf the strong-gravity puddle height 2 sqrt(sigma/(rho_l g))
// sin(theta/2).
struct GravityAsymptotics {
    double H0 = 0;
    double H_inf = 0;
};
GravityAsymptotics gravity_asymptotics(double R0, double theta_rad,
                                       double sigma, double rho_l, double g);

// Manufactured two-material diffusion problem div(k grad phi) = f on the
// unit square with piecewise-constant k. phi is continuous across the
// material interface with continuous normal flux, and vanishes on it, so
// the discontinuity only enters through k.
//   example 1: vertical interface x = 0.5, k = 1000 left / 1 right
//   example 2: elliptic inclusion (x-.5)^2 + 4(y-.5)^2 = 0.1^2, k = 1000 inside
struct DiffusionCase {
    int example = 1;
    double k_at(const Vec2& p) const;
    double exact(const Vec2& p) const;   // phi
    double source(const Vec2& p) const;  // f, analytic
};
DiffusionCase manufactured_diffusion(int example);

// Scalar per-step observables of a two-phase run. Extents, height and
// kinetic energy are taken over interior liquid particles; dp compares
// interior phase means.
struct Diagnostics {
    double t = 0;
    double L = 0;
    double H = 0;
    double dp = 0;
    double ke = 0;
    std::size_t n = 0;  // total particle count
};
Diagnostics compute_diagnostics(const ParticleCloud& cloud, double t);

// Builtin scenario catalog (wall adhesion, rectangular and circular sessile
// drops, sessile drops under gravity).
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

}  // namespace fpm
