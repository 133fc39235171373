// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fpm {

// Invalid or inconsistent user-supplied configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A least-squares stencil could not be built (too few neighbors or a
// degenerate neighbor geometry).  Carries the offending particle id.
struct StencilError : std::runtime_error {
    int particle_id;
    StencilError(int id, const std::string& msg)
        : std::runtime_error(msg), particle_id(id) {}
};

// Iterative linear solve did not reach the requested tolerance.
struct SolveError : std::runtime_error {
    double final_change;
    SolveError(double change, const std::string& msg)
        : std::runtime_error(msg), final_change(change) {}
};

// Particle management found a hole it cannot repair.
struct VoidFillError : std::runtime_error {
    explicit VoidFillError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal invariant broken (stale neighbor index, id lookup miss, ...).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace fpm
