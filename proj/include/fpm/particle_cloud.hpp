// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fpm/particle.hpp"
#include "fpm/scenario_config.hpp"

namespace fpm {

// Truncated Gaussian interaction weight. r2 is the squared distance;
// support is the closed ball of radius h.
inline double gaussian_weight(double r2, double h, double alpha) {
    if (r2 > h * h) return 0.0;
    return std::exp(-alpha * r2 / (h * h));
}

// Particle container plus a uniform spatial hash with cell side h, so a
// radius-h neighbor query only touches the 3x3 cell block around a point.
// Particles are kept sorted by id; ids are never reused.
class ParticleCloud {
  public:
    ParticleCloud(Rect domain, double h, double dx0, double alpha = 6.25);

    // Lays out interior particles on a dx0 lattice (spacing adjusted so the
    // lattice tiles the domain exactly) plus one layer of wall particles on
    // the boundary at the same spacing. Colors come from cfg.phase.
    static ParticleCloud seed(const ScenarioConfig& cfg);

    const std::vector<Particle>& particles() const { return ps_; }
    std::vector<Particle>& particles() { return ps_; }
    std::size_t size() const { return ps_.size(); }

    double h() const { return h_; }
    double dx0() const { return dx0_; }
    double alpha() const { return alpha_; }
    const Rect& domain() const { return domain_; }

    int index_of(int id) const;          // throws InternalError on miss
    const Particle& by_id(int id) const { return ps_[index_of(id)]; }

    // The spatial index must be rebuilt after any particle motion,
    // insertion or removal before neighbor queries are allowed again.
    void rebuild_index();
    void invalidate_index() { index_valid_ = false; }
    bool index_valid() const { return index_valid_; }

    // Ids of all particles j != i within distance h of particle `id`,
    // ascending.
    std::vector<int> neighbors(int id) const;

    // Indices (into particles()) within `radius` of an arbitrary point,
    // ascending. Includes every particle in the ball, point need not be a
    // particle.
    std::vector<int> indices_near(const Vec2& p, double radius) const;

    // Appends a particle, assigning it a fresh id (larger than all existing).
    // Invalidates the index.
    int add_particle(Particle p);

    // Removes particles at the given indices (need not be sorted).
    // Invalidates the index.
    void remove_by_indices(std::vector<std::size_t> indices);

    std::size_t count(Kind kind) const;
    std::size_t count(Phase phase, Kind kind) const;

  private:
    void require_index() const;
    int cell_x(double x) const;
    int cell_y(double y) const;

    Rect domain_;
    double h_, dx0_, alpha_;
    std::vector<Particle> ps_;
    int next_id_ = 0;

    int ncx_ = 0, ncy_ = 0;
    std::vector<std::vector<int>> cells_;
    bool index_valid_ = false;
};

}  // namespace fpm
