// SPDX-License-Identifier: Apache-2.0
#include "fpm/particle_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fpm/errors.hpp"

namespace fpm {

ParticleCloud::ParticleCloud(Rect domain, double h, double dx0, double alpha)
    : domain_(domain), h_(h), dx0_(dx0), alpha_(alpha) {
    ncx_ = std::max(1, static_cast<int>(std::ceil(domain_.width() / h_)));
    ncy_ = std::max(1, static_cast<int>(std::ceil(domain_.height() / h_)));
    cells_.resize(static_cast<std::size_t>(ncx_) * ncy_);
}

namespace {

Vec2 corner_normal(double nx, double ny) {
    return Vec2{nx, ny}.normalized();
}

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
    p.color_smooth = static_cast<double>(static_cast<int>(p.color));
}

}  // namespace

ParticleCloud ParticleCloud::seed(const ScenarioConfig& cfg) {
    auto violations = cfg.validate();
    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& v : violations) os << "\n  - " << v;
        throw ConfigError(os.str());
    }

    const Rect& dom = cfg.domain;
    const double dx0 = cfg.dx0();
    ParticleCloud cloud(dom, cfg.h, dx0, cfg.alpha);

    auto make = [&](Vec2 pos, Kind kind, Vec2 normal) {
        Particle p;
        p.id = cloud.next_id_++;
        p.kind = kind;
        p.pos = pos;
        p.color = cfg.phase.liquid_at(pos) ? Phase::Liquid : Phase::Gas;
        p.wall_normal = normal;
        assign_material(p, cfg);
        cloud.ps_.push_back(p);
    };

    // Interior lattice, cell-centered so no particle sits on a wall.
    const int nx = std::max(1, static_cast<int>(std::lround(dom.width() / dx0)));
    const int ny = std::max(1, static_cast<int>(std::lround(dom.height() / dx0)));
    const double sx = dom.width() / nx;
    const double sy = dom.height() / ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            make({dom.xmin + (i + 0.5) * sx, dom.ymin + (j + 0.5) * sy},
                 Kind::Interior, {});

    // One layer of wall particles on each boundary edge; corners are seeded
    // once, with the bisector of the two adjacent outward normals.
    const int nbx = std::max(1, static_cast<int>(std::lround(dom.width() / dx0)));
    const int nby = std::max(1, static_cast<int>(std::lround(dom.height() / dx0)));
    const double bx = dom.width() / nbx;
    const double by = dom.height() / nby;
    for (int i = 0; i <= nbx; ++i) {  // bottom
        Vec2 n = (i == 0)     ? corner_normal(-1, -1)
                 : (i == nbx) ? corner_normal(1, -1)
                              : Vec2{0, -1};
        make({dom.xmin + i * bx, dom.ymin}, Kind::Wall, n);
    }
    for (int i = 0; i <= nbx; ++i) {  // top
        Vec2 n = (i == 0)     ? corner_normal(-1, 1)
                 : (i == nbx) ? corner_normal(1, 1)
                              : Vec2{0, 1};
        make({dom.xmin + i * bx, dom.ymax}, Kind::Wall, n);
    }
    for (int j = 1; j < nby; ++j) {  // left, corners already placed
        make({dom.xmin, dom.ymin + j * by}, Kind::Wall, {-1, 0});
    }
    for (int j = 1; j < nby; ++j) {  // right
        make({dom.xmax, dom.ymin + j * by}, Kind::Wall, {1, 0});
    }

    cloud.rebuild_index();
    return cloud;
}

int ParticleCloud::index_of(int id) const {
    auto it = std::lower_bound(ps_.begin(), ps_.end(), id,
                               [](const Particle& p, int v) { return p.id < v; });
    if (it == ps_.end() || it->id != id)
        throw InternalError("no particle with id " + std::to_string(id));
    return static_cast<int>(it - ps_.begin());
}

int ParticleCloud::cell_x(double x) const {
    int ix = static_cast<int>(std::floor((x - domain_.xmin) / h_));
    return std::clamp(ix, 0, ncx_ - 1);
}

int ParticleCloud::cell_y(double y) const {
    int iy = static_cast<int>(std::floor((y - domain_.ymin) / h_));
    return std::clamp(iy, 0, ncy_ - 1);
}

void ParticleCloud::rebuild_index() {
    for (auto& c : cells_) c.clear();
    for (std::size_t k = 0; k < ps_.size(); ++k) {
        int ix = cell_x(ps_[k].pos.x);
        int iy = cell_y(ps_[k].pos.y);
        cells_[static_cast<std::size_t>(iy) * ncx_ + ix].push_back(
            static_cast<int>(k));
    }
    index_valid_ = true;
}

void ParticleCloud::require_index() const {
    if (!index_valid_)
        throw InternalError("neighbor query on a stale spatial index; "
                            "call rebuild_index() after moving particles");
}

std::vector<int> ParticleCloud::neighbors(int id) const {
    require_index();
    const int i = index_of(id);
    const Vec2 c = ps_[i].pos;
    std::vector<int> out;
    const double h2 = h_ * h_;
    const int cx = cell_x(c.x), cy = cell_y(c.y);
    for (int iy = std::max(0, cy - 1); iy <= std::min(ncy_ - 1, cy + 1); ++iy)
        for (int ix = std::max(0, cx - 1); ix <= std::min(ncx_ - 1, cx + 1); ++ix)
            for (int k : cells_[static_cast<std::size_t>(iy) * ncx_ + ix]) {
                if (k == i) continue;
                if ((ps_[k].pos - c).norm2() <= h2) out.push_back(ps_[k].id);
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> ParticleCloud::indices_near(const Vec2& p, double radius) const {
    require_index();
    std::vector<int> out;
    const double r2 = radius * radius;
    const int ring = std::max(1, static_cast<int>(std::ceil(radius / h_)));
    const int cx = cell_x(p.x), cy = cell_y(p.y);
    for (int iy = std::max(0, cy - ring); iy <= std::min(ncy_ - 1, cy + ring); ++iy)
        for (int ix = std::max(0, cx - ring); ix <= std::min(ncx_ - 1, cx + ring); ++ix)
            for (int k : cells_[static_cast<std::size_t>(iy) * ncx_ + ix])
                if ((ps_[k].pos - p).norm2() <= r2) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
}

int ParticleCloud::add_particle(Particle p) {
    p.id = next_id_++;
    ps_.push_back(p);
    index_valid_ = false;
    return p.id;
}

void ParticleCloud::remove_by_indices(std::vector<std::size_t> indices) {
    if (indices.empty()) return;
    std::sort(indices.begin(), indices.end());
    std::vector<Particle> kept;
    kept.reserve(ps_.size() - indices.size());
    std::size_t d = 0;
    for (std::size_t k = 0; k < ps_.size(); ++k) {
        if (d < indices.size() && indices[d] == k) {
            ++d;
            continue;
        }
        kept.push_back(ps_[k]);
    }
    ps_ = std::move(kept);
    index_valid_ = false;
}

std::size_t ParticleCloud::count(Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(ps_.begin(), ps_.end(),
                      [&](const Particle& p) { return p.kind == kind; }));
}

std::size_t ParticleCloud::count(Phase phase, Kind kind) const {
    return static_cast<std::size_t>(std::count_if(
        ps_.begin(), ps_.end(), [&](const Particle& p) {
            return p.kind == kind && p.color == phase;
        }));
}

}  // namespace fpm
