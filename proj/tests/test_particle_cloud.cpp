// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fpm/errors.hpp"
#include "fpm/particle_cloud.hpp"
#include "test_helpers.hpp"

using namespace fpm;

TEST_SUITE("particle_cloud") {

TEST_CASE("gaussian weight: unit at zero, truncated at h, frozen value at r = h") {
    const double h = 0.3;
    CHECK(gaussian_weight(0.0, h, 6.25) == 1.0);
    CHECK(gaussian_weight(h * h * 1.0000001, h, 6.25) == 0.0);
    // exp(-6.25), the weight of a neighbor exactly at the support radius
    CHECK(gaussian_weight(h * h, h, 6.25) ==
          doctest::Approx(1.9304541362277093e-3).epsilon(1e-12));
}

TEST_CASE("seeding: frozen counts, lattice inside the domain, walls on the rim") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.08));
    CHECK(cloud.size() == 1596);

    std::size_t walls = 0;
    for (const auto& p : cloud.particles()) {
        CHECK(cloud.domain().contains(p.pos));
        if (p.is_wall()) {
            ++walls;
            const bool on_rim = p.pos.x == 0.0 || p.pos.x == 1.0 ||
                                p.pos.y == 0.0 || p.pos.y == 1.0;
            CHECK(on_rim);
            CHECK(p.wall_normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
        } else {
            CHECK(p.pos.x > 0.0);
            CHECK(p.pos.x < 1.0);
            CHECK(p.pos.y > 0.0);
            CHECK(p.pos.y < 1.0);
        }
    }
    CHECK(walls == cloud.count(Kind::Wall));
    CHECK(walls + cloud.count(Kind::Interior) == cloud.size());

    // finer lattices, same domain
    CHECK(ParticleCloud::seed(testutil::unit_square(0.04)).size() == 5925);
}

TEST_CASE("seeding: phase region decides colors") {
    ScenarioConfig cfg = testutil::centered_disk(0.05, 0.25);
    ParticleCloud cloud = ParticleCloud::seed(cfg);
    for (const auto& p : cloud.particles()) {
        if (p.is_wall()) continue;
        const bool inside = (p.pos - cfg.phase.center).norm() <= cfg.phase.radius;
        CHECK(p.color == (inside ? Phase::Liquid : Phase::Gas));
        CHECK(p.rho == (inside ? cfg.rho_liquid : cfg.rho_gas));
        CHECK(p.mu == (inside ? cfg.mu_liquid : cfg.mu_gas));
    }
    CHECK(cloud.count(Phase::Liquid, Kind::Interior) > 0);
    CHECK(cloud.count(Phase::Gas, Kind::Interior) > 0);
}

TEST_CASE("deep-interior particle sees the full 28-point stencil") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.08));
    const auto& ps = cloud.particles();
    int checked = 0;
    for (const auto& p : ps) {
        if (p.is_wall()) continue;
        if (std::fabs(p.pos.x - 0.5) > 0.2 || std::fabs(p.pos.y - 0.5) > 0.2)
            continue;
        CHECK(cloud.neighbors(p.id).size() == 28);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("neighbor queries agree with brute force, including after motion") {
    ScenarioConfig cfg = testutil::unit_square(0.1);
    ParticleCloud cloud = ParticleCloud::seed(cfg);
    testutil::jitter(cloud, 0.3, 12345);

    const auto& ps = cloud.particles();
    auto brute = [&](const Vec2& c, double r) {
        std::vector<int> out;
        for (std::size_t j = 0; j < ps.size(); ++j)
            if ((ps[j].pos - c).norm2() <= r * r) out.push_back(static_cast<int>(j));
        return out;
    };

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 c{u(rng), u(rng)};
        const double r = 0.02 + 0.15 * u(rng);
        const std::vector<int> got = cloud.indices_near(c, r);
        CHECK(got == brute(c, r));
        CHECK(std::is_sorted(got.begin(), got.end()));
    }

    // per-particle variant excludes the particle itself and returns ids
    for (int trial = 0; trial < 20; ++trial) {
        const int idx = static_cast<int>(u(rng) * ps.size()) % static_cast<int>(ps.size());
        std::vector<int> got = cloud.neighbors(ps[idx].id);
        std::vector<int> want;
        for (int j : brute(ps[idx].pos, cloud.h()))
            if (j != idx) want.push_back(ps[j].id);
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("index lifecycle: queries demand a rebuild after any mutation") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    const Vec2 c{0.5, 0.5};
    CHECK(cloud.index_valid());
    CHECK(!cloud.indices_near(c, 0.2).empty());

    Particle extra;
    extra.pos = {0.51, 0.52};
    extra.rho = extra.mu = 1.0;
    cloud.add_particle(extra);
    CHECK(!cloud.index_valid());
    CHECK_THROWS_AS((void)cloud.indices_near(c, 0.2), InternalError);
    cloud.rebuild_index();
    CHECK(!cloud.indices_near(c, 0.2).empty());

    cloud.remove_by_indices({0});
    CHECK(!cloud.index_valid());
    CHECK_THROWS_AS((void)cloud.neighbors(cloud.particles()[5].id), InternalError);
}

TEST_CASE("ids are unique, ascending and never reused") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    const auto& ps = cloud.particles();
    std::set<int> ids;
    int max_id = -1;
    for (const auto& p : ps) {
        CHECK(ids.insert(p.id).second);
        max_id = std::max(max_id, p.id);
    }
    // drop a few, add one: the new id must exceed every id ever issued
    cloud.remove_by_indices({3, 1, 7});
    Particle extra;
    extra.pos = {0.4, 0.4};
    extra.rho = extra.mu = 1.0;
    const int fresh = cloud.add_particle(extra);
    CHECK(fresh > max_id);
    cloud.rebuild_index();
    CHECK(cloud.by_id(fresh).pos.x == 0.4);
    CHECK_THROWS_AS((void)cloud.index_of(max_id + 1000), InternalError);
}

TEST_CASE("wall colors copy the adjacent phase") {
    // a half-plane fill: bottom wall must be liquid-colored, top wall gas
    ScenarioConfig cfg = testutil::unit_square(0.05);
    cfg.phase.shape = PhaseShape::HalfPlane;
    cfg.phase.y_fill = 0.5;
    ParticleCloud cloud = ParticleCloud::seed(cfg);
    for (const auto& p : cloud.particles()) {
        if (!p.is_wall()) continue;
        if (p.pos.y == 0.0) CHECK(p.color == Phase::Liquid);
        if (p.pos.y == 1.0) CHECK(p.color == Phase::Gas);
    }
}

}  // TEST_SUITE
