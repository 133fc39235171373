// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "fpm/errors.hpp"
#include "fpm/ls_operators.hpp"
#include "fpm/particle_cloud.hpp"
#include "test_helpers.hpp"

using namespace fpm;

namespace {

// degree-2 polynomial with explicit derivatives
struct Poly2 {
    double c, cx, cy, cxx, cxy, cyy;
    double at(const Vec2& p) const {
        return c + cx * p.x + cy * p.y + cxx * p.x * p.x + cxy * p.x * p.y +
               cyy * p.y * p.y;
    }
    double ddx(const Vec2& p) const { return cx + 2 * cxx * p.x + cxy * p.y; }
    double ddy(const Vec2& p) const { return cy + cxy * p.x + 2 * cyy * p.y; }
    double lap() const { return 2 * cxx + 2 * cyy; }
};

Poly2 random_poly(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

std::vector<double> sample(const ParticleCloud& cloud, const Poly2& q) {
    std::vector<double> f(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        f[i] = q.at(cloud.particles()[i].pos);
    return f;
}

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

}  // namespace

TEST_SUITE("ls_operators") {

TEST_CASE("derivatives of degree-2 polynomials are exact on jittered clouds") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    testutil::jitter(cloud, 0.25, 7);
    NeighborTable table = NeighborTable::build(cloud);
    StencilCache st = StencilCache::build(cloud, table);
    const auto& ps = cloud.particles();

    std::mt19937 rng(42);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(ps.size()) - 1);
    int tested = 0;
    while (tested < 100) {
        const int i = pick(rng);
        if (ps[i].is_wall()) continue;
        const Poly2 q = random_poly(rng);
        const std::vector<double> f = sample(cloud, q);
        const DerivativeApprox d = st.apply(cloud, table, i, f);
        CHECK(rel_err(d.ddx, q.ddx(ps[i].pos)) < 1e-9);
        CHECK(rel_err(d.ddy, q.ddy(ps[i].pos)) < 1e-9);
        CHECK(rel_err(d.laplacian(), q.lap()) < 1e-9);
        CHECK(rel_err(d.d2dxdy, q.cxy) < 1e-9);
        ++tested;
    }
}

TEST_CASE("neighbor table matches per-particle queries") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::centered_disk(0.08, 0.3));
    testutil::jitter(cloud, 0.2, 3);
    NeighborTable table = NeighborTable::build(cloud);
    const auto& ps = cloud.particles();
    REQUIRE(table.offsets.size() == ps.size() + 1);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::vector<int> ids = cloud.neighbors(ps[i].id);
        REQUIRE(table.count(static_cast<int>(i)) ==
                static_cast<int>(ids.size()));
        for (int k = table.begin(static_cast<int>(i));
             k < table.end(static_cast<int>(i)); ++k) {
            const int j = table.nbr[k];
            CHECK(ps[j].id == ids[k - table.begin(static_cast<int>(i))]);
            CHECK(table.dx[k] == ps[j].pos.x - ps[i].pos.x);
            CHECK(table.dy[k] == ps[j].pos.y - ps[i].pos.y);
            const double r2 = (ps[j].pos - ps[i].pos).norm2();
            CHECK(table.w[k] ==
                  gaussian_weight(r2, cloud.h(), cloud.alpha()));
        }
    }
}

TEST_CASE("apply2 reproduces apply bit for bit") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    testutil::jitter(cloud, 0.3, 11);
    NeighborTable table = NeighborTable::build(cloud);
    StencilCache st = StencilCache::build(cloud, table);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> fa(cloud.size()), fb(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        fa[i] = u(rng);
        fb[i] = u(rng);
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.particles()[i].is_wall()) continue;
        DerivativeApprox da, db;
        st.apply2(cloud, table, static_cast<int>(i), fa, fb, da, db);
        const DerivativeApprox ra = st.apply(cloud, table, static_cast<int>(i), fa);
        const DerivativeApprox rb = st.apply(cloud, table, static_cast<int>(i), fb);
        CHECK(std::memcmp(&da, &ra, sizeof da) == 0);
        CHECK(std::memcmp(&db, &rb, sizeof db) == 0);
    }
}

TEST_CASE("one-off helpers agree with the cached path") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.12));
    testutil::jitter(cloud, 0.2, 19);
    NeighborTable table = NeighborTable::build(cloud);
    StencilCache st = StencilCache::build(cloud, table);

    std::mt19937 rng(8);
    const Poly2 q = random_poly(rng);
    std::vector<double> f = sample(cloud, q);
    std::vector<double> g(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        g[i] = std::sin(3.0 * cloud.particles()[i].pos.x);

    const auto& ps = cloud.particles();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i].is_wall()) continue;
        const DerivativeApprox d = st.apply(cloud, table, static_cast<int>(i), f);
        const DerivativeApprox e = fit_derivatives(cloud, ps[i].id, f);
        CHECK(std::fabs(d.ddx - e.ddx) < 1e-12);
        CHECK(std::fabs(d.d2dy2 - e.d2dy2) < 1e-12);
        const Vec2 gr = ls_gradient(cloud, ps[i].id, f);
        CHECK(gr.x == e.ddx);
        CHECK(gr.y == e.ddy);
        CHECK(ls_laplacian(cloud, ps[i].id, f) == e.laplacian());
        // divergence of (f, g) composed from the two fits
        const DerivativeApprox dg = fit_derivatives(cloud, ps[i].id, g);
        CHECK(std::fabs(ls_divergence(cloud, ps[i].id, f, g) -
                        (e.ddx + dg.ddy)) < 1e-12);
    }
}

TEST_CASE("too few or collinear neighbors raise StencilError") {
    // a straight chain: plenty of neighbors, but a line cannot resolve five
    // Taylor coefficients
    ParticleCloud cloud(Rect{0, 1, 0, 1}, 0.5, 0.1);
    for (int k = 0; k < 7; ++k) {
        Particle p;
        p.pos = {0.2 + 0.05 * k, 0.5};  // a straight horizontal chain
        p.rho = p.mu = 1.0;
        cloud.add_particle(p);
    }
    cloud.rebuild_index();
    std::vector<double> f(cloud.size(), 1.0);
    CHECK_THROWS_AS((void)fit_derivatives(cloud, 3, f), StencilError);

    // two lonely particles: not enough neighbors for any fit
    ParticleCloud pair(Rect{0, 1, 0, 1}, 0.5, 0.1);
    for (int k = 0; k < 2; ++k) {
        Particle p;
        p.pos = {0.4 + 0.1 * k, 0.5};
        p.rho = p.mu = 1.0;
        pair.add_particle(p);
    }
    pair.rebuild_index();
    std::vector<double> f2(pair.size(), 0.0);
    CHECK_THROWS_AS((void)fit_derivatives(pair, 0, f2), StencilError);
}

TEST_CASE("stencil status flags walls and thin stencils without throwing") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    NeighborTable table = NeighborTable::build(cloud);
    StencilCache st = StencilCache::build(cloud, table);
    int usable = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (st.status(static_cast<int>(i)) == StencilCache::Status::Ok) ++usable;
    CHECK(usable == static_cast<int>(cloud.size()));  // full lattice: all fine
}

TEST_CASE("shepard smoothing: bounds, constants, spike decay") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.08));
    NeighborTable table = NeighborTable::build(cloud);

    std::vector<double> constant(cloud.size(), 3.25);
    std::vector<double> sm = shepard_smooth(cloud, table, constant, 4);
    for (double v : sm) CHECK(v == doctest::Approx(3.25).epsilon(1e-13));

    // single spike: decays monotonically, never overshoots, stays in [0, 1]
    std::vector<double> spike(cloud.size(), 0.0);
    const std::size_t mid = cloud.size() / 2;
    spike[mid] = 1.0;
    std::vector<double> s1 = shepard_smooth(cloud, table, spike, 1);
    std::vector<double> s2 = shepard_smooth(cloud, table, spike, 2);
    CHECK(s1[mid] < 1.0);
    CHECK(s2[mid] < s1[mid]);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(s1[i] >= 0.0);
        CHECK(s1[i] <= 1.0);
    }
}

TEST_CASE("interpolation: quadratic fields are exact, empty ball is empty") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    testutil::jitter(cloud, 0.25, 23);
    std::mt19937 rng(17);
    const Poly2 q = random_poly(rng);
    const std::vector<double> f = sample(cloud, q);

    std::uniform_real_distribution<double> u(0.3, 0.7);
    for (int t = 0; t < 40; ++t) {
        const Vec2 p{u(rng), u(rng)};
        const auto v = ls_interpolate(cloud, p, f);
        REQUIRE(v.has_value());
        CHECK(rel_err(*v, q.at(p)) < 1e-9);
    }

    ParticleCloud empty(Rect{0, 1, 0, 1}, 0.05, 0.05 / 3.0);
    empty.rebuild_index();
    CHECK(!ls_interpolate(empty, {0.5, 0.5}, {}).has_value());
    CHECK(!shepard_mean(empty, {0.5, 0.5}, {}, 0.2).has_value());

    // shepard mean of a constant is that constant, any radius
    const std::vector<double> c(cloud.size(), -1.5);
    const auto m = shepard_mean(cloud, {0.41, 0.62}, c, 0.13);
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(-1.5).epsilon(1e-13));
}

TEST_CASE("value fit: quadratics pass through untouched, spikes shrink") {
    ParticleCloud cloud = ParticleCloud::seed(testutil::unit_square(0.1));
    testutil::jitter(cloud, 0.25, 31);
    NeighborTable table = NeighborTable::build(cloud);
    ValueFitCache vf = ValueFitCache::build(cloud, table);
    const auto& ps = cloud.particles();

    std::mt19937 rng(29);
    const Poly2 qa = random_poly(rng);
    const Poly2 qb = random_poly(rng);
    const std::vector<double> fa = sample(cloud, qa);
    const std::vector<double> fb = sample(cloud, qb);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i].is_wall()) continue;
        double va = 0, vb = 0;
        vf.fitted2(table, static_cast<int>(i), fa, fb, va, vb);
        CHECK(rel_err(va, fa[i]) < 1e-9);
        CHECK(rel_err(vb, fb[i]) < 1e-9);
    }

    // an isolated spike on a flat field is mostly drained by the fit
    std::vector<double> spike(cloud.size(), 0.0);
    std::size_t mid = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (!ps[i].is_wall() && (ps[i].pos - Vec2{0.5, 0.5}).norm() < 0.03)
            mid = i;
    spike[mid] = 1.0;
    double vs = 0, dummy = 0;
    vf.fitted2(table, static_cast<int>(mid), spike, spike, vs, dummy);
    CHECK(std::fabs(vs) < 0.5);
}

}  // TEST_SUITE
