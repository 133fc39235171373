// SPDX-License-Identifier: Apache-2.0
#include "fpm/ls_operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpm/errors.hpp"

namespace fpm {

NeighborTable NeighborTable::build(const ParticleCloud& cloud) {
    const auto& ps = cloud.particles();
    const int n = static_cast<int>(ps.size());
    const double h = cloud.h();

    NeighborTable t;
    t.offsets.resize(n + 1, 0);
    t.nbr.reserve(static_cast<std::size_t>(n) * 24);
    t.w.reserve(t.nbr.capacity());
    t.dx.reserve(t.nbr.capacity());
    t.dy.reserve(t.nbr.capacity());
    for (int i = 0; i < n; ++i) {
        t.offsets[i] = static_cast<int>(t.nbr.size());
        const Vec2 c = ps[i].pos;
        for (int j : cloud.indices_near(c, h)) {
            if (j == i) continue;
            const Vec2 d = ps[j].pos - c;
            t.nbr.push_back(j);
            t.w.push_back(gaussian_weight(d.norm2(), h, cloud.alpha()));
            t.dx.push_back(d.x);
            t.dy.push_back(d.y);
        }
    }
    t.offsets[n] = static_cast<int>(t.nbr.size());
    return t;
}

StencilCache StencilCache::build(const ParticleCloud& cloud,
                                 const NeighborTable& table) {
    const int n = static_cast<int>(cloud.size());
    StencilCache c;
    c.factors_.resize(n);
    c.status_.resize(n, Status::Ok);
    for (int i = 0; i < n; ++i) {
        if (table.count(i) < 5) {
            c.status_[i] = Status::TooFewNeighbors;
            continue;
        }
        double A[5][5] = {};
        double m[5];
        for (int k = table.begin(i); k < table.end(i); ++k) {
            taylor_row(table.dx[k], table.dy[k], m);
            const double wk = table.w[k];
            for (int r = 0; r < 5; ++r)
                for (int s = r; s < 5; ++s) A[r][s] += wk * m[r] * m[s];
        }
        for (int r = 0; r < 5; ++r)
            for (int s = 0; s < r; ++s) A[r][s] = A[s][r];
        if (!c.factors_[i].factor(A, detail::kCondLimit))
            c.status_[i] = Status::Degenerate;
    }
    return c;
}

void StencilCache::require_usable(const ParticleCloud& cloud,
                                  const NeighborTable& table, int i) const {
    if (status_[i] == Status::TooFewNeighbors)
        throw StencilError(cloud.particles()[i].id,
                           "particle " + std::to_string(cloud.particles()[i].id) +
                               ": derivative fit needs at least 5 neighbors, has " +
                               std::to_string(table.count(i)));
    if (status_[i] == Status::Degenerate)
        throw StencilError(cloud.particles()[i].id,
                           "particle " + std::to_string(cloud.particles()[i].id) +
                               ": degenerate neighbor geometry (condition estimate " +
                               std::to_string(factors_[i].cond) + ")");
}

DerivativeApprox StencilCache::apply(const ParticleCloud& cloud,
                                     const NeighborTable& table, int i,
                                     const std::vector<double>& field,
                                     double center_value) const {
    require_usable(cloud, table, i);
    double t[5] = {};
    double m[5];
    for (int k = table.begin(i); k < table.end(i); ++k) {
        taylor_row(table.dx[k], table.dy[k], m);
        const double wb = table.w[k] * (field[table.nbr[k]] - center_value);
        for (int r = 0; r < 5; ++r) t[r] += wb * m[r];
    }
    double a[5];
    factors_[i].solve(t, a);
    return {a[0], a[1], a[2], a[3], a[4]};
}

ValueFitCache ValueFitCache::build(const ParticleCloud& cloud,
                                   const NeighborTable& table) {
    const int n = static_cast<int>(cloud.size());
    ValueFitCache c;
    c.factors_.resize(n);
    c.ok_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        if (table.count(i) < 6) continue;
        // Self row is (1, 0, ..., 0) with weight 1, like the Shepard self
        // term; it only touches the constant-constant entry.
        double A[6][6] = {};
        A[0][0] = 1.0;
        double m[6];
        for (int k = table.begin(i); k < table.end(i); ++k) {
            const double dx = table.dx[k], dy = table.dy[k];
            m[0] = 1.0;
            m[1] = dx;
            m[2] = dy;
            m[3] = 0.5 * dx * dx;
            m[4] = dx * dy;
            m[5] = 0.5 * dy * dy;
            const double wk = table.w[k];
            for (int r = 0; r < 6; ++r)
                for (int s = r; s < 6; ++s) A[r][s] += wk * m[r] * m[s];
        }
        for (int r = 0; r < 6; ++r)
            for (int s = 0; s < r; ++s) A[r][s] = A[s][r];
        if (c.factors_[i].factor(A, detail::kCondLimit)) c.ok_[i] = 1;
    }
    return c;
}

void ValueFitCache::fitted2(const NeighborTable& table, int i,
                            const std::vector<double>& fa,
                            const std::vector<double>& fb, double& va,
                            double& vb) const {
    if (!ok_[i]) {
        double sa = fa[i], sb = fb[i], wsum = 1.0;
        for (int k = table.begin(i); k < table.end(i); ++k) {
            const int j = table.nbr[k];
            sa += table.w[k] * fa[j];
            sb += table.w[k] * fb[j];
            wsum += table.w[k];
        }
        va = sa / wsum;
        vb = sb / wsum;
        return;
    }
    double ta[6] = {}, tb[6] = {};
    ta[0] = fa[i];
    tb[0] = fb[i];
    double m[6];
    for (int k = table.begin(i); k < table.end(i); ++k) {
        const double dx = table.dx[k], dy = table.dy[k];
        m[0] = 1.0;
        m[1] = dx;
        m[2] = dy;
        m[3] = 0.5 * dx * dx;
        m[4] = dx * dy;
        m[5] = 0.5 * dy * dy;
        const int j = table.nbr[k];
        const double wk = table.w[k];
        const double wa = wk * fa[j];
        const double wb = wk * fb[j];
        for (int r = 0; r < 6; ++r) {
            ta[r] += wa * m[r];
            tb[r] += wb * m[r];
        }
    }
    double a[6];
    factors_[i].solve(ta, a);
    va = a[0];
    factors_[i].solve(tb, a);
    vb = a[0];
}

void StencilCache::apply2(const ParticleCloud& cloud, const NeighborTable& table,
                          int i, const std::vector<double>& fa,
                          const std::vector<double>& fb, DerivativeApprox& da,
                          DerivativeApprox& db) const {
    require_usable(cloud, table, i);
    const double ca = fa[i], cb = fb[i];
    double ta[5] = {}, tb[5] = {};
    double m[5];
    for (int k = table.begin(i); k < table.end(i); ++k) {
        taylor_row(table.dx[k], table.dy[k], m);
        const int j = table.nbr[k];
        const double wk = table.w[k];
        const double wa = wk * (fa[j] - ca);
        const double wb = wk * (fb[j] - cb);
        for (int r = 0; r < 5; ++r) {
            ta[r] += wa * m[r];
            tb[r] += wb * m[r];
        }
    }
    double a[5];
    factors_[i].solve(ta, a);
    da = {a[0], a[1], a[2], a[3], a[4]};
    factors_[i].solve(tb, a);
    db = {a[0], a[1], a[2], a[3], a[4]};
}

namespace {

// Shared one-off fit used by the public convenience wrappers.
DerivativeApprox fit_at_index(const ParticleCloud& cloud, int i,
                              const std::vector<double>& field) {
    const auto& ps = cloud.particles();
    const Vec2 c = ps[i].pos;
    auto idx = cloud.indices_near(c, cloud.h());
    idx.erase(std::remove(idx.begin(), idx.end(), i), idx.end());
    if (static_cast<int>(idx.size()) < 5)
        throw StencilError(ps[i].id,
                           "particle " + std::to_string(ps[i].id) +
                               ": derivative fit needs at least 5 neighbors, has " +
                               std::to_string(idx.size()));
    double A[5][5] = {};
    double t[5] = {};
    double m[5];
    for (int j : idx) {
        const Vec2 d = ps[j].pos - c;
        taylor_row(d.x, d.y, m);
        const double wk = gaussian_weight(d.norm2(), cloud.h(), cloud.alpha());
        for (int r = 0; r < 5; ++r) {
            for (int s = r; s < 5; ++s) A[r][s] += wk * m[r] * m[s];
            t[r] += wk * (field[j] - field[i]) * m[r];
        }
    }
    for (int r = 0; r < 5; ++r)
        for (int s = 0; s < r; ++s) A[r][s] = A[s][r];
    detail::SymFactor<5> f;
    if (!f.factor(A, detail::kCondLimit))
        throw StencilError(ps[i].id,
                           "particle " + std::to_string(ps[i].id) +
                               ": degenerate neighbor geometry (condition estimate " +
                               std::to_string(f.cond) + ")");
    double a[5];
    f.solve(t, a);
    return {a[0], a[1], a[2], a[3], a[4]};
}

}  // namespace

DerivativeApprox fit_derivatives(const ParticleCloud& cloud, int id,
                                 const std::vector<double>& field) {
    return fit_at_index(cloud, cloud.index_of(id), field);
}

Vec2 ls_gradient(const ParticleCloud& cloud, int id,
                 const std::vector<double>& field) {
    return fit_derivatives(cloud, id, field).gradient();
}

double ls_laplacian(const ParticleCloud& cloud, int id,
                    const std::vector<double>& field) {
    return fit_derivatives(cloud, id, field).laplacian();
}

double ls_divergence(const ParticleCloud& cloud, int id,
                     const std::vector<double>& fx,
                     const std::vector<double>& fy) {
    return fit_derivatives(cloud, id, fx).ddx +
           fit_derivatives(cloud, id, fy).ddy;
}

std::vector<double> shepard_smooth(const ParticleCloud& cloud,
                                   const NeighborTable& table,
                                   std::vector<double> field, int iterations) {
    (void)cloud;
    const int n = static_cast<int>(table.offsets.size()) - 1;
    std::vector<double> next(n);
    for (int it = 0; it < iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double num = field[i];  // self weight w(0) = 1
            double den = 1.0;
            for (int k = table.begin(i); k < table.end(i); ++k) {
                num += table.w[k] * field[table.nbr[k]];
                den += table.w[k];
            }
            next[i] = num / den;
        }
        field.swap(next);
    }
    return field;
}

std::optional<double> ls_interpolate(const ParticleCloud& cloud, const Vec2& p,
                                     const std::vector<double>& field) {
    const auto idx = cloud.indices_near(p, cloud.h());
    if (idx.empty()) return std::nullopt;
    const auto& ps = cloud.particles();
    if (idx.size() >= 6) {
        double A[6][6] = {};
        double t[6] = {};
        double m[6];
        for (int j : idx) {
            const Vec2 d = ps[j].pos - p;
            m[0] = 1.0;
            m[1] = d.x;
            m[2] = d.y;
            m[3] = 0.5 * d.x * d.x;
            m[4] = d.x * d.y;
            m[5] = 0.5 * d.y * d.y;
            const double wk = gaussian_weight(d.norm2(), cloud.h(), cloud.alpha());
            for (int r = 0; r < 6; ++r) {
                for (int s = r; s < 6; ++s) A[r][s] += wk * m[r] * m[s];
                t[r] += wk * field[j] * m[r];
            }
        }
        for (int r = 0; r < 6; ++r)
            for (int s = 0; s < r; ++s) A[r][s] = A[s][r];
        detail::SymFactor<6> f;
        if (f.factor(A, detail::kCondLimit)) {
            double a[6];
            f.solve(t, a);
            return a[0];
        }
    }
    double num = 0, den = 0;
    for (int j : idx) {
        const double wk = gaussian_weight((ps[j].pos - p).norm2(), cloud.h(),
                                          cloud.alpha());
        num += wk * field[j];
        den += wk;
    }
    return num / den;
}

std::optional<double> shepard_mean(const ParticleCloud& cloud, const Vec2& p,
                                   const std::vector<double>& field,
                                   double radius) {
    const auto idx = cloud.indices_near(p, radius);
    if (idx.empty()) return std::nullopt;
    const auto& ps = cloud.particles();
    double num = 0, den = 0;
    for (int j : idx) {
        const double wk = gaussian_weight((ps[j].pos - p).norm2(), radius,
                                          cloud.alpha());
        num += wk * field[j];
        den += wk;
    }
    return num / den;
}

}  // namespace fpm
