#include <doctest.h>

#include <cmath>
#include <random>

#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"

using namespace warpconv;

namespace {

WarpedSpace torus(WarpingProfile f) {
    return {BaseSpace::interval(-M_PI, M_PI), FiberSpace(2 * M_PI), std::move(f)};
}

// Brute force over a 720 x 720 grid of cinch entry/exit offsets (windings -1..1).
double cinch_limit_bruteforce(double h0, double d1, double d2, double shift, double circumference) {
    double best = INFINITY;
    for (int w = -1; w <= 1; ++w) {
        const double t = shift + w * circumference;
        for (int i = 0; i <= 720; ++i) {
            const double a = t * i / 720.0;
            for (int j = 0; j <= 720; ++j) {
                const double b = t * j / 720.0;
                best = std::min(best, std::hypot(d1, a) + h0 * std::abs(b - a) + std::hypot(d2, t - b));
            }
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("geodesy") {

TEST_CASE("level set distance on the global minimum") {
    auto cinch = torus(WarpingProfile::cinch(0.5, 0.0, 0.25));
    CHECK(level_set_distance(cinch, 0.0, 0.0, M_PI) == doctest::Approx(0.5 * M_PI));
    CHECK(level_set_distance(cinch, 0.0, 1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(level_set_distance(cinch, 1.0, 0.0, 1.0), HypothesisError);
    auto flat = torus(WarpingProfile::constant(1.0));
    CHECK(level_set_distance(flat, 2.0, 0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("taxi upper bound examples") {
    auto cinch = torus(WarpingProfile::cinch(0.5, 0.0, 1.0 / 8));
    CHECK(taxi_upper_bound(cinch, {-1, 0}, {1, M_PI}) == doctest::Approx(2 + 0.5 * M_PI));
    CHECK(taxi_upper_bound(cinch, {0.3, 1.0}, {0.3, 1.0}) == 0.0);
    auto flat = torus(WarpingProfile::constant(1.0));
    CHECK(taxi_upper_bound(flat, {0, 0}, {1, M_PI}) == doctest::Approx(1 + M_PI));
    WarpedSpace ring{BaseSpace::circle(), FiberSpace(2 * M_PI), WarpingProfile::cinch(0.5, 3.1, 0.05)};
    // Minor arc from 3.0 to -3.0 crosses the cinch at 3.1.
    CHECK(taxi_upper_bound(ring, {3.0, 0}, {-3.0, 1.0}) == doctest::Approx(2 * M_PI - 6.0 + 0.5));
}

TEST_CASE("ridge bypass examples") {
    auto ridge = torus(WarpingProfile::ridge(2.0, 0.0, 1.0 / 8));
    const auto same = ridge_bypass_bound(ridge, 0.0, 0.0, 0.0, M_PI);
    CHECK(same.bound == doctest::Approx(2 * M_PI));
    CHECK_FALSE(same.improves);
    const auto off = ridge_bypass_bound(ridge, 0.0, 1.0 / 8, 0.0, M_PI);
    CHECK(off.bound == doctest::Approx(0.25 + M_PI));
    CHECK(off.bound < 2 * M_PI);
    CHECK(off.improves);
    CHECK_FALSE(ridge_bypass_bound(ridge, 0.0, 1.0 / 8, 0.0, 0.0).improves);
}

TEST_CASE("cinch limit distance") {
    const BaseSpace base = BaseSpace::interval(-M_PI, M_PI);
    const FiberSpace fiber(2 * M_PI);
    CHECK(cinch_limit_distance(0.5, 0.0, base, fiber, {0, 0}, {0, 2.0}) == doctest::Approx(1.0));
    CHECK(cinch_limit_distance(1.0, 0.0, base, fiber, {-1, 0.5}, {2, 3.0}) ==
          doctest::Approx(std::hypot(3.0, 2.5)));
    const double v = cinch_limit_distance(0.5, 0.0, base, fiber, {-1, 0}, {1, M_PI});
    const double brute = cinch_limit_bruteforce(0.5, 1.0, 1.0, M_PI, 2 * M_PI);
    CHECK(v <= brute + 1e-12);
    CHECK(v >= brute - 1e-4);
    // Grid distances on the cinched family approach the limit value.
    double previous_gap = INFINITY;
    for (int j : {4, 16}) {
        auto space = torus(WarpingProfile::cinch(0.5, 0.0, 1.0 / j));
        GridGraph g(space, GridSpec{256, 256, 3, 0.0});
        const auto r = g.distance({-1, 0}, {1, M_PI});
        const double gap = std::abs(r.distance - v);
        CHECK(gap <= r.error_estimate + 2.0 / j);
        CHECK(gap <= previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("clairaut examples") {
    auto flat = torus(WarpingProfile::constant(1.0));
    const auto a = clairaut_distance(flat, {0, 0}, {3, 0});
    CHECK(a.distance == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(a.converged);
    const auto b = clairaut_distance(flat, {0, 0}, {1, 1});
    CHECK(b.distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(b.method == GeodesicMethod::Clairaut);
    auto ridge = torus(WarpingProfile::ridge(2.0, 0.0, 1.0 / 8));
    const auto c = clairaut_distance(ridge, {0, 0}, {0, M_PI});
    CHECK(c.distance < 2 * M_PI);
    CHECK(c.distance <= 0.25 + M_PI + 1e-9);
    CHECK_THROWS_AS(clairaut_distance(flat, {1, 1}, {1, 1}), InvalidInput);
}

TEST_CASE("clairaut paths realize their length") {
    auto space = torus(WarpingProfile::cinch(0.5, 0.0, 0.25));
    for (auto [p, q] : {std::pair<SurfacePoint, SurfacePoint>{{-1, 0}, {1, 2}}, {{0.3, 0}, {0.3, 2.5}},
                        {{-2, 5}, {0.1, 1}}}) {
        const auto r = clairaut_distance(space, p, q);
        const double len = curve_length(space, r.path, QuadratureRule::gauss(16));
        CHECK(len == doctest::Approx(r.distance).epsilon(1e-4));
    }
}

TEST_CASE("clairaut and the grid oracle agree on smooth profiles") {
    std::mt19937_64 rng(23);
    const std::vector<WarpingProfile> profiles = {WarpingProfile::constant(1.0),
                                                  WarpingProfile::ridge(2.0, 0.0, 0.25),
                                                  WarpingProfile::cinch(0.5, 0.0, 0.25)};
    for (const auto& f : profiles) {
        auto space = torus(f);
        GridGraph g(space, GridSpec{192, 192, 3, {}});
        std::uniform_int_distribution<int> row(8, g.rows() - 9), col(0, g.columns() - 1);
        for (int i = 0; i < 50; ++i) {
            const SurfacePoint p = g.position({row(rng), col(rng)});
            const SurfacePoint q = g.position({row(rng), col(rng)});
            if (p.r == q.r && p.theta == q.theta) continue;
            const auto grid = g.distance(p, q);
            const auto shot = clairaut_distance(space, p, q);
            CHECK(std::abs(grid.distance - shot.distance) <= grid.error_estimate + shot.error_estimate);
            CHECK_MESSAGE(shot.converged, p.r, " ", p.theta, " ", q.r, " ", q.theta);
            // Grid paths are genuine curves, so shooting may not lose to them.
            CHECK(shot.distance <= grid.distance + 1e-6);
        }
    }
}

TEST_CASE("upper bounds hold against the grid oracle") {
    auto space = torus(WarpingProfile::sum_of_bumps(1.0, {{-1.0, 0.5, 0.4}, {1.0, 0.5, 1.9}}));
    GridGraph g(space, GridSpec{160, 160, 3, {}});
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ur(-3.0, 3.0), ut(0, 2 * M_PI);
    for (int i = 0; i < 60; ++i) {
        const SurfacePoint p{ur(rng), ut(rng)}, q{ur(rng), ut(rng)};
        const auto d = g.distance(p, q);
        CHECK(d.distance <= taxi_upper_bound(space, p, q) + d.error_estimate);
        const double r_hat = ur(rng);
        if (p.r == q.r) CHECK(d.distance <= ridge_bypass_bound(space, p.r, r_hat, p.theta, q.theta).bound + d.error_estimate);
    }
    // Same-level pairs for the bypass bound.
    for (int i = 0; i < 40; ++i) {
        const double r = ur(rng);
        const SurfacePoint p{r, ut(rng)}, q{r, ut(rng)};
        const auto d = g.distance(p, q);
        const double r_hat = ur(rng);
        CHECK(d.distance <= ridge_bypass_bound(space, r, r_hat, p.theta, q.theta).bound + d.error_estimate);
    }
}

TEST_CASE("min-level exactness and cinch sandwich") {
    auto space = torus(WarpingProfile::cinch(0.5, 0.0, 1.0 / 8));
    GridGraph g(space, GridSpec{256, 256, 3, 0.0});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ur(-3.0, 3.0), ut(0, 2 * M_PI);
    for (int i = 0; i < 20; ++i) {
        const double t1 = ut(rng), t2 = ut(rng);
        const auto d = g.distance({0.0, t1}, {0.0, t2});
        CHECK(std::abs(d.distance - level_set_distance(space, 0.0, t1, t2)) <= d.error_estimate + 1e-12);
    }
    const BaseSpace base = space.base();
    for (int i = 0; i < 40; ++i) {
        const SurfacePoint p{ur(rng), ut(rng)}, q{ur(rng), ut(rng)};
        const auto d = g.distance(p, q);
        const double d_inf = product_distance(base, space.fiber(), 1.0, p, q);
        CHECK(d.distance >= 0.5 * d_inf - d.error_estimate);
        CHECK(d.distance <= d_inf + d.error_estimate);
    }
}

}  // TEST_SUITE
