#include <doctest.h>

#include <cmath>
#include <random>

#include "warpconv/errors.hpp"
#include "warpconv/ret_metric.hpp"

using namespace warpconv;

namespace {

RETParams params(double R) { return {R, BaseSpace::interval(-M_PI, M_PI), FiberSpace(2 * M_PI)}; }

}  // namespace

TEST_SUITE("ret") {

TEST_CASE("closed form examples") {
    CHECK(ret_distance(2.0, 2 * std::sqrt(3.0), 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::hypot(2 * std::sqrt(3.0), 2.0) == doctest::Approx(2 * std::sqrt(3.0) * std::sqrt(3.0) / 2 + 1));
    CHECK(ret_distance(3.0, 1.7, 0.0) == 1.7);
    CHECK(ret_distance(5.0, M_PI, M_PI) == doctest::Approx(M_PI * (std::sqrt(24.0) / 5 + 1)).epsilon(1e-14));
    CHECK(ret_distance(5.0, M_PI, M_PI) == doctest::Approx(6.2199).epsilon(1e-4));
    CHECK(ret_distance_bruteforce(2.0, 1.0, 10.0, 1000) == doctest::Approx(std::sqrt(3.0) / 2 + 10).epsilon(1e-12));
    CHECK(ret_distance_bruteforce(2.0, 0.0, 0.8, 1000) == doctest::Approx(0.8));
    CHECK_THROWS_AS(ret_distance(1.0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(ret_distance_bruteforce(2.0, 1.0, 1.0, 999), InvalidInput);
}

TEST_CASE("point queries use minor arcs") {
    const auto p = params(2.0);
    CHECK(ret_distance(p, {0, 0.1}, {1, 2 * M_PI - 0.1}) == doctest::Approx(ret_distance(2.0, 1.0, 0.2)));
    RETParams ring{2.0, BaseSpace::circle(), FiberSpace(2 * M_PI)};
    CHECK(ret_distance(ring, {3.0, 0}, {-3.0, 0}) == doctest::Approx(2 * M_PI - 6.0));
    CHECK_THROWS_AS(ret_distance(p, {4.0, 0}, {0, 0}), DomainError);
}

TEST_CASE("branches agree at the threshold") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uR(1.01, 8.0), us(0.0, 2 * M_PI);
    for (int i = 0; i < 100; ++i) {
        const double R = uR(rng), ds = us(rng);
        const double t0 = ret_threshold(R, ds);
        const double euclid = std::hypot(ds, R * t0);
        const double taxi = ds * std::sqrt(R * R - 1) / R + t0;
        CHECK(std::abs(euclid - taxi) <= 1e-12 * (1 + euclid));
        CHECK(std::abs(ret_distance(R, ds, t0 * (1 + 1e-12)) - euclid) <= 1e-11 * (1 + euclid));
    }
}

TEST_CASE("closed form matches the grid minimization") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uR(1.0001, 10.0), ur(-M_PI, M_PI), ut(0, 2 * M_PI);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto p = params(uR(rng));
        const SurfacePoint a{ur(rng), ut(rng)}, b{ur(rng), ut(rng)};
        worst = std::max(worst, std::abs(ret_distance(p, a, b) - ret_distance_bruteforce(p, a, b, 1000)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("metric axioms and sandwich") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> uR(1.0001, 10.0), ur(-M_PI, M_PI), ut(0, 2 * M_PI);
    for (int i = 0; i < 1000; ++i) {
        const auto p = params(uR(rng));
        const SurfacePoint a{ur(rng), ut(rng)}, b{ur(rng), ut(rng)}, c{ur(rng), ut(rng)};
        const double ab = ret_distance(p, a, b), bc = ret_distance(p, b, c), ac = ret_distance(p, a, c);
        CHECK(ab == ret_distance(p, b, a));
        CHECK(ab > 0.0);
        CHECK(ret_distance(p, a, a) == 0.0);
        CHECK(ac <= ab + bc + 1e-10);
        const double ds = std::abs(a.r - b.r), dsig = p.fiber.distance(a.theta, b.theta);
        CHECK(ab <= ds + dsig + 1e-15);
        CHECK(ab <= std::hypot(ds, p.R * dsig) + 1e-15);
        CHECK(ab >= ds * std::sqrt(p.R * p.R - 1) / p.R + dsig - 1e-15);
    }
}

TEST_CASE("ball boundaries") {
    const auto p = params(2.0);
    const double r = 2.0;
    const auto ball = ret_ball_boundary(p, {0, 0}, r, 720);
    REQUIRE(ball.vertices.size() == 721);
    for (const auto& v : ball.vertices) {
        CHECK(ret_distance_bruteforce(2.0, v.r, v.theta, 4000) == doctest::Approx(r).epsilon(1e-9));
        // Between the ellipse and the diamond of the same radius.
        CHECK(v.r * v.r + 4 * v.theta * v.theta >= r * r * (1 - 1e-9));
        CHECK(std::sqrt(3.0) / 2 * std::abs(v.r) + std::abs(v.theta) <= r * (1 + 1e-9));
    }
    CHECK(ball.vertices[0].r == doctest::Approx(r).epsilon(1e-14));
    CHECK(ball.vertices[0].theta == doctest::Approx(0.0));
    CHECK(ball.vertices[360].r == doctest::Approx(-r).epsilon(1e-14));

    // Off-axis points of the ellipse s^2 + 2 theta^2 = r^2 are not on the boundary.
    for (double phi : {0.3, 0.7, 1.2}) {
        const double s = r * std::cos(phi), th = r * std::sin(phi) / std::sqrt(2.0);
        CHECK(std::abs(ret_distance(2.0, s, th) - r) > 1e-2);
    }

    const auto tiny = ret_ball_boundary(p, {0.5, 1.0}, 1e-9, 64);
    for (const auto& v : tiny.vertices) CHECK(std::hypot(v.r - 0.5, v.theta - 1.0) <= 1e-6);
    CHECK_THROWS_AS(ret_ball_boundary(p, {0, 0}, 0.0, 64), InvalidInput);
}

}  // TEST_SUITE
