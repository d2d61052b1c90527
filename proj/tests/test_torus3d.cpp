#include <doctest.h>

#include <cmath>
#include <random>

#include "warpconv/errors.hpp"
#include "warpconv/torus3d.hpp"

using namespace warpconv;

namespace {

// Cheapest nonnegative combination of three stencil directions reaching u.
double stencil_cost(const std::vector<std::array<double, 3>>& v, const std::vector<double>& len, const double u[3]) {
    double best = INFINITY;
    const std::size_t m = v.size();
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            for (std::size_t c = b + 1; c < m; ++c) {
                const auto &x = v[a], &y = v[b], &z = v[c];
                const double det = x[0] * (y[1] * z[2] - y[2] * z[1]) - y[0] * (x[1] * z[2] - x[2] * z[1]) +
                                   z[0] * (x[1] * y[2] - x[2] * y[1]);
                if (std::abs(det) < 1e-12) continue;
                auto solve = [&](const std::array<double, 3>& p, const std::array<double, 3>& q,
                                 const std::array<double, 3>& r) {
                    return (p[0] * (q[1] * r[2] - q[2] * r[1]) - q[0] * (p[1] * r[2] - p[2] * r[1]) +
                            r[0] * (p[1] * q[2] - p[2] * q[1])) /
                           det;
                };
                const std::array<double, 3> w{u[0], u[1], u[2]};
                const double la = solve(w, y, z), lb = solve(x, w, z), lc = solve(x, y, w);
                if (la < -1e-12 || lb < -1e-12 || lc < -1e-12) continue;
                best = std::min(best, la * len[a] + lb * len[b] + lc * len[c]);
            }
    return best;
}

double quadrature_integral(const Warp2DProfile& f, double power, double shift) {
    const int n = 800;
    const double h = 2 * M_PI / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double v = f(-M_PI + (i + 0.5) * h, -M_PI + (k + 0.5) * h) - shift;
            sum += std::pow(std::abs(v), power);
        }
    return sum * h * h;
}

Point3 random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_SUITE("torus3d") {

TEST_CASE("stencil and anisotropy") {
    const auto offsets = stencil3_offsets(1);
    CHECK(offsets.size() == 34);
    CHECK_THROWS_AS(stencil3_offsets(2), InvalidInput);
    for (double aspect : {1.0, 2.0}) {
        std::vector<std::array<double, 3>> v;
        std::vector<double> len;
        for (const auto& o : offsets) {
            v.push_back({double(o[0]), double(o[1]), aspect * o[2]});
            len.push_back(std::hypot(v.back()[0], v.back()[1], v.back()[2]));
        }
        const double K = anisotropy3_constant(1, aspect, aspect);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> g;
        double worst = 0.0;
        for (int i = 0; i < 3000; ++i) {
            double u[3] = {g(rng), g(rng), g(rng)};
            const double n = std::hypot(u[0], u[1], u[2]);
            for (double& c : u) c /= n;
            worst = std::max(worst, stencil_cost(v, len, u) - 1.0);
        }
        CHECK(worst <= K + 1e-12);
        CHECK(worst >= 0.9 * K);
    }
    CHECK(anisotropy3_constant(1, 1.0, 2.0) >= anisotropy3_constant(1, 2.0, 2.0));
    CHECK_THROWS_AS(anisotropy3_constant(1, 0.0, 1.0), InvalidInput);
}

TEST_CASE("flat grid matches the limit within its error") {
    for (double c : {1.0, 1.5}) {
        const Grid3Graph g(Warp2DProfile::constant(c), {32, 1});
        std::mt19937_64 rng(11);
        std::vector<Pair3> pairs;
        for (int i = 0; i < 50; ++i) pairs.push_back({random_point(rng), random_point(rng), false});
        const auto d = batch_grid3_distances(g, pairs, 2);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double truth = limit3_distance(c, pairs[i].p, pairs[i].q);
            CHECK(std::abs(truth - d[i].value) <= d[i].error);
            CHECK(d[i].value == g.distance(pairs[i].p, pairs[i].q).value);
        }
    }
}

TEST_CASE("bump grid distances dominate the flat grid") {
    const Grid3Graph flat(Warp2DProfile::constant(1.0), {32, 1});
    const Grid3Graph bump(Warp2DProfile::moving_bump(1.0, 2.0, 1), {32, 1});
    const auto plan = sample_plan3(bump.profile(), {4, 4, 0});
    CHECK(plan.size() == 16 + 3);
    CHECK(plan.back().adversarial);
    const auto a = batch_grid3_distances(flat, plan);
    const auto b = batch_grid3_distances(bump, plan);
    for (std::size_t i = 0; i < plan.size(); ++i) CHECK(b[i].value >= a[i].value);
    // Walking the fiber at the bump center costs more than in the flat space.
    CHECK(b[16].value > a[16].value);
}

TEST_CASE("graph metric axioms") {
    const Grid3Graph g(Warp2DProfile::moving_bump(1.0, 2.0, 2), {32, 1});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const Point3 p = g.position(g.snap(random_point(rng)));
        const Point3 q = g.position(g.snap(random_point(rng)));
        const Point3 r = g.position(g.snap(random_point(rng)));
        const double pq = g.distance(p, q).value, qp = g.distance(q, p).value;
        CHECK(pq == qp);
        CHECK(g.distance(p, p).value == 0.0);
        CHECK(g.distance(p, r).value <= pq + g.distance(q, r).value);
    }
}

TEST_CASE("limit and diameter examples") {
    CHECK(limit3_distance(1.0, {0, 0, 0}, {1, 1, 1}) == doctest::Approx(std::sqrt(3.0)));
    CHECK(limit3_distance(2.0, {0, 0, 0}, {0, 0, M_PI}) == doctest::Approx(2 * M_PI));
    CHECK(limit3_distance(1.0, {0, 0, -0.95 * M_PI}, {0, 0, 0.95 * M_PI}) == doctest::Approx(0.1 * M_PI));
    CHECK_THROWS_AS(limit3_distance(0.0, {}, {}), InvalidInput);
    CHECK(diameter3_upper_bound(0.0, 1.0) == doctest::Approx(4 * std::sqrt(2.0) * M_PI + 2 * M_PI));
    CHECK(diameter3_upper_bound(2 * M_PI, 1.0) == doctest::Approx(4 * std::sqrt(2.0) * M_PI + 4 * M_PI));
    CHECK_THROWS_AS(diameter3_upper_bound(1.0, 0.0), InvalidInput);
    // Every pair lies within the diameter bound.
    const Grid3Graph g(Warp2DProfile::constant(1.0), {32, 1});
    CHECK(g.distance({-M_PI, -M_PI, -M_PI}, {0, 0, 0}).value <= diameter3_upper_bound(0.0, 1.0));
}

TEST_CASE("profile integrals against quadrature") {
    for (int j : {1, 2, 3}) {
        const auto f = Warp2DProfile::moving_bump(1.0, 2.0, j);
        CHECK(f.integral() == doctest::Approx(quadrature_integral(f, 1.0, 0.0)).epsilon(1e-5));
        CHECK(f.l2_distance_to(1.0) == doctest::Approx(std::sqrt(quadrature_integral(f, 2.0, 1.0))).epsilon(2e-3));
        CHECK(f.l2_distance_to(0.5) == doctest::Approx(std::sqrt(quadrature_integral(f, 2.0, 0.5))).epsilon(1e-4));
        CHECK(mass3_estimate(f) == doctest::Approx(2 * M_PI * f.integral()));
        CHECK(f.min_value() == 1.0);
        CHECK(f.max_value() == 2.0);
    }
    const auto two = Warp2DProfile::sum_of_bumps(1.0, {{0, 0, 0.5, 3.0}, {2, 2, 0.5, 0.5}});
    CHECK(two.integral() == doctest::Approx(quadrature_integral(two, 1.0, 0.0)).epsilon(1e-5));
    CHECK(two.min_value() == 0.5);
    CHECK(two(0, 0) == doctest::Approx(3.0));
    CHECK(two(2 + 2 * M_PI, 2) == doctest::Approx(0.5));
    CHECK_THROWS_AS(Warp2DProfile::sum_of_bumps(1.0, {{0, 0, 1, 2}, {1, 0, 1, 2}}), InvalidInput);
    CHECK_THROWS_AS(Warp2DProfile::moving_bump(1.0, 0.5, 1), InvalidInput);
}

TEST_CASE("grid guards") {
    CHECK_THROWS_AS(Grid3Graph(Warp2DProfile::constant(1.0), {16, 1}), InvalidInput);
    CHECK_THROWS_AS(Grid3Graph(Warp2DProfile::constant(1.0), {257, 1}), NumericalGuard);
    CHECK_THROWS_AS(run_torus3_experiment({}), InvalidInput);
}

TEST_CASE("small experiment") {
    Torus3Options o;
    o.grid = {32, 1};
    o.plan = {4, 4, 0};
    const auto report = run_torus3_experiment({1, 2}, o);
    CHECK(report.label == "MovingBump2D");
    CHECK(report.dimension == 3);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].lambda == 2.0);
    CHECK(report.rows[1].l2 <= report.rows[1].l2_bound);
    CHECK(report.rows[1].eps[0].eps_hat >= 0.0);
    for (const auto& s : report.slacks) CHECK_MESSAGE(s.ok(), s.lemma, " j=", s.j, " slack=", s.slack);
}

}
