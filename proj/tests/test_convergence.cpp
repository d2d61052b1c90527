#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "warpconv/convergence.hpp"
#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"

using namespace warpconv;

namespace {

SequenceFamily family(FamilyKind kind, double h0) {
    SequenceFamily f;
    f.kind = kind;
    f.h0 = h0;
    return f;
}

const SlackRow& row_named(const std::vector<SlackRow>& rows, const std::string& lemma) {
    for (const auto& r : rows) {
        if (r.lemma == lemma) return r;
    }
    FAIL("missing audit row " << lemma);
    return rows.front();
}

}  // namespace

TEST_SUITE("convergence") {

TEST_CASE("moving enumeration") {
    const double t[] = {0, 1, 0, 0.5, 1, 0, 0.25, 0.5, 0.75, 1, 0};
    const double d[] = {1, 1, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.25, 0.125};
    for (int j = 1; j <= 11; ++j) {
        CHECK(moving_term(j).center == t[j - 1]);
        CHECK(moving_term(j).half_width == d[j - 1]);
    }
    CHECK_THROWS_AS(moving_term(0), InvalidInput);
}

TEST_CASE("family members") {
    const auto moving = family_profile(family(FamilyKind::MovingCinch, 0.5), 3);
    CHECK(moving(0.0) == doctest::Approx(0.5));
    CHECK(moving(0.5) == 1.0);
    CHECK(moving(-0.25) < 1.0);

    const auto many = family_profile(family(FamilyKind::ManyRidges, 1.5), 2);
    for (double c : {-M_PI / 2, 0.0, M_PI / 2}) {
        CHECK(many(c) == doctest::Approx(1.5));
        CHECK(many(c + 1.0 / 16) == 1.0);
        CHECK(many(c + 1.0 / 32) > 1.0);
    }
    CHECK(many(M_PI / 4) == 1.0);

    const auto cinch = family_profile(family(FamilyKind::CinchedTorus, 0.3), 1);
    CHECK(cinch(0.999) < 1.0);
    CHECK(cinch(1.0) == 1.0);
    CHECK(cinch(0.0) == doctest::Approx(0.3));

    const auto ret = family_profile(family(FamilyKind::RETCinches, 1.0), 3);
    CHECK(ret(-M_PI + M_PI / 4) == doctest::Approx(1.0));
    CHECK(ret(0.3) == 5.0);
    CHECK(dyadic_train(32, 1, 2).count == 4294967295u);
    CHECK(family_profile(family(FamilyKind::ManyRidges, 2.0), 32)(0.0) == doctest::Approx(2.0));

    CHECK_THROWS_AS(family_profile(family(FamilyKind::SingleRidge, 0.5), 2), InvalidInput);
    CHECK_THROWS_AS(family_profile(family(FamilyKind::CinchedTorus, 0.5), 0), InvalidInput);
    CHECK(parse_family("manyridges") == FamilyKind::ManyRidges);
    CHECK_THROWS_AS(parse_family("torus"), InvalidInput);
}

TEST_CASE("limit distances") {
    const BaseSpace base = BaseSpace::interval(-M_PI, M_PI);
    const FiberSpace fiber(2 * M_PI);
    CHECK(limit_distance(LimitMetric::product(1.0), base, fiber, {0, 0}, {1, 1}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(limit_distance(LimitMetric::cinch(0.5, 0.0), base, fiber, {0, 0}, {0, M_PI}) ==
          doctest::Approx(0.5 * M_PI));
    CHECK(limit_distance(LimitMetric::ret(5.0), base, fiber, {-M_PI / 2, 0}, {M_PI / 2, M_PI}) ==
          doctest::Approx(M_PI * (std::sqrt(24.0) / 5 + 1)));
    CHECK(candidate_limits(family(FamilyKind::MovingCinch, 0.4)).size() == 2);
}

TEST_CASE("bounds and mass") {
    CHECK(gh_upper_bound(0.0) == 0.0);
    CHECK(gh_upper_bound(0.05) == doctest::Approx(0.1));
    CHECK(gh_upper_bound(1.5) == 3.0);
    CHECK(flat_upper_bound(0.0, 2.0, 2, 1.0) == 0.0);
    CHECK(flat_upper_bound(0.1, 2.0, 2, 4 * M_PI * M_PI) == doctest::Approx(178.66).epsilon(1e-4));
    CHECK(flat_upper_bound(1.0, 1.0, 1, 1.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(flat_upper_bound(0.1, 0.5, 2, 1.0), InvalidInput);

    const BaseSpace base = BaseSpace::interval(-M_PI, M_PI);
    CHECK(mass_estimate({base, FiberSpace(), WarpingProfile::constant(1.0)}) == doctest::Approx(4 * M_PI * M_PI));
    CHECK(mass_estimate({base, FiberSpace(), WarpingProfile::constant(2.0)}) == doctest::Approx(8 * M_PI * M_PI));
    // The cosine bump averages (1 + h0) / 2 over its support.
    CHECK(mass_estimate(family_space(family(FamilyKind::CinchedTorus, 0.5), 8)) ==
          doctest::Approx(4 * M_PI * M_PI - 2 * M_PI * 0.125 * 0.5).epsilon(1e-12));
}

TEST_CASE("L2 distances respect the analytic bounds") {
    for (auto kind : {FamilyKind::CinchedTorus, FamilyKind::MovingCinch, FamilyKind::SingleRidge,
                      FamilyKind::MovingRidges, FamilyKind::ManyRidges, FamilyKind::RETCinches}) {
        const double h0 = kind == FamilyKind::CinchedTorus || kind == FamilyKind::MovingCinch ? 0.2 : 2.0;
        const auto fam = family(kind, h0);
        const WarpedSpace limit(fam.base(), fam.fiber(), WarpingProfile::constant(fam.lp_limit_level()));
        for (int j : {1, 2, 3, 5, 8, 13}) {
            const double l2 = lp_profile_distance(family_space(fam, j), limit, 2.0);
            CHECK(l2 <= l2_upper_bound(fam, j) + 1e-12);
            CHECK(l2 > 0.0);
        }
    }
    // Exact value for the single cinch: (1 - h0)^2 * 3/8 * 2/j.
    const double l2 = lp_profile_distance(family_space(family(FamilyKind::CinchedTorus, 0.5), 4),
                                          WarpedSpace(BaseSpace::interval(-M_PI, M_PI), FiberSpace(),
                                                      WarpingProfile::constant(1.0)),
                                          2.0);
    CHECK(l2 == doctest::Approx(std::sqrt(0.25 * 0.375 * 0.5)).epsilon(1e-10));
}

TEST_CASE("sample plans and grid schedule") {
    const auto fam = family(FamilyKind::ManyRidges, 2.0);
    const auto a = sample_plan(fam, 5);
    const auto b = sample_plan(fam, 5);
    REQUIRE(a.size() == 128 + 3 * feature_levels(fam, 5).size());
    CHECK(feature_levels(fam, 5).size() == 7);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].p.r == b[i].p.r);
        CHECK(a[i].q.theta == b[i].q.theta);
        CHECK(a[i].adversarial == (i >= 128));
        CHECK(std::abs(a[i].p.r) <= M_PI);
        CHECK(std::abs(a[i].q.r) <= M_PI);
    }
    // The low-discrepancy part does not depend on j; the seed moves it.
    CHECK(sample_plan(fam, 9)[17].q.r == a[17].q.r);
    CHECK(sample_plan(fam, 5, {16, 8, 3})[17].q.r != a[17].q.r);
    const auto moving = sample_plan(family(FamilyKind::MovingCinch, 0.5), 4);
    CHECK(moving.size() == 128 + 3 * 3);  // t_4 = 1/2 plus both candidate cinch levels

    const auto g = experiment_grid(family(FamilyKind::CinchedTorus, 0.5), 16);
    CHECK(g.n_r == 512);
    CHECK(g.k == 3);
    CHECK(*g.anchor == 0.0);
    CHECK(experiment_grid(fam, 4).n_r == 256);
    CHECK(experiment_grid(family(FamilyKind::RETCinches, 1.0), 2).n_r == 1024);
}

TEST_CASE("batched grid distances match single queries") {
    const WarpedSpace space = family_space(family(FamilyKind::SingleRidge, 2.0), 4);
    const GridGraph g(space, GridSpec{96, 96, 2, {}});
    const auto plan = sample_plan(family(FamilyKind::SingleRidge, 2.0), 4, {4, 5, 0});
    const auto batch = batch_grid_distances(g, plan, 3);
    const auto serial = batch_grid_distances(g, plan, 1);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto single = g.distance(plan[i].p, plan[i].q);
        CHECK(batch[i].value == single.distance);
        CHECK(batch[i].error == doctest::Approx(single.error_estimate));
        CHECK(serial[i].value == batch[i].value);
    }
}

TEST_CASE("cinch limit on the grid agrees with the closed form") {
    const auto fam = family(FamilyKind::CinchedTorus, 0.5);
    const auto plan = sample_plan(fam, 4, {5, 6, 1});
    const GridSpec grid{192, 192, 3, 0.0};
    const auto on_grid = limit_distances(LimitMetric::cinch(0.5, 0.0), fam.base(), fam.fiber(), grid, plan);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double exact = cinch_limit_distance(0.5, 0.0, fam.base(), fam.fiber(), plan[i].p, plan[i].q);
        CHECK(std::abs(on_grid[i].value - exact) <= on_grid[i].error + 1e-9);
    }
}

TEST_CASE("discrepancy estimates") {
    SequenceFamily flat = family(FamilyKind::Constant, 1.0);
    const GridSpec grid{96, 96, 2, {}};
    const auto plan = sample_plan(flat, 1, {4, 4, 0});
    const auto same = discrepancy_estimate(flat, 1, LimitMetric::product(1.0), grid, plan);
    CHECK(same.eps_hat == 0.0);
    CHECK(same.corrected == 0.0);

    // Against the wrong limit the on-cinch antipodal pair exposes (1 - h0) pi.
    const auto cinched = family(FamilyKind::CinchedTorus, 0.3);
    const auto cplan = sample_plan(cinched, 4, {2, 2, 0});
    const auto wrong = discrepancy_estimate(cinched, 4, LimitMetric::product(1.0), GridSpec{128, 128, 2, 0.0}, cplan);
    CHECK(wrong.eps_hat >= 0.7 * M_PI - wrong.error);
    CHECK(cplan[wrong.worst].adversarial);
    CHECK_THROWS_AS(discrepancy_estimate(cinched, 4, LimitMetric::product(1.0), grid, {}), InvalidInput);
}

TEST_CASE("audits of the flat family") {
    const auto flat = family(FamilyKind::Constant, 1.0);
    const auto plan = sample_plan(flat, 1, {4, 4, 0});
    const auto rows = audit_theorem_bounds(flat, 1, GridSpec{96, 96, 2, {}}, plan);
    const auto& curve = row_named(rows, "curve length perturbation");
    CHECK(curve.observed == 0.0);
    CHECK(curve.bound == 0.0);
    CHECK(curve.slack == 0.0);
    for (const char* lemma : {"distance lower bound", "monotone uniform bound", "constant-r length bound",
                              "diameter bound", "bilipschitz sandwich"}) {
        CHECK_MESSAGE(row_named(rows, lemma).ok(), lemma);
    }
    // The stated theta-energy bound fails for near-level geodesics, even on the flat torus.
    PolylineCurve segment{{{0.0, 0.0}, {0.01, 3.0}}, {}};
    const WarpedSpace torus(flat.base(), flat.fiber(), WarpingProfile::constant(1.0));
    CHECK(theta_energy(torus, segment) == doctest::Approx(30.0));
    CHECK(theta_energy(torus, segment) > std::sqrt(curve_length(torus, segment)));
    CHECK_FALSE(row_named(rows, "theta energy bound").ok());
}

TEST_CASE("audits skip lemmas whose hypotheses fail") {
    const auto cinched = family(FamilyKind::CinchedTorus, 0.5);
    const auto rows = audit_theorem_bounds(cinched, 4, GridSpec{96, 96, 2, 0.0}, sample_plan(cinched, 4, {3, 3, 0}));
    CHECK(row_named(rows, "distance lower bound").skipped);
    const auto ridge = family(FamilyKind::SingleRidge, 2.0);
    const auto rrows = audit_theorem_bounds(ridge, 4, GridSpec{96, 96, 2, {}}, sample_plan(ridge, 4, {3, 3, 0}));
    CHECK_FALSE(row_named(rrows, "distance lower bound").skipped);
    CHECK(row_named(rrows, "distance lower bound").ok());
    CHECK(row_named(rrows, "bilipschitz sandwich").ok());
}

TEST_CASE("family experiments") {
    ExperimentOptions opt;
    opt.grid = GridSpec{96, 96, 2, {}};
    opt.plan = {4, 4, 0};
    const auto fam = family(FamilyKind::SingleRidge, 2.0);
    const auto a = run_family_experiment(fam, {2, 4}, opt);
    const auto b = run_family_experiment(fam, {2, 4}, opt);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.fixed_pairs == 16);
    CHECK(a.limits.size() == 1);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& r = a.rows[k];
        CHECK(r.eps.size() == 1);
        CHECK(r.gh_bound == 2 * r.eps[0].eps_hat);
        CHECK(r.flat_bound == doctest::Approx(std::pow(2.0, 1.5) * 8 * 2 * r.eps[0].eps_hat * 4 * M_PI * M_PI));
        CHECK(r.l2 <= r.l2_bound);
        CHECK(r.lambda == 2.0);
        CHECK(r.eps[0].eps_hat == b.rows[k].eps[0].eps_hat);
        CHECK(r.eps[0].per_pair.size() == r.samples);
    }
    CHECK(a.slacks.size() == b.slacks.size());
    CHECK_THROWS_AS(run_family_experiment(fam, {}, opt), InvalidInput);
}

TEST_CASE("worker thread count") {
    setenv("WARPCONV_THREADS", "3", 1);
    CHECK(worker_threads() == 3);
    setenv("WARPCONV_THREADS", "0", 1);
    CHECK(worker_threads() >= 1);
    unsetenv("WARPCONV_THREADS");
}

}  // TEST_SUITE
