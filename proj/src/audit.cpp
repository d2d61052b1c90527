#include <algorithm>
#include <cmath>
#include <cstdio>

#include "warpconv/convergence.hpp"
#include "warpconv/geodesy.hpp"

namespace warpconv {

namespace {

constexpr int kDimension = 2;
constexpr double kQuadratureTol = 1e-9;
constexpr int kGeodesicSamples = 16;
// Shooting integrates every smooth piece of f separately; beyond this many it is too slow.
constexpr std::uint64_t kShootingPieces = 64;

std::string pair_tag(std::size_t i, const SamplePair& s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "pair %zu (%.6g,%.6g)-(%.6g,%.6g)", i, s.p.r, s.p.theta, s.q.r, s.q.theta);
    return buf;
}

// Keeps the row with the smallest normalized slack.
struct Worst {
    SlackRow row;
    bool any = false;

    void offer(const std::string& item, double bound, double observed, double slack, double tol) {
        const double score = slack + tol;
        if (any && score >= row.slack + row.tol) return;
        row.item = item;
        row.bound = bound;
        row.observed = observed;
        row.slack = slack;
        row.tol = tol;
        any = true;
    }
};

SlackRow skipped(const std::string& lemma, int j, const std::string& reason) {
    SlackRow r;
    r.lemma = lemma;
    r.j = j;
    r.skipped = true;
    r.reason = reason;
    return r;
}

SlackRow finish(Worst& w, const std::string& lemma, int j, const char* empty_reason) {
    if (!w.any) return skipped(lemma, j, empty_reason);
    w.row.lemma = lemma;
    w.row.j = j;
    return w.row;
}

// Curves monotone in r from p to q: the straight segment and a sinusoidal detour.
std::vector<std::pair<std::string, PolylineCurve>> test_curves(const FiberSpace& fiber,
                                                               const std::vector<SamplePair>& plan) {
    std::vector<std::pair<std::string, PolylineCurve>> out;
    for (std::size_t i = 0; i < plan.size() && out.size() < 16; ++i) {
        const SamplePair& s = plan[i];
        if (std::abs(s.q.r - s.p.r) < 1e-3) continue;
        const double dt = fiber.displacement(s.p.theta, s.q.theta);
        for (double wave : {0.0, 0.5}) {
            PolylineCurve c;
            const int n = 96;
            for (int k = 0; k <= n; ++k) {
                const double u = static_cast<double>(k) / n;
                c.vertices.push_back({s.p.r + (s.q.r - s.p.r) * u,
                                      s.p.theta + dt * u + wave * std::sin(std::numbers::pi * u)});
            }
            out.emplace_back(pair_tag(i, s) + (wave > 0 ? " wavy" : " straight"), std::move(c));
        }
    }
    return out;
}

}  // namespace

std::vector<SlackRow> audit_theorem_bounds(const SequenceFamily& family, int j, const GridSpec& grid,
                                           const std::vector<SamplePair>& plan) {
    const GridGraph g(family_space(family, j), grid);
    return audit_theorem_bounds(family, j, grid, plan, batch_grid_distances(g, plan));
}

std::vector<SlackRow> audit_theorem_bounds(const SequenceFamily& family, int j, const GridSpec&,
                                           const std::vector<SamplePair>& plan,
                                           const std::vector<PairDistance>& dj) {
    const WarpedSpace space = family_space(family, j);
    const BaseSpace base = family.base();
    const FiberSpace fiber = family.fiber();
    const double f_inf = family.lp_limit_level();
    const WarpedSpace limit(base, fiber, WarpingProfile::constant(f_inf));
    const double len = base.is_circle() ? kTwoPi : base.length();
    const double delta = lp_profile_distance(space, limit, 2.0);
    const double limit_l2_sq = f_inf * f_inf * len;
    const double m_j = space.global_min();
    const double lambda = bilipschitz_lambda(space);
    const double diam_bound = diameter_upper_bound(limit, delta).value;
    // Diameter of the flat product: farthest base separation and half the fiber.
    const double diam_inf = std::hypot(base.is_circle() ? std::numbers::pi : len, f_inf * fiber.diameter());

    std::vector<SlackRow> rows;

    {
        Worst w;
        const std::string lemma = "distance lower bound";
        if (!(m_j >= f_inf - 1.0 / j && f_inf - 1.0 / j > 0.0)) {
            rows.push_back(skipped(lemma, j, "needs f_j >= f_inf - 1/j > 0"));
        } else {
            const double bound = -std::sqrt(2.0) * std::sqrt(f_inf) * diam_bound / (m_j * std::sqrt(double(j)));
            for (std::size_t i = 0; i < plan.size(); ++i) {
                const double obs = dj[i].value - product_distance(base, fiber, f_inf, plan[i].p, plan[i].q);
                w.offer(pair_tag(i, plan[i]), bound, obs, obs - bound, dj[i].error);
            }
            rows.push_back(finish(w, lemma, j, "no pairs"));
        }
    }

    {
        Worst w;
        const double bound = (delta * delta + 4.0 * limit_l2_sq) * std::sqrt(delta) * std::sqrt(double(kDimension)) *
                             diam_inf / f_inf;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            if (base.distance(plan[i].p.r, plan[i].q.r) == 0.0) continue;
            const double obs = dj[i].value - product_distance(base, fiber, f_inf, plan[i].p, plan[i].q);
            w.offer(pair_tag(i, plan[i]), bound, obs, bound - obs, dj[i].error);
        }
        rows.push_back(finish(w, "monotone uniform bound", j, "no pairs with distinct base coordinates"));
    }

    {
        Worst w;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const double ds = fiber.distance(plan[i].p.theta, plan[i].q.theta);
            if (plan[i].p.r != plan[i].q.r || ds == 0.0) continue;
            const double l_inf = f_inf * ds;
            double bound = l_inf;
            if (delta > 0.0) {
                const double eps = std::cbrt(8.0 * delta * delta / ds);
                bound += 4.0 * delta * delta / (eps * eps) + eps * ds;
            }
            w.offer(pair_tag(i, plan[i]), bound, dj[i].value, bound - dj[i].value, dj[i].error);
        }
        rows.push_back(finish(w, "constant-r length bound", j, "no same-level pairs"));
    }

    {
        Worst w;
        for (const auto& [tag, curve] : test_curves(fiber, plan)) {
            const double lj = curve_length(space, curve, QuadratureRule::gauss(8));
            const double linf = curve_length(limit, curve, QuadratureRule::gauss(8));
            const double bound = (delta * delta + 4.0 * limit_l2_sq) * std::sqrt(delta) * theta_energy(space, curve);
            const double obs = std::abs(lj - linf);
            w.offer(tag, bound, obs, bound - obs, kQuadratureTol * (1.0 + lj));
        }
        rows.push_back(finish(w, "curve length perturbation", j, "no monotone test curves"));
    }

    {
        // Shortest geodesics that are strictly monotone in r.
        Worst w;
        int used = 0;
        const double lo = base.is_circle() ? -std::numbers::pi : base.r0;
        const double hi = base.is_circle() ? std::numbers::pi : base.r1;
        const bool shootable = space.profile().breakpoint_count(lo, hi) <= kShootingPieces;
        for (std::size_t i = 0; shootable && i < plan.size() && used < kGeodesicSamples; ++i) {
            if (base.distance(plan[i].p.r, plan[i].q.r) == 0.0) continue;
            try {
                const GeodesicResult geo = clairaut_distance(space, plan[i].p, plan[i].q);
                if (!geo.converged) continue;
                const double big_theta = theta_energy(space, geo.path);
                const double bound = std::sqrt(double(kDimension - 1)) * std::sqrt(geo.distance) / m_j;
                w.offer(pair_tag(i, plan[i]), bound, big_theta, bound - big_theta,
                        1e-6 * (1.0 + big_theta) + geo.error_estimate);
                ++used;
            } catch (const std::exception&) {
                continue;  // not monotone in r, or too many profile pieces to shoot through
            }
        }
        rows.push_back(finish(w, "theta energy bound", j,
                              shootable ? "no monotone geodesics" : "profile has too many pieces to shoot through"));
    }

    {
        Worst w;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            w.offer(pair_tag(i, plan[i]), diam_bound, dj[i].value, diam_bound - dj[i].value, dj[i].error);
        }
        rows.push_back(finish(w, "diameter bound", j, "no pairs"));
    }

    {
        Worst w;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const double d1 = product_distance(base, fiber, 1.0, plan[i].p, plan[i].q);
            const double lo = d1 / lambda, hi = lambda * d1;
            const double v = dj[i].value;
            const double slack = std::min(v - lo, hi - v);
            w.offer(pair_tag(i, plan[i]), v - lo < hi - v ? lo : hi, v, slack, dj[i].error);
        }
        rows.push_back(finish(w, "bilipschitz sandwich", j, "no pairs"));
    }
    return rows;
}

}  // namespace warpconv
