#include <algorithm>
#include <cmath>

#include "warpconv/errors.hpp"
#include "warpconv/ret_metric.hpp"

namespace warpconv {

namespace {

void check_R(double R) {
    if (!(R > 1.0) || !std::isfinite(R)) throw InvalidInput("R must exceed 1");
}

double base_separation(const RETParams& params, const SurfacePoint& x1, const SurfacePoint& x2) {
    if (!params.base.contains(x1.r) || !params.base.contains(x2.r)) throw DomainError("point outside the base");
    return params.base.distance(x1.r, x2.r);
}

}  // namespace

double ret_threshold(double R, double ds) {
    check_R(R);
    return ds / (R * std::sqrt(R * R - 1.0));
}

double ret_distance(double R, double ds, double dsigma) {
    check_R(R);
    ds = std::abs(ds);
    dsigma = std::abs(dsigma);
    if (dsigma <= ret_threshold(R, ds)) return std::hypot(ds, R * dsigma);
    return ds * std::sqrt(R * R - 1.0) / R + dsigma;
}

double ret_distance(const RETParams& params, const SurfacePoint& x1, const SurfacePoint& x2) {
    return ret_distance(params.R, base_separation(params, x1, x2), params.fiber.distance(x1.theta, x2.theta));
}

double ret_distance_bruteforce(double R, double ds, double dsigma, int grid_n) {
    check_R(R);
    if (grid_n < 1000) throw InvalidInput("grid_n must be at least 1000");
    ds = std::abs(ds);
    dsigma = std::abs(dsigma);
    auto g = [&](double t) { return std::hypot(ds, R * t) + dsigma - t; };
    double best_t = 0.0, best = g(0.0);
    for (int i = 1; i <= grid_n; ++i) {
        const double t = dsigma * i / grid_n;
        const double v = g(t);
        if (v < best) best = v, best_t = t;
    }
    // Newton polish on g' inside the cells around the best node, falling back to bisection.
    const double h = dsigma / grid_n;
    auto slope = [&](double t) {
        const double e = std::hypot(ds, R * t);
        return e > 0.0 ? R * R * t / e - 1.0 : -1.0;
    };
    double lo = std::max(0.0, best_t - h), hi = std::min(dsigma, best_t + h);
    if (ds > 0.0 && slope(lo) < 0.0 && slope(hi) > 0.0) {
        double t = best_t;
        for (int it = 0; it < 100; ++it) {
            const double d1 = slope(t);
            (d1 < 0.0 ? lo : hi) = t;
            const double e = std::hypot(ds, R * t);
            double next = t - d1 * e * e * e / (R * R * ds * ds);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) <= 1e-16 * (1.0 + t)) break;
            t = next;
        }
        best = std::min(best, g(t));
    }
    return best;
}

double ret_distance_bruteforce(const RETParams& params, const SurfacePoint& x1, const SurfacePoint& x2,
                               int grid_n) {
    return ret_distance_bruteforce(params.R, base_separation(params, x1, x2),
                                   params.fiber.distance(x1.theta, x2.theta), grid_n);
}

PolylineCurve ret_ball_boundary(const RETParams& params, const SurfacePoint& center, double radius,
                                int samples_n) {
    check_R(params.R);
    if (!(radius > 0.0)) throw InvalidInput("radius must be positive");
    if (samples_n < 3) throw InvalidInput("samples_n must be at least 3");
    PolylineCurve out;
    out.vertices.reserve(samples_n + 1);
    for (int i = 0; i < samples_n; ++i) {
        const double phi = kTwoPi * i / samples_n;
        const double c = std::cos(phi), s = std::sin(phi);
        auto excess = [&](double t) { return ret_distance(params.R, t * c, t * s) - radius; };
        double lo = 0.0, hi = radius;
        while (excess(hi) < 0.0) lo = hi, hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) < 0.0 ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        out.vertices.push_back({center.r + t * c, center.theta + t * s});
    }
    out.vertices.push_back(out.vertices.front());
    return out;
}

}  // namespace warpconv
