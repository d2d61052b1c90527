#include <cmath>

#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"

namespace warpconv {

namespace {

// Minimizer of a convex function on [lo, hi] by golden section.
template <class F>
double golden_min(F f, double lo, double hi, int iterations = 90) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    return std::min({f(lo), f(hi), f1, f2});
}

}  // namespace

double level_set_distance(const WarpedSpace& space, double r0, double theta1, double theta2) {
    const double f0 = space.warp(r0);
    if (f0 > space.global_min() + 1e-9) {
        throw HypothesisError("f(r0) is not the global minimum of the profile");
    }
    return f0 * space.fiber().distance(theta1, theta2);
}

double taxi_upper_bound(const WarpedSpace& space, const SurfacePoint& x1, const SurfacePoint& x2) {
    space.check_point(x1);
    space.check_point(x2);
    const double dsigma = space.fiber().distance(x1.theta, x2.theta);
    double r_end = x2.r;
    if (space.base().is_circle()) r_end = x1.r + std::remainder(x2.r - x1.r, kTwoPi);
    const double base = std::abs(r_end - x1.r);
    if (dsigma == 0.0) return base;
    return base + space.min_warp(x1.r, r_end) * dsigma;
}

BypassBound ridge_bypass_bound(const WarpedSpace& space, double r_star, double r_hat, double theta1,
                               double theta2) {
    const double dsigma = space.fiber().distance(theta1, theta2);
    const double shift = space.base().distance(r_star, r_hat);
    BypassBound out;
    out.bound = 2.0 * shift + space.warp(r_hat) * dsigma;
    out.improves = dsigma > 0.0 && space.warp(r_hat) < space.warp(r_star) - 2.0 * shift / dsigma;
    return out;
}

double product_distance(const BaseSpace& base, const FiberSpace& fiber, double c, const SurfacePoint& x1,
                        const SurfacePoint& x2) {
    return std::hypot(base.distance(x1.r, x2.r), c * fiber.distance(x1.theta, x2.theta));
}

double cinch_limit_distance(double h0, double cinch_r, const BaseSpace& base, const FiberSpace& fiber,
                            const SurfacePoint& x1, const SurfacePoint& x2) {
    if (!(h0 > 0.0 && h0 <= 1.0)) throw InvalidInput("cinch depth h0 must lie in (0, 1]");
    if (!base.contains(cinch_r) || !base.contains(x1.r) || !base.contains(x2.r)) {
        throw DomainError("coordinate outside the base");
    }
    double best = product_distance(base, fiber, 1.0, x1, x2);
    const double d1 = base.distance(x1.r, cinch_r);
    const double d2 = base.distance(x2.r, cinch_r);
    const double shift = fiber.displacement(x1.theta, x2.theta);
    for (int w = -1; w <= 1; ++w) {
        const double t = shift + w * fiber.circumference;
        const double lo = std::min(0.0, t), hi = std::max(0.0, t);
        // Enter the cinch level at fiber offset a, leave it at offset b (relative to theta1).
        // For fixed b the optimal a lies between 0 and b; b itself lies between 0 and t.
        auto outer = [&](double b) {
            const double a_lo = std::min(0.0, b), a_hi = std::max(0.0, b);
            return golden_min(
                [&](double a) { return std::hypot(d1, a) + h0 * std::abs(b - a) + std::hypot(d2, t - b); }, a_lo,
                a_hi);
        };
        best = std::min(best, golden_min(outer, lo, hi));
    }
    return best;
}

}  // namespace warpconv
