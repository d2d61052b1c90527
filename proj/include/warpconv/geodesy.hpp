#pragma once

#include "warpconv/grid.hpp"
#include "warpconv/space.hpp"

namespace warpconv {

struct ClairautOptions {
    double tol = 1e-9;          // fiber-coordinate arrival tolerance
    int max_winding = 2;        // fiber windings -max..max are tried
    int turning_samples = 96;   // scan resolution for one-turn geodesics
    int max_iterations = 200;
};

/// Shortest of the geodesics found by shooting with the conserved quantity
/// c = f(r)^2 theta'. Candidates: paths monotone in r, paths with one turning
/// point beyond either endpoint, and taxi paths through a profile minimum.
/// converged is false when no shooting candidate met the tolerance.
GeodesicResult clairaut_distance(const WarpedSpace& space, const SurfacePoint& p, const SurfacePoint& q,
                                 const ClairautOptions& options = {});

/// f(r0) * d_fiber(theta1, theta2). Throws HypothesisError unless f(r0) is the global minimum.
double level_set_distance(const WarpedSpace& space, double r0, double theta1, double theta2);

/// base distance + (min of f between r1 and r2) * d_fiber. On a circle base the minor arc is used.
double taxi_upper_bound(const WarpedSpace& space, const SurfacePoint& x1, const SurfacePoint& x2);

struct BypassBound {
    double bound = 0.0;
    /// Strict improvement over the level path at r_star:
    /// f(r_hat) < f(r_star) - 2 |r_hat - r_star| / d_fiber (false when d_fiber = 0).
    bool improves = false;
};

/// 2 |r_hat - r_star| + f(r_hat) * d_fiber(theta1, theta2).
BypassBound ridge_bypass_bound(const WarpedSpace& space, double r_star, double r_hat, double theta1,
                               double theta2);

/// Distance on the flat product base x fiber with f = c: min over base and fiber
/// wraps of sqrt(dr^2 + c^2 dtheta^2).
double product_distance(const BaseSpace& base, const FiberSpace& fiber, double c, const SurfacePoint& x1,
                        const SurfacePoint& x2);

/// Distance in the limit of a cinch family: the unit product with the single level
/// r = cinch_r replaced by a fiber of scale h0. Minimizes over the entry and exit points
/// on the cinch level (golden section, windings -1..1) and compares with the product distance.
double cinch_limit_distance(double h0, double cinch_r, const BaseSpace& base, const FiberSpace& fiber,
                            const SurfacePoint& x1, const SurfacePoint& x2);

}  // namespace warpconv
