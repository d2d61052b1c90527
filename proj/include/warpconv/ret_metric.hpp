#pragma once

#include "warpconv/space.hpp"

namespace warpconv {

/// Minimized R-stretched Euclidean taxi metric on base x fiber:
/// min over 0 <= T <= d_fiber of sqrt(ds^2 + R^2 T^2) + d_fiber - T.
struct RETParams {
    double R = 2.0;
    BaseSpace base;
    FiberSpace fiber;
};

/// Fiber separation below which the Euclidean branch wins: ds / (R sqrt(R^2 - 1)).
double ret_threshold(double R, double ds);

/// Closed form in terms of the base and fiber separations.
double ret_distance(double R, double ds, double dsigma);
double ret_distance(const RETParams& params, const SurfacePoint& x1, const SurfacePoint& x2);

/// Uniform grid over T, then safeguarded Newton inside the cells next to the best node. grid_n >= 1000.
double ret_distance_bruteforce(double R, double ds, double dsigma, int grid_n);
double ret_distance_bruteforce(const RETParams& params, const SurfacePoint& x1, const SurfacePoint& x2,
                               int grid_n = 1000);

/// Closed polygon around the ball of the given radius, one vertex per direction, in the
/// unwrapped chart centered at `center`. Found by bisection along each ray.
PolylineCurve ret_ball_boundary(const RETParams& params, const SurfacePoint& center, double radius,
                                int samples_n);

}  // namespace warpconv
