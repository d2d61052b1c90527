#pragma once

#include <numbers>
#include <vector>

#include "warpconv/profile.hpp"

namespace warpconv {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Circle fiber with arc distance.
struct FiberSpace {
    double circumference = kTwoPi;

    explicit FiberSpace(double c = kTwoPi);
    [[nodiscard]] double distance(double theta1, double theta2) const;
    [[nodiscard]] double diameter() const { return 0.5 * circumference; }
    /// Representative of theta in [0, circumference).
    [[nodiscard]] double wrap(double theta) const;
    /// Signed shortest displacement from theta1 to theta2, in [-C/2, C/2].
    [[nodiscard]] double displacement(double theta1, double theta2) const;
};

/// Interval [r0, r1], or the circle of length 2*pi with coordinates in [-pi, pi).
struct BaseSpace {
    enum class Kind { Interval, Circle };
    Kind kind = Kind::Interval;
    double r0 = -std::numbers::pi;
    double r1 = std::numbers::pi;

    static BaseSpace interval(double r0, double r1);
    static BaseSpace circle();

    [[nodiscard]] bool is_circle() const { return kind == Kind::Circle; }
    [[nodiscard]] double length() const { return r1 - r0; }
    [[nodiscard]] bool contains(double r) const;
    /// Minor-arc distance on the circle; |r2 - r1| on an interval.
    [[nodiscard]] double distance(double ra, double rb) const;
    /// Circle: representative in [-pi, pi). Interval: identity.
    [[nodiscard]] double wrap(double r) const;
};

struct SurfacePoint {
    double r = 0.0;
    double theta = 0.0;
};

/// Segment i runs from vertices[i] to vertices[i+1]; its displacement is
/// (dr + base_wrap * 2pi, dtheta + fiber_wrap * C), so wraps pick the sheet
/// of the covering space the segment is drawn in.
struct SegmentWrap {
    int base = 0;
    int fiber = 0;
};

struct PolylineCurve {
    std::vector<SurfacePoint> vertices;
    std::vector<SegmentWrap> wraps;  // empty, or one per segment

    [[nodiscard]] std::size_t segment_count() const {
        return vertices.empty() ? 0 : vertices.size() - 1;
    }
    [[nodiscard]] SegmentWrap wrap_of(std::size_t segment) const {
        return wraps.empty() ? SegmentWrap{} : wraps[segment];
    }
};

class WarpedSpace {
public:
    WarpedSpace(BaseSpace base, FiberSpace fiber, WarpingProfile profile);

    [[nodiscard]] const BaseSpace& base() const { return base_; }
    [[nodiscard]] const FiberSpace& fiber() const { return fiber_; }
    [[nodiscard]] const WarpingProfile& profile() const { return profile_; }

    /// f(r); throws DomainError outside an interval base, wraps on a circle.
    [[nodiscard]] double warp(double r) const;
    /// warp(r + dr) - warp(r), accurate for small dr.
    [[nodiscard]] double warp_increment(double r, double dr) const;
    void check_point(const SurfacePoint& p) const;

    /// Integral of g(f(r)) over the unwrapped base range [a, b], a <= b.
    /// On a circle base the range may cross the seam any number of times.
    [[nodiscard]] double integrate_base(double a, double b, const std::function<double(double)>& g,
                                        QuadratureRule rule) const;
    /// min / max of f over the unwrapped base range between a and b.
    [[nodiscard]] double min_warp(double a, double b) const;
    [[nodiscard]] double max_warp(double a, double b) const;
    /// Breakpoints of f strictly inside the unwrapped range (a, b), in unwrapped coordinates.
    [[nodiscard]] std::vector<double> breakpoints(double a, double b) const;
    [[nodiscard]] double global_min() const;
    [[nodiscard]] double global_max() const;

    /// Length of the straight coordinate segment with displacement (dr, dtheta) from base coordinate r.
    [[nodiscard]] double segment_length(double r, double dr, double dtheta, QuadratureRule rule) const;

private:
    template <class Visit>
    void for_each_base_chunk(double a, double b, Visit&& visit) const;

    BaseSpace base_;
    FiberSpace fiber_;
    WarpingProfile profile_;
};

// Basic functionals.

double evaluate_profile(const WarpedSpace& space, double r);

/// Default rule: 64 midpoint subintervals per smooth piece of each segment.
double curve_length(const WarpedSpace& space, const PolylineCurve& curve,
                    QuadratureRule rule = QuadratureRule::midpoint(64));

/// sqrt(integral of theta'(r)^2 dr); requires strictly monotone r along the curve.
double theta_energy(const WarpedSpace& space, const PolylineCurve& curve);

/// L^p distance between two profiles over [a, b].
double lp_profile_distance(const WarpingProfile& f, const WarpingProfile& g, double a, double b,
                           double p, QuadratureRule rule = QuadratureRule::gauss(16));
double lp_profile_distance(const WarpedSpace& f, const WarpedSpace& g, double p,
                           QuadratureRule rule = QuadratureRule::gauss(16));

struct DiameterBound {
    double value = 0.0;
    bool circle_base_modified = false;  // 2*pi base term and sqrt(2*pi) used
};

/// 2|r1 - r0| + (sup f + delta_l2 / sqrt|r1 - r0|) * Diam(fiber), for the limit space `limit`.
DiameterBound diameter_upper_bound(const WarpedSpace& limit, double delta_l2);

/// max(1 / min(inf f, 1), max(sup f, 1)).
double bilipschitz_lambda(const WarpedSpace& space);

}  // namespace warpconv
