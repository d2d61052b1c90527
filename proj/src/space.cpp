#include "warpconv/space.hpp"

#include <algorithm>
#include <cmath>

#include "warpconv/errors.hpp"
#include "warpconv/quadrature.hpp"

namespace warpconv {

namespace {
constexpr double kDomainSlack = 1e-12;
constexpr double kPi = std::numbers::pi;
}  // namespace

FiberSpace::FiberSpace(double c) : circumference(c) {
    if (!std::isfinite(c) || c <= 0.0) throw InvalidInput("fiber circumference must be positive");
}

double FiberSpace::wrap(double theta) const {
    double t = std::fmod(theta, circumference);
    if (t < 0.0) t += circumference;
    if (t >= circumference) t = 0.0;
    return t;
}

double FiberSpace::displacement(double theta1, double theta2) const {
    double d = std::remainder(theta2 - theta1, circumference);
    if (d < -0.5 * circumference) d += circumference;
    if (d > 0.5 * circumference) d -= circumference;
    return d;
}

double FiberSpace::distance(double theta1, double theta2) const {
    return std::abs(displacement(theta1, theta2));
}

BaseSpace BaseSpace::interval(double r0, double r1) {
    if (!std::isfinite(r0) || !std::isfinite(r1) || !(r0 < r1)) {
        throw InvalidInput("interval base needs r0 < r1");
    }
    return BaseSpace{Kind::Interval, r0, r1};
}

BaseSpace BaseSpace::circle() { return BaseSpace{Kind::Circle, -kPi, kPi}; }

bool BaseSpace::contains(double r) const {
    if (!std::isfinite(r)) return false;
    if (is_circle()) return true;
    return r >= r0 - kDomainSlack && r <= r1 + kDomainSlack;
}

double BaseSpace::wrap(double r) const {
    if (!is_circle()) return r;
    double t = std::fmod(r + kPi, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t - kPi;
}

double BaseSpace::distance(double ra, double rb) const {
    if (!is_circle()) return std::abs(rb - ra);
    return std::abs(std::remainder(rb - ra, kTwoPi));
}

WarpedSpace::WarpedSpace(BaseSpace base, FiberSpace fiber, WarpingProfile profile)
    : base_(base), fiber_(fiber), profile_(std::move(profile)) {
    if (!base_.is_circle() && !(base_.r0 < base_.r1)) throw InvalidInput("interval base needs r0 < r1");
    if (!(global_min() > 0.0)) throw InvalidInput("warping profile must be positive on the base");
}

double WarpedSpace::warp(double r) const {
    if (!base_.contains(r)) throw DomainError("base coordinate outside the domain");
    return profile_(base_.wrap(r));
}

double WarpedSpace::warp_increment(double r, double dr) const {
    if (!base_.contains(r) || !base_.contains(r + dr)) throw DomainError("base coordinate outside the domain");
    const double w = base_.wrap(r);
    if (base_.is_circle() && std::abs(base_.wrap(r + dr) - (w + dr)) > 1e-9) return warp(r + dr) - warp(r);
    return profile_.increment(w, dr);
}

void WarpedSpace::check_point(const SurfacePoint& p) const {
    if (!base_.contains(p.r)) throw DomainError("point base coordinate outside the domain");
    if (!std::isfinite(p.theta)) throw DomainError("point fiber coordinate is not finite");
}

template <class Visit>
void WarpedSpace::for_each_base_chunk(double a, double b, Visit&& visit) const {
    // visit(lo, hi, offset): wrapped chunk [lo, hi] equal to unwrapped [lo + offset, hi + offset].
    if (!(b > a)) return;
    if (!base_.is_circle()) {
        if (!base_.contains(a) || !base_.contains(b)) throw DomainError("base range outside the domain");
        visit(a, b, 0.0);
        return;
    }
    double k = std::floor((a + kPi) / kTwoPi);
    double x = a;
    while (x < b) {
        const double offset = k * kTwoPi;
        const double seam = offset + kPi;
        const double hi = std::min(b, seam);
        if (hi > x) visit(std::max(-kPi, x - offset), std::min(kPi, hi - offset), offset);
        x = hi;
        k += 1.0;
    }
}

double WarpedSpace::integrate_base(double a, double b, const std::function<double(double)>& g,
                                   QuadratureRule rule) const {
    double sum = 0.0;
    for_each_base_chunk(a, b, [&](double lo, double hi, double) {
        sum += profile_.integrate(lo, hi, g, rule);
    });
    return sum;
}

double WarpedSpace::min_warp(double a, double b) const {
    if (a > b) std::swap(a, b);
    if (a == b) return warp(a);
    double m = std::numeric_limits<double>::infinity();
    for_each_base_chunk(a, b, [&](double lo, double hi, double) { m = std::min(m, profile_.min_on(lo, hi)); });
    return m;
}

double WarpedSpace::max_warp(double a, double b) const {
    if (a > b) std::swap(a, b);
    if (a == b) return warp(a);
    double m = -std::numeric_limits<double>::infinity();
    for_each_base_chunk(a, b, [&](double lo, double hi, double) { m = std::max(m, profile_.max_on(lo, hi)); });
    return m;
}

std::vector<double> WarpedSpace::breakpoints(double a, double b) const {
    std::vector<double> out;
    for_each_base_chunk(a, b, [&](double lo, double hi, double offset) {
        if (lo + offset > a && (out.empty() || out.back() < lo + offset)) out.push_back(lo + offset);
        for (double x : profile_.breakpoints(lo, hi)) out.push_back(x + offset);
    });
    return out;
}

double WarpedSpace::global_min() const { return profile_.min_on(base_.r0, base_.r1); }
double WarpedSpace::global_max() const { return profile_.max_on(base_.r0, base_.r1); }

double WarpedSpace::segment_length(double r, double dr, double dtheta, QuadratureRule rule) const {
    if (dtheta == 0.0) return std::abs(dr);
    if (dr == 0.0) return warp(r) * std::abs(dtheta);
    const double lo = std::min(r, r + dr);
    const double hi = std::max(r, r + dr);
    const double dr2 = dr * dr;
    const double dt2 = dtheta * dtheta;
    const double integral =
        integrate_base(lo, hi, [&](double f) { return std::sqrt(dr2 + f * f * dt2); }, rule);
    return integral / std::abs(dr);
}

double evaluate_profile(const WarpedSpace& space, double r) { return space.warp(r); }

namespace {

void check_curve(const WarpedSpace& space, const PolylineCurve& curve) {
    if (curve.vertices.size() < 2) throw InvalidInput("curve needs at least two vertices");
    if (!curve.wraps.empty() && curve.wraps.size() != curve.segment_count()) {
        throw InvalidInput("curve needs one wrap entry per segment");
    }
    for (const SurfacePoint& p : curve.vertices) space.check_point(p);
}

struct Displacement {
    double dr;
    double dtheta;
};

Displacement segment_displacement(const WarpedSpace& space, const PolylineCurve& curve, std::size_t i) {
    const SurfacePoint& u = curve.vertices[i];
    const SurfacePoint& v = curve.vertices[i + 1];
    const SegmentWrap w = curve.wrap_of(i);
    if (w.base != 0 && !space.base().is_circle()) throw InvalidInput("base wrap on an interval base");
    return {v.r - u.r + w.base * kTwoPi, v.theta - u.theta + w.fiber * space.fiber().circumference};
}

}  // namespace

double curve_length(const WarpedSpace& space, const PolylineCurve& curve, QuadratureRule rule) {
    check_curve(space, curve);
    double total = 0.0;
    for (std::size_t i = 0; i < curve.segment_count(); ++i) {
        const Displacement d = segment_displacement(space, curve, i);
        if (d.dr == 0.0 && d.dtheta == 0.0) throw InvalidInput("consecutive curve vertices coincide");
        total += space.segment_length(curve.vertices[i].r, d.dr, d.dtheta, rule);
    }
    return total;
}

double theta_energy(const WarpedSpace& space, const PolylineCurve& curve) {
    check_curve(space, curve);
    double sum = 0.0;
    int sign = 0;
    for (std::size_t i = 0; i < curve.segment_count(); ++i) {
        const Displacement d = segment_displacement(space, curve, i);
        const int s = d.dr > 0.0 ? 1 : (d.dr < 0.0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign)) {
            throw InvalidInput("theta energy needs a curve strictly monotone in r");
        }
        sign = s;
        sum += d.dtheta * d.dtheta / std::abs(d.dr);
    }
    return std::sqrt(sum);
}

double lp_profile_distance(const WarpingProfile& f, const WarpingProfile& g, double a, double b,
                           double p, QuadratureRule rule) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("L^p exponent must satisfy p >= 1");
    if (a > b) std::swap(a, b);
    double integral = 0.0;
    if (g.is_constant() || f.is_constant()) {
        const WarpingProfile& varying = g.is_constant() ? f : g;
        const double c = g.is_constant() ? g.level() : f.level();
        integral = varying.integrate(a, b, [&](double x) { return std::pow(std::abs(x - c), p); }, rule);
    } else {
        std::vector<double> cuts = f.breakpoints(a, b);
        const std::vector<double> more = g.breakpoints(a, b);
        cuts.insert(cuts.end(), more.begin(), more.end());
        cuts.push_back(a);
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 1; k < cuts.size(); ++k) {
            integral += composite(
                cuts[k - 1], cuts[k], [&](double x) { return std::pow(std::abs(f(x) - g(x)), p); }, rule);
        }
    }
    return std::pow(integral, 1.0 / p);
}

double lp_profile_distance(const WarpedSpace& f, const WarpedSpace& g, double p, QuadratureRule rule) {
    if (f.base().kind != g.base().kind || f.base().r0 != g.base().r0 || f.base().r1 != g.base().r1) {
        throw InvalidInput("profiles must share the base domain");
    }
    return lp_profile_distance(f.profile(), g.profile(), f.base().r0, f.base().r1, p, rule);
}

DiameterBound diameter_upper_bound(const WarpedSpace& limit, double delta_l2) {
    if (!(delta_l2 >= 0.0) || !std::isfinite(delta_l2)) throw InvalidInput("L2 distance must be nonnegative");
    DiameterBound out;
    const double len = limit.base().is_circle() ? kTwoPi : limit.base().length();
    out.circle_base_modified = limit.base().is_circle();
    out.value = 2.0 * len + (limit.global_max() + delta_l2 / std::sqrt(len)) * limit.fiber().diameter();
    return out;
}

double bilipschitz_lambda(const WarpedSpace& space) {
    const double a = space.global_min();
    const double b = space.global_max();
    return std::max(1.0 / std::min(a, 1.0), std::max(1.0, b));
}

}  // namespace warpconv
