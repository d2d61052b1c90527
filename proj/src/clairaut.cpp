#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"

namespace warpconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Candidate {
    double length = kInf;
    bool shooting = false;
    bool converged = false;
    std::vector<SurfacePoint> unwrapped;  // vertices in the covering plane
};

class Shooter {
public:
    explicit Shooter(const WarpedSpace& space) : space_(space) {}

    double f(double u) const { return space_.warp(u); }

    // Split points of f inside (a, b) plus the midpoints between them (bump centers).
    std::vector<double> splits(double a, double b) const {
        std::vector<double> bp = space_.breakpoints(a, b);
        std::vector<double> out{a};
        for (double x : bp) {
            out.push_back(0.5 * (out.back() + x));
            out.push_back(x);
        }
        out.push_back(0.5 * (out.back() + b));
        out.push_back(b);
        return out;
    }

    template <class H>
    double integrate(H h, const std::vector<double>& cuts) const {
        double sum = 0.0;
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            if (cuts[i] > cuts[i - 1]) sum += GK::integrate(h, cuts[i - 1], cuts[i], 10, 1e-11);
        }
        return sum;
    }

    // Monotone geodesic from u = lo to u = hi with constant c: fiber advance and length.
    double mono_theta(double c, const std::vector<double>& cuts) const {
        if (c == 0.0) return 0.0;
        return integrate(
            [&](double u) {
                const double fu = f(u);
                const double q = (fu - c) * (fu + c);
                return q > 0.0 ? c / (fu * std::sqrt(q)) : kInf;
            },
            cuts);
    }

    double mono_length(double c, const std::vector<double>& cuts) const {
        return integrate(
            [&](double u) {
                const double fu = f(u);
                const double q = (fu - c) * (fu + c);
                return q > 0.0 ? fu / std::sqrt(q) : kInf;
            },
            cuts);
    }

    // Leg between a turning point ut (where f = c) and x, with u = ut + dir * s^2.
    // Returns (fiber advance, length).
    std::pair<double, double> turning_leg(double ut, double x, int dir, bool with_length = true) const {
        const double span = std::abs(x - ut);
        if (span == 0.0) return {0.0, 0.0};
        const double c = f(ut);
        std::vector<double> ucuts = splits(std::min(ut, x), std::max(ut, x));
        std::vector<double> scuts;
        for (double u : ucuts) scuts.push_back(std::sqrt(std::abs(u - ut)));
        std::sort(scuts.begin(), scuts.end());
        // Near the turning point f - c ~ f'(ut) s^2, so 2 s / sqrt(f^2 - c^2) stays bounded.
        const double s_probe = 1e-4 * std::sqrt(span);
        if (!(space_.warp_increment(ut, dir * s_probe * s_probe) > 0.0)) return {kInf, kInf};
        auto weight = [&](double s) {
            const double diff = space_.warp_increment(ut, dir * s * s);
            const double q = diff * (2.0 * c + diff);
            const double w = q > 0.0 ? 2.0 * s / std::sqrt(q) : kInf;
            return std::pair<double, double>{w, c + diff};
        };
        const double theta = integrate([&](double s) { auto [w, fu] = weight(s); return c * w / fu; }, scuts);
        if (!with_length) return {theta, 0.0};
        const double len = integrate([&](double s) { auto [w, fu] = weight(s); return fu * w; }, scuts);
        return {theta, len};
    }

private:
    const WarpedSpace& space_;
};


// Root of g on [a, b] given opposite signs ga, gb (Illinois variant of regula falsi).
template <class G>
std::pair<double, bool> bracketed_root(G g, double a, double b, double ga, double gb, double tol, int max_it) {
    double x = a;
    for (int it = 0; it < max_it; ++it) {
        x = (a * gb - b * ga) / (gb - ga);
        if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        const double gx = g(x);
        if (std::abs(gx) <= tol) return {x, true};
        if ((gx < 0.0) != (gb < 0.0)) {
            a = b;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        b = x;
        gb = gx;
        if (std::abs(b - a) <= 1e-15 * (1.0 + std::abs(b))) break;
    }
    return {x, false};
}

// How a candidate geodesic is parametrized; enough to rebuild its polyline.
struct Shot {
    enum class Kind { Monotone, Turning, Taxi } kind = Kind::Monotone;
    double rb = 0.0;      // unwrapped base coordinate of the end point
    double value = 0.0;   // c (monotone), turning point (turning) or level (taxi)
    int dir = 1;          // turning: +1 turns below both endpoints, -1 above
    double advance = 0.0; // signed fiber advance
    double length = kInf;
    bool shooting = false;
    bool converged = false;
};

PolylineCurve to_curve(const WarpedSpace& space, std::vector<SurfacePoint> pts, const SurfacePoint& p,
                       const SurfacePoint& q) {
    const FiberSpace& fiber = space.fiber();
    const BaseSpace& base = space.base();
    std::vector<SurfacePoint> clean{pts.front()};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].r != clean.back().r || pts[i].theta != clean.back().theta) clean.push_back(pts[i]);
    }
    if (clean.size() < 2) clean.push_back(pts.back());
    PolylineCurve out;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        SurfacePoint w{base.is_circle() ? base.wrap(clean[i].r) : std::clamp(clean[i].r, base.r0, base.r1),
                       fiber.wrap(clean[i].theta)};
        if (i == 0) w = p;
        if (i + 1 == clean.size()) w = q;
        out.vertices.push_back(w);
    }
    for (std::size_t i = 0; i + 1 < clean.size(); ++i) {
        const double raw_r = clean[i + 1].r - clean[i].r;
        const double raw_t = clean[i + 1].theta - clean[i].theta;
        SegmentWrap w;
        if (base.is_circle()) {
            w.base = static_cast<int>(std::lround((raw_r - (out.vertices[i + 1].r - out.vertices[i].r)) / kTwoPi));
        }
        w.fiber = static_cast<int>(
            std::lround((raw_t - (out.vertices[i + 1].theta - out.vertices[i].theta)) / fiber.circumference));
        out.wraps.push_back(w);
    }
    return out;
}

std::vector<SurfacePoint> build_path(const Shooter& sh, const Shot& shot, const SurfacePoint& p) {
    constexpr int kSamples = 256;
    const double ra = p.r;
    const double sgn = shot.advance < 0.0 ? -1.0 : 1.0;
    std::vector<SurfacePoint> pts;
    switch (shot.kind) {
        case Shot::Kind::Taxi: {
            const double u = shot.value;
            pts = {{ra, p.theta}, {u, p.theta}, {u, p.theta + shot.advance}, {shot.rb, p.theta + shot.advance}};
            break;
        }
        case Shot::Kind::Monotone: {
            double theta = p.theta;
            pts.push_back({ra, theta});
            for (int k = 1; k <= kSamples; ++k) {
                const double u0 = ra + (shot.rb - ra) * (k - 1) / kSamples;
                const double u1 = ra + (shot.rb - ra) * k / kSamples;
                theta += sgn * sh.mono_theta(shot.value, sh.splits(std::min(u0, u1), std::max(u0, u1)));
                pts.push_back({u1, theta});
            }
            break;
        }
        case Shot::Kind::Turning: {
            const double ut = shot.value;
            const double total_a = sh.turning_leg(ut, ra, shot.dir, false).first;
            for (int k = 0; k <= kSamples; ++k) {
                // Leg from ra down (or up) to ut, spaced evenly in s = sqrt|u - ut|.
                const double s = std::sqrt(std::abs(ra - ut)) * (1.0 - static_cast<double>(k) / kSamples);
                const double u = ut + shot.dir * s * s;
                pts.push_back({u, p.theta + sgn * (total_a - sh.turning_leg(ut, u, shot.dir, false).first)});
            }
            for (int k = 1; k <= kSamples; ++k) {
                const double s = std::sqrt(std::abs(shot.rb - ut)) * static_cast<double>(k) / kSamples;
                const double u = ut + shot.dir * s * s;
                pts.push_back({u, p.theta + sgn * (total_a + sh.turning_leg(ut, u, shot.dir, false).first)});
            }
            break;
        }
    }
    pts.back() = {shot.rb, p.theta + shot.advance};
    return pts;
}

}  // namespace

GeodesicResult clairaut_distance(const WarpedSpace& space, const SurfacePoint& p, const SurfacePoint& q,
                                 const ClairautOptions& options) {
    space.check_point(p);
    space.check_point(q);
    const BaseSpace& base = space.base();
    const FiberSpace& fiber = space.fiber();
    const double base_shift = base.is_circle() ? std::remainder(q.r - p.r, kTwoPi) : q.r - p.r;
    const double fiber_shift = fiber.displacement(p.theta, q.theta);
    if (base_shift == 0.0 && fiber_shift == 0.0) throw InvalidInput("clairaut distance needs distinct points");
    if (options.max_winding < 0 || options.turning_samples < 4) throw InvalidInput("bad shooting options");

    const Shooter sh(space);
    const double ra = p.r;
    std::vector<double> ends{ra + base_shift};
    if (base.is_circle()) {
        ends.push_back(ra + base_shift + kTwoPi);
        ends.push_back(ra + base_shift - kTwoPi);
    }

    Shot best;
    bool any_converged = false;
    auto offer = [&](const Shot& s) {
        if (s.shooting && s.converged) any_converged = true;
        if (s.length < best.length) best = s;
    };

    for (double rb : ends) {
        const double lo = std::min(ra, rb), hi = std::max(ra, rb);
        const std::vector<double> cuts = hi > lo ? sh.splits(lo, hi) : std::vector<double>{};
        const double m = hi > lo ? space.min_warp(lo, hi) : space.warp(lo);
        for (int w = -options.max_winding; w <= options.max_winding; ++w) {
            const double advance = fiber_shift + w * fiber.circumference;
            const double target = std::abs(advance);

            // Geodesics monotone in r.
            if (hi > lo) {
                Shot s{Shot::Kind::Monotone, rb, 0.0, 1, advance};
                s.shooting = true;
                if (target == 0.0) {
                    s.length = hi - lo;
                    s.converged = true;
                    offer(s);
                } else {
                    const double c_hi = m * (1.0 - 1e-12);
                    const double g_hi = sh.mono_theta(c_hi, cuts) - target;
                    if (g_hi >= 0.0) {
                        auto [c, ok] = bracketed_root([&](double x) { return sh.mono_theta(x, cuts) - target; },
                                                      0.0, c_hi, -target, g_hi, options.tol, options.max_iterations);
                        s.value = c;
                        s.converged = ok;
                        s.length = sh.mono_length(c, cuts);
                        offer(s);
                    }
                }
            } else if (target > 0.0) {
                // A level circle is a geodesic where f' vanishes.
                const double h = 1e-6;
                if (std::abs(space.warp_increment(lo, h) - space.warp_increment(lo, -h)) <= 1e-12) {
                    Shot s{Shot::Kind::Taxi, rb, lo, 1, advance};
                    s.shooting = true;
                    s.converged = true;
                    s.length = space.warp(lo) * target;
                    offer(s);
                }
            }
        }

        // Geodesics with one turning point below (dir = +1) or above (dir = -1) both endpoints.
        // The fiber advance depends only on the turning point, so one scan serves every winding.
        for (int dir : {1, -1}) {
            const double edge = dir > 0 ? lo : hi;
            const double far = base.is_circle() ? edge - dir * std::numbers::pi : (dir > 0 ? base.r0 : base.r1);
            if (std::abs(far - edge) < 1e-12) continue;
            auto advance_at = [&](double ut) {
                return sh.turning_leg(ut, ra, dir, false).first + sh.turning_leg(ut, rb, dir, false).first;
            };
            // Turning points are valid where f grows away from them over the whole traversed
            // range. Valid samples come in runs; crossings are only searched inside a run.
            struct Sample {
                double u, advance;
                int run;
            };
            std::vector<Sample> scan;
            const int n = options.turning_samples;
            double prev_u = edge;
            bool prev_valid = false;
            int run = 0;
            for (int i = 1; i <= n; ++i) {
                const double t = static_cast<double>(i) / n;
                const double ut = edge + (far - edge) * t * t;
                const double rest = dir > 0 ? space.min_warp(prev_u, hi) : space.min_warp(lo, prev_u);
                double adv = kInf;
                if (space.warp(ut) < rest) adv = advance_at(ut);
                if (std::isfinite(adv)) {
                    scan.push_back({ut, adv, run});
                    prev_valid = true;
                } else if (prev_valid) {
                    // f stopped decreasing between prev_u and ut: close in on its minimum, where
                    // the advance grows without bound when f is flat there.
                    double a = prev_u, b = ut;
                    const double h = 1e-9 * std::max(1.0, std::abs(b - a));
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (a + b);
                        const bool falling = space.warp(mid + dir * h) > space.warp(mid) && space.warp(mid) < rest;
                        (falling ? a : b) = mid;
                    }
                    if (a != prev_u) {
                        const double adv_min = advance_at(a);
                        if (std::isfinite(adv_min)) scan.push_back({a, adv_min, run});
                    }
                    prev_valid = false;
                    ++run;
                }
                prev_u = ut;
            }

            for (int w = -options.max_winding; w <= options.max_winding; ++w) {
                const double advance = fiber_shift + w * fiber.circumference;
                const double target = std::abs(advance);
                if (target == 0.0) continue;
                for (std::size_t k = 1; k < scan.size(); ++k) {
                    if (scan[k - 1].run != scan[k].run) continue;
                    const double g0 = scan[k - 1].advance - target, g1 = scan[k].advance - target;
                    if ((g0 < 0.0) == (g1 < 0.0)) continue;
                    auto [root, ok] = bracketed_root([&](double u) { return advance_at(u) - target; }, scan[k - 1].u,
                                                     scan[k].u, g0, g1, options.tol, options.max_iterations);
                    Shot s{Shot::Kind::Turning, rb, root, dir, advance};
                    s.shooting = true;
                    s.converged = ok;
                    s.length = sh.turning_leg(root, ra, dir).second + sh.turning_leg(root, rb, dir).second;
                    offer(s);
                }
            }
        }
    }

    // Taxi paths through a low level: always realizable, so a safe fallback.
    {
        std::vector<double> levels{ra, ra + base_shift};
        const int n = 512;
        for (int i = 0; i <= n; ++i) levels.push_back(base.r0 + (base.r1 - base.r0) * i / n);
        if (space.profile().family() != ProfileFamily::BumpTrain) {
            for (const Bump& b : space.profile().bumps()) levels.push_back(b.center);
        }
        for (double u : levels) {
            if (!base.contains(u)) continue;
            const double u_near = base.is_circle() ? ra + std::remainder(u - ra, kTwoPi) : u;
            const double rb = base.is_circle() ? u_near + std::remainder(q.r - u_near, kTwoPi) : q.r;
            Shot s{Shot::Kind::Taxi, rb, u_near, 1, fiber_shift};
            s.length = std::abs(u_near - ra) + std::abs(rb - u_near) + space.warp(u) * std::abs(fiber_shift);
            offer(s);
        }
    }

    GeodesicResult out;
    out.method = GeodesicMethod::Clairaut;
    out.distance = best.length;
    out.converged = any_converged;
    out.error_estimate = options.tol * space.global_max() + 1e-9 * best.length;
    out.path = to_curve(space, build_path(sh, best, p), p, q);
    return out;
}

}  // namespace warpconv
