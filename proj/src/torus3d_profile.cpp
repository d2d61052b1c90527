#include <algorithm>
#include <cmath>
#include <numbers>

#include "warpconv/errors.hpp"
#include "warpconv/torus3d.hpp"

namespace warpconv {

namespace {

constexpr double kPi = std::numbers::pi;
// Integrals of t * shape(t) and t * shape(t)^2 over [0, 1] for the cosine bump.
const double kShapeMoment1 = 0.25 - 1.0 / (kPi * kPi);
const double kShapeMoment2 = 3.0 / 16.0 - 1.0 / (kPi * kPi);

double periodic_gap(double a, double b) { return std::remainder(a - b, kTwoPi); }

}  // namespace

Warp2DProfile Warp2DProfile::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("warping level must be positive");
    Warp2DProfile p;
    p.level_ = c;
    return p;
}

Warp2DProfile Warp2DProfile::moving_bump(double c, double h0, int j) {
    if (!(h0 > c)) throw InvalidInput("bump peak h0 must exceed the level c");
    const MovingTerm t = moving_term(j);
    Warp2DProfile p = sum_of_bumps(c, {Bump2D{t.center, 0.0, t.half_width, h0}});
    p.kind_ = Kind::MovingBump2D;
    return p;
}

Warp2DProfile Warp2DProfile::sum_of_bumps(double c, std::vector<Bump2D> bumps) {
    Warp2DProfile p = constant(c);
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        const Bump2D& b = bumps[i];
        if (!(b.radius > 0.0 && b.radius <= kPi)) throw InvalidInput("bump radius must lie in (0, pi]");
        if (!(b.peak > 0.0) || !std::isfinite(b.peak)) throw InvalidInput("bump peak must be positive");
        for (std::size_t k = 0; k < i; ++k) {
            const Bump2D& o = bumps[k];
            if (std::hypot(periodic_gap(b.x, o.x), periodic_gap(b.y, o.y)) < b.radius + o.radius) {
                throw InvalidInput("bumps overlap");
            }
        }
    }
    p.kind_ = Kind::SumOfBumps2D;
    p.bumps_ = std::move(bumps);
    return p;
}

double Warp2DProfile::operator()(double x, double y) const {
    for (const Bump2D& b : bumps_) {
        const double rho = std::hypot(periodic_gap(x, b.x), periodic_gap(y, b.y));
        if (rho < b.radius) return level_ + (b.peak - level_) * bump_shape(rho / b.radius);
    }
    return level_;
}

double Warp2DProfile::min_value() const {
    double m = level_;
    for (const Bump2D& b : bumps_) m = std::min(m, b.peak);
    return m;
}

double Warp2DProfile::max_value() const {
    double m = level_;
    for (const Bump2D& b : bumps_) m = std::max(m, b.peak);
    return m;
}

double Warp2DProfile::l2_distance_to(double c) const {
    const double offset = level_ - c;
    double sq = offset * offset * 4.0 * kPi * kPi;
    for (const Bump2D& b : bumps_) {
        const double a = b.peak - level_;
        const double area = 2.0 * kPi * b.radius * b.radius;
        sq += 2.0 * offset * a * area * kShapeMoment1 + a * a * area * kShapeMoment2;
    }
    return std::sqrt(std::max(0.0, sq));
}

double Warp2DProfile::integral() const {
    double sum = level_ * 4.0 * kPi * kPi;
    for (const Bump2D& b : bumps_) sum += (b.peak - level_) * 2.0 * kPi * b.radius * b.radius * kShapeMoment1;
    return sum;
}

std::vector<std::array<int, 3>> stencil3_offsets(int k) {
    if (k != 1) throw InvalidInput("3D stencils support k = 1 only");
    std::vector<std::array<int, 3>> out;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                if (a != 0 || b != 0 || c != 0) out.push_back({a, b, c});
    for (int s : {-1, 1})
        for (int t : {-2, 2}) {
            out.push_back({s, 0, t});
            out.push_back({0, s, t});
        }
    return out;
}

double anisotropy3_constant(int k, double aspect_min, double aspect_max) {
    if (!(aspect_min > 0.0) || aspect_max < aspect_min) throw InvalidInput("invalid aspect range");
    const auto offsets = stencil3_offsets(k);
    // Stencil paths cost the gauge of the polytope spanned by the unit stencil directions;
    // its largest value on the unit sphere is 1 / inradius.
    auto excess = [&](double a) {
        std::vector<std::array<double, 3>> v;
        for (const auto& o : offsets) {
            const double x = o[0], y = o[1], z = a * o[2];
            const double len = std::sqrt(x * x + y * y + z * z);
            v.push_back({x / len, y / len, z / len});
        }
        const std::size_t m = v.size();
        double inradius = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t l = j + 1; l < m; ++l) {
                    const double e1[3] = {v[j][0] - v[i][0], v[j][1] - v[i][1], v[j][2] - v[i][2]};
                    const double e2[3] = {v[l][0] - v[i][0], v[l][1] - v[i][1], v[l][2] - v[i][2]};
                    double n[3] = {e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                                   e1[0] * e2[1] - e1[1] * e2[0]};
                    const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
                    if (nn < 1e-12) continue;
                    for (double& c : n) c /= nn;
                    double d = n[0] * v[i][0] + n[1] * v[i][1] + n[2] * v[i][2];
                    if (d < 0.0) {
                        d = -d;
                        for (double& c : n) c = -c;
                    }
                    if (d >= inradius) continue;
                    bool supporting = true;
                    for (const auto& w : v) {
                        if (n[0] * w[0] + n[1] * w[1] + n[2] * w[2] > d + 1e-12) {
                            supporting = false;
                            break;
                        }
                    }
                    if (supporting) inradius = d;
                }
        return 1.0 / inradius - 1.0;
    };
    if (aspect_max == aspect_min) return excess(aspect_min);
    // Dense sampling of the aspect range, geometric so small aspects are resolved.
    const int samples = 200;
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        worst = std::max(worst, excess(aspect_min * std::pow(aspect_max / aspect_min, double(i) / samples)));
    }
    return worst;
}

}  // namespace warpconv
