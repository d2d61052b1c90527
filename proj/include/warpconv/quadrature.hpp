#pragma once

#include <algorithm>
#include <array>

#include "warpconv/profile.hpp"

namespace warpconv {

inline constexpr std::array<double, 5> kGauss5Nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                       0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGauss5Weights = {0.2369268850561891, 0.4786286704993665,
                                                         0.5688888888888889, 0.4786286704993665,
                                                         0.2369268850561891};

/// Integral of h over [lo, hi] using rule.n equal subintervals (midpoint or 5-point Gauss).
template <class H>
double composite(double lo, double hi, const H& h, QuadratureRule rule) {
    if (!(hi > lo)) return 0.0;
    const int n = std::max(1, rule.n);
    const double step = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double left = lo + i * step;
        if (rule.kind == QuadratureRule::Kind::Midpoint) {
            sum += h(left + 0.5 * step) * step;
        } else {
            double local = 0.0;
            for (std::size_t k = 0; k < kGauss5Nodes.size(); ++k) {
                local += kGauss5Weights[k] * h(left + 0.5 * step * (kGauss5Nodes[k] + 1.0));
            }
            sum += 0.5 * step * local;
        }
    }
    return sum;
}

}  // namespace warpconv
