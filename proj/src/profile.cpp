#include "warpconv/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "warpconv/errors.hpp"
#include "warpconv/quadrature.hpp"

namespace warpconv {

namespace {

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw InvalidInput(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

double bump_shape(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

const char* to_string(ProfileFamily family) {
    switch (family) {
        case ProfileFamily::Constant: return "constant";
        case ProfileFamily::CinchBump: return "cinch";
        case ProfileFamily::RidgeBump: return "ridge";
        case ProfileFamily::SumOfBumps: return "sum-of-bumps";
        case ProfileFamily::BumpTrain: return "bump-train";
        case ProfileFamily::Tabulated: return "tabulated";
    }
    return "unknown";
}

WarpingProfile WarpingProfile::constant(double c) {
    require_positive(c, "constant profile value");
    WarpingProfile p;
    p.family_ = ProfileFamily::Constant;
    p.level_ = c;
    return p;
}

WarpingProfile WarpingProfile::cinch(double h0, double center, double half_width) {
    if (!(h0 > 0.0 && h0 <= 1.0)) throw InvalidInput("cinch depth h0 must lie in (0, 1]");
    require_positive(half_width, "cinch half width");
    WarpingProfile p = sum_of_bumps(1.0, {Bump{center, half_width, h0}});
    p.family_ = ProfileFamily::CinchBump;
    return p;
}

WarpingProfile WarpingProfile::ridge(double h0, double center, double half_width) {
    if (!(h0 > 1.0 && h0 <= 2.0)) throw InvalidInput("ridge height h0 must lie in (1, 2]");
    require_positive(half_width, "ridge half width");
    WarpingProfile p = sum_of_bumps(1.0, {Bump{center, half_width, h0}});
    p.family_ = ProfileFamily::RidgeBump;
    return p;
}

WarpingProfile WarpingProfile::sum_of_bumps(double level, std::vector<Bump> bumps) {
    require_positive(level, "profile level");
    for (const Bump& b : bumps) {
        require_positive(b.half_width, "bump half width");
        require_positive(b.peak, "bump peak");
        if (!std::isfinite(b.center)) throw InvalidInput("bump center must be finite");
    }
    std::sort(bumps.begin(), bumps.end(),
              [](const Bump& x, const Bump& y) { return x.center < y.center; });
    for (std::size_t i = 1; i < bumps.size(); ++i) {
        if (bumps[i - 1].center + bumps[i - 1].half_width >
            bumps[i].center - bumps[i].half_width) {
            throw InvalidInput("bump supports overlap");
        }
    }
    WarpingProfile p;
    p.family_ = ProfileFamily::SumOfBumps;
    p.level_ = level;
    p.bumps_ = std::move(bumps);
    return p;
}

WarpingProfile WarpingProfile::bump_train(const BumpTrainParams& params) {
    require_positive(params.level, "train level");
    require_positive(params.peak, "train peak");
    require_positive(params.half_width, "train half width");
    if (!std::isfinite(params.first_center)) throw InvalidInput("train first center must be finite");
    if (params.count > 1) {
        require_positive(params.spacing, "train spacing");
        if (2.0 * params.half_width > params.spacing) throw InvalidInput("train bumps overlap");
    }
    WarpingProfile p;
    p.family_ = ProfileFamily::BumpTrain;
    p.level_ = params.level;
    p.train_ = params;
    return p;
}

WarpingProfile WarpingProfile::tabulated(std::vector<double> r, std::vector<double> f) {
    if (r.size() < 2 || r.size() != f.size()) {
        throw InvalidInput("tabulated profile needs at least two (r, f) knots of equal count");
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i])) throw InvalidInput("tabulated knot must be finite");
        require_positive(f[i], "tabulated value");
        if (i > 0 && !(r[i] > r[i - 1])) throw InvalidInput("tabulated knots must increase strictly");
    }
    WarpingProfile p;
    p.family_ = ProfileFamily::Tabulated;
    p.level_ = std::numeric_limits<double>::quiet_NaN();
    p.table_r_ = std::move(r);
    p.table_f_ = std::move(f);
    return p;
}

std::uint64_t WarpingProfile::train_index_floor(double r) const {
    // Largest i with center(i) <= r, clamped to [0, count - 1].
    const BumpTrainParams& t = train_;
    if (t.count <= 1 || r <= t.first_center) return 0;
    const double raw = std::floor((r - t.first_center) / t.spacing);
    std::uint64_t i = raw >= static_cast<double>(t.count - 1) ? t.count - 1
                                                             : static_cast<std::uint64_t>(raw);
    while (i + 1 < t.count && t.first_center + static_cast<double>(i + 1) * t.spacing <= r) ++i;
    while (i > 0 && t.first_center + static_cast<double>(i) * t.spacing > r) --i;
    return i;
}

double WarpingProfile::operator()(double r) const {
    switch (family_) {
        case ProfileFamily::Constant:
            return level_;
        case ProfileFamily::CinchBump:
        case ProfileFamily::RidgeBump:
        case ProfileFamily::SumOfBumps: {
            auto it = std::lower_bound(bumps_.begin(), bumps_.end(), r, [](const Bump& b, double x) {
                return b.center + b.half_width <= x;
            });
            if (it == bumps_.end() || r <= it->center - it->half_width) return level_;
            return level_ + (it->peak - level_) * bump_shape((r - it->center) / it->half_width);
        }
        case ProfileFamily::BumpTrain: {
            const BumpTrainParams& t = train_;
            if (t.count == 0) return level_;
            double best = std::numeric_limits<double>::infinity();
            const std::uint64_t i = train_index_floor(r);
            for (std::uint64_t k = i; k <= std::min(i + 1, t.count - 1); ++k) {
                const double c = t.first_center + static_cast<double>(k) * t.spacing;
                if (std::abs(r - c) < std::abs(best)) best = r - c;
            }
            if (std::abs(best) >= t.half_width) return level_;
            return level_ + (t.peak - level_) * bump_shape(best / t.half_width);
        }
        case ProfileFamily::Tabulated: {
            if (r <= table_r_.front()) return table_f_.front();
            if (r >= table_r_.back()) return table_f_.back();
            const auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - table_r_.begin());
            const double s = (r - table_r_[k - 1]) / (table_r_[k] - table_r_[k - 1]);
            return table_f_[k - 1] + s * (table_f_[k] - table_f_[k - 1]);
        }
    }
    return level_;
}

void WarpingProfile::for_each_piece(double a, double b,
                                    const std::function<void(const Piece&)>& visit) const {
    if (!(b > a)) return;
    double cursor = a;
    auto emit_bump = [&](double center, double half_width, double peak) {
        const double lo = std::max(a, center - half_width);
        const double hi = std::min(b, center + half_width);
        if (lo > cursor) visit(Piece{Piece::Kind::Level, cursor, lo});
        if (hi > lo || half_width > 0.0) {
            Piece p{Piece::Kind::Bump, lo, hi};
            p.t0 = std::clamp((lo - center) / half_width, -1.0, 1.0);
            p.t1 = std::clamp((hi - center) / half_width, -1.0, 1.0);
            p.half_width = half_width;
            p.peak = peak;
            if (p.t1 > p.t0) visit(p);
        }
        cursor = std::max(cursor, hi);
    };

    switch (family_) {
        case ProfileFamily::Constant:
            break;
        case ProfileFamily::CinchBump:
        case ProfileFamily::RidgeBump:
        case ProfileFamily::SumOfBumps: {
            auto it = std::lower_bound(bumps_.begin(), bumps_.end(), a, [](const Bump& bp, double x) {
                return bp.center + bp.half_width <= x;
            });
            for (; it != bumps_.end() && it->center - it->half_width < b; ++it) {
                emit_bump(it->center, it->half_width, it->peak);
            }
            break;
        }
        case ProfileFamily::BumpTrain: {
            const BumpTrainParams& t = train_;
            if (t.count == 0) break;
            std::uint64_t i = train_index_floor(a - t.half_width);
            std::uint64_t visited = 0;
            for (; i < t.count; ++i) {
                const double c = t.first_center + static_cast<double>(i) * t.spacing;
                if (c - t.half_width >= b) break;
                if (c + t.half_width <= a) continue;
                if (++visited > (1u << 24)) throw NumericalGuard("too many bump pieces in interval");
                emit_bump(c, t.half_width, t.peak);
            }
            break;
        }
        case ProfileFamily::Tabulated: {
            std::vector<double> cuts{a};
            for (double k : table_r_) {
                if (k > a && k < b) cuts.push_back(k);
            }
            cuts.push_back(b);
            for (std::size_t k = 1; k < cuts.size(); ++k) {
                Piece p{Piece::Kind::Linear, cuts[k - 1], cuts[k]};
                p.fa = (*this)(cuts[k - 1]);
                p.fb = (*this)(cuts[k]);
                visit(p);
            }
            return;
        }
    }
    if (b > cursor) visit(Piece{Piece::Kind::Level, cursor, b});
}

double WarpingProfile::min_on(double a, double b) const {
    if (a > b) std::swap(a, b);
    double lo = std::min((*this)(a), (*this)(b));
    if (family_ == ProfileFamily::Constant) return level_;
    if (family_ == ProfileFamily::Tabulated) {
        for (std::size_t k = 0; k < table_r_.size(); ++k) {
            if (table_r_[k] > a && table_r_[k] < b) lo = std::min(lo, table_f_[k]);
        }
        return lo;
    }
    double peak_lo = std::numeric_limits<double>::infinity();
    bool level_attained = true;
    if (family_ == ProfileFamily::BumpTrain) {
        const BumpTrainParams& t = train_;
        if (t.count > 0) {
            const std::uint64_t i = train_index_floor(b);
            const double c = t.first_center + static_cast<double>(i) * t.spacing;
            if (c >= a && c <= b) peak_lo = t.peak;
            for (std::uint64_t k = (i > 0 ? i - 1 : 0); k <= std::min(i + 1, t.count - 1); ++k) {
                const double ck = t.first_center + static_cast<double>(k) * t.spacing;
                if (a > ck - t.half_width && b < ck + t.half_width) level_attained = false;
            }
        }
    } else {
        auto it = std::lower_bound(bumps_.begin(), bumps_.end(), a, [](const Bump& bp, double x) {
            return bp.center + bp.half_width <= x;
        });
        for (; it != bumps_.end() && it->center - it->half_width < b; ++it) {
            if (it->center >= a && it->center <= b) peak_lo = std::min(peak_lo, it->peak);
            if (a > it->center - it->half_width && b < it->center + it->half_width) {
                level_attained = false;
            }
        }
    }
    if (level_attained) lo = std::min(lo, level_);
    return std::min(lo, peak_lo);
}

double WarpingProfile::max_on(double a, double b) const {
    if (a > b) std::swap(a, b);
    double hi = std::max((*this)(a), (*this)(b));
    if (family_ == ProfileFamily::Constant) return level_;
    if (family_ == ProfileFamily::Tabulated) {
        for (std::size_t k = 0; k < table_r_.size(); ++k) {
            if (table_r_[k] > a && table_r_[k] < b) hi = std::max(hi, table_f_[k]);
        }
        return hi;
    }
    double peak_hi = -std::numeric_limits<double>::infinity();
    bool level_attained = true;
    if (family_ == ProfileFamily::BumpTrain) {
        const BumpTrainParams& t = train_;
        if (t.count > 0) {
            const std::uint64_t i = train_index_floor(b);
            const double c = t.first_center + static_cast<double>(i) * t.spacing;
            if (c >= a && c <= b) peak_hi = t.peak;
            for (std::uint64_t k = (i > 0 ? i - 1 : 0); k <= std::min(i + 1, t.count - 1); ++k) {
                const double ck = t.first_center + static_cast<double>(k) * t.spacing;
                if (a > ck - t.half_width && b < ck + t.half_width) level_attained = false;
            }
        }
    } else {
        auto it = std::lower_bound(bumps_.begin(), bumps_.end(), a, [](const Bump& bp, double x) {
            return bp.center + bp.half_width <= x;
        });
        for (; it != bumps_.end() && it->center - it->half_width < b; ++it) {
            if (it->center >= a && it->center <= b) peak_hi = std::max(peak_hi, it->peak);
            if (a > it->center - it->half_width && b < it->center + it->half_width) {
                level_attained = false;
            }
        }
    }
    if (level_attained) hi = std::max(hi, level_);
    return std::max(hi, peak_hi);
}

std::uint64_t WarpingProfile::breakpoint_count(double a, double b) const {
    if (!(b > a)) return 0;
    switch (family_) {
        case ProfileFamily::Constant:
            return 0;
        case ProfileFamily::Tabulated: {
            std::uint64_t n = 0;
            for (double k : table_r_) n += (k > a && k < b) ? 1 : 0;
            return n;
        }
        case ProfileFamily::BumpTrain: {
            const BumpTrainParams& t = train_;
            if (t.count == 0) return 0;
            // Count edges c_i - delta and c_i + delta lying strictly inside (a, b).
            auto centers_at_most = [&](double x) -> std::uint64_t {
                if (x < t.first_center) return 0;
                return train_index_floor(x) + 1;
            };
            auto centers_in_open = [&](double lo, double hi) -> std::uint64_t {
                std::uint64_t n = centers_at_most(hi) - centers_at_most(lo);
                if (n > 0) {
                    const std::uint64_t i = train_index_floor(hi);
                    if (t.first_center + static_cast<double>(i) * t.spacing == hi) --n;
                }
                return n;
            };
            return centers_in_open(a + t.half_width, b + t.half_width) +
                   centers_in_open(a - t.half_width, b - t.half_width);
        }
        default: {
            std::uint64_t n = 0;
            for (const Bump& bp : bumps_) {
                const double l = bp.center - bp.half_width;
                const double r = bp.center + bp.half_width;
                n += (l > a && l < b) ? 1 : 0;
                n += (r > a && r < b) ? 1 : 0;
            }
            return n;
        }
    }
}

std::vector<double> WarpingProfile::breakpoints(double a, double b, std::uint64_t max_count) const {
    if (breakpoint_count(a, b) > max_count) {
        throw NumericalGuard("profile has too many breakpoints in the requested interval");
    }
    std::vector<double> out;
    if (family_ == ProfileFamily::Tabulated) {
        for (double k : table_r_) {
            if (k > a && k < b) out.push_back(k);
        }
        return out;
    }
    for_each_piece(a, b, [&](const Piece& p) {
        if (p.a > a && p.a < b && (out.empty() || out.back() < p.a)) out.push_back(p.a);
        if (p.b > a && p.b < b && (out.empty() || out.back() < p.b)) out.push_back(p.b);
    });
    return out;
}

double WarpingProfile::integrate_piece(const Piece& piece, const std::function<double(double)>& g,
                                       QuadratureRule rule) const {
    switch (piece.kind) {
        case Piece::Kind::Level:
            return (piece.b - piece.a) * g(level_);
        case Piece::Kind::Bump: {
            const double amp = piece.peak - level_;
            const double lvl = level_;
            return piece.half_width *
                   composite(piece.t0, piece.t1, [&](double t) { return g(lvl + amp * bump_shape(t)); },
                             rule);
        }
        case Piece::Kind::Linear: {
            const double fa = piece.fa;
            const double df = piece.fb - piece.fa;
            if (df == 0.0) return (piece.b - piece.a) * g(fa);
            return (piece.b - piece.a) *
                   composite(0.0, 1.0, [&](double s) { return g(fa + s * df); }, rule);
        }
    }
    return 0.0;
}

double WarpingProfile::integrate(double a, double b, const std::function<double(double)>& g,
                                 QuadratureRule rule) const {
    if (!(b > a)) return 0.0;
    auto generic = [&](double lo, double hi) {
        double sum = 0.0;
        for_each_piece(lo, hi, [&](const Piece& p) { sum += integrate_piece(p, g, rule); });
        return sum;
    };
    if (family_ != ProfileFamily::BumpTrain || train_.count < 32) return generic(a, b);

    const BumpTrainParams& t = train_;
    auto center = [&](std::uint64_t i) { return t.first_center + static_cast<double>(i) * t.spacing; };
    std::uint64_t first_full = train_index_floor(a + t.half_width);
    if (center(first_full) - t.half_width < a) ++first_full;
    std::uint64_t last_full = train_index_floor(b - t.half_width);
    if (center(last_full) + t.half_width > b) {
        if (last_full == 0) return generic(a, b);
        --last_full;
    }
    if (first_full >= t.count || last_full < first_full + 16) return generic(a, b);

    const double lo = center(first_full) - t.half_width;
    const double hi = center(last_full) + t.half_width;
    const double n_full = static_cast<double>(last_full - first_full + 1);
    const Piece whole{Piece::Kind::Bump, -t.half_width, t.half_width, -1.0, 1.0, t.half_width, t.peak};
    const double gaps = (n_full - 1.0) * std::max(0.0, t.spacing - 2.0 * t.half_width);
    return generic(a, lo) + generic(hi, b) + n_full * integrate_piece(whole, g, rule) +
           gaps * g(level_);
}

std::string WarpingProfile::describe() const {
    std::ostringstream os;
    os.precision(12);
    switch (family_) {
        case ProfileFamily::Constant:
            os << "constant(c=" << level_ << ")";
            break;
        case ProfileFamily::CinchBump:
        case ProfileFamily::RidgeBump:
            os << to_string(family_) << "(h0=" << bumps_[0].peak << ", center=" << bumps_[0].center
               << ", half_width=" << bumps_[0].half_width << ")";
            break;
        case ProfileFamily::SumOfBumps:
            os << "sum-of-bumps(level=" << level_ << ", bumps=" << bumps_.size() << ")";
            break;
        case ProfileFamily::BumpTrain:
            os << "bump-train(level=" << level_ << ", peak=" << train_.peak
               << ", count=" << train_.count << ", half_width=" << train_.half_width << ")";
            break;
        case ProfileFamily::Tabulated:
            os << "tabulated(knots=" << table_r_.size() << ")";
            break;
    }
    return os.str();
}

}  // namespace warpconv

namespace warpconv {

double WarpingProfile::increment(double r, double dr) const {
    const double plain = (*this)(r + dr) - (*this)(r);
    auto within = [&](double center, double half_width, double peak) {
        const double t0 = (r - center) / half_width;
        const double t1 = (r + dr - center) / half_width;
        if (std::abs(t0) >= 1.0 || std::abs(t1) >= 1.0) return plain;
        // (cos(pi t1) - cos(pi t0)) / 2 = -sin(pi (t1 + t0) / 2) sin(pi (t1 - t0) / 2)
        const double half_sum = 0.5 * std::numbers::pi * (t0 + t1);
        const double half_diff = 0.5 * std::numbers::pi * (dr / half_width);
        return -(peak - level_) * std::sin(half_sum) * std::sin(half_diff);
    };
    switch (family_) {
        case ProfileFamily::Constant:
            return 0.0;
        case ProfileFamily::CinchBump:
        case ProfileFamily::RidgeBump:
        case ProfileFamily::SumOfBumps: {
            auto it = std::lower_bound(bumps_.begin(), bumps_.end(), r, [](const Bump& b, double x) {
                return b.center + b.half_width <= x;
            });
            if (it == bumps_.end()) return plain;
            return within(it->center, it->half_width, it->peak);
        }
        case ProfileFamily::BumpTrain: {
            if (train_.count == 0) return plain;
            const std::uint64_t i = train_index_floor(r);
            for (std::uint64_t k = i; k <= std::min(i + 1, train_.count - 1); ++k) {
                const double c = train_.first_center + static_cast<double>(k) * train_.spacing;
                if (std::abs(r - c) < train_.half_width) return within(c, train_.half_width, train_.peak);
            }
            return plain;
        }
        case ProfileFamily::Tabulated: {
            if (r <= table_r_.front() || r >= table_r_.back()) return plain;
            const auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - table_r_.begin());
            if (r + dr < table_r_[k - 1] || r + dr > table_r_[k]) return plain;
            return dr * (table_f_[k] - table_f_[k - 1]) / (table_r_[k] - table_r_[k - 1]);
        }
    }
    return plain;
}

}  // namespace warpconv
