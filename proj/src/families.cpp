#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <cstdlib>
#include <thread>

#include "warpconv/convergence.hpp"
#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"
#include "warpconv/ret_metric.hpp"

namespace warpconv {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_cinch_family(FamilyKind k) { return k == FamilyKind::CinchedTorus || k == FamilyKind::MovingCinch; }
bool is_ridge_family(FamilyKind k) {
    return k == FamilyKind::SingleRidge || k == FamilyKind::MovingRidges || k == FamilyKind::ManyRidges;
}

// Radical inverse of i in the given base.
double halton(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

const char* to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Constant: return "Constant";
        case FamilyKind::CinchedTorus: return "CinchedTorus";
        case FamilyKind::MovingCinch: return "MovingCinch";
        case FamilyKind::SingleRidge: return "SingleRidge";
        case FamilyKind::MovingRidges: return "MovingRidges";
        case FamilyKind::ManyRidges: return "ManyRidges";
        case FamilyKind::RETCinches: return "RETCinches";
    }
    return "?";
}

FamilyKind parse_family(std::string_view name) {
    auto lower = [](std::string_view s) {
        std::string out;
        for (char c : s) {
            if (c == '-' || c == '_') continue;
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        return out;
    };
    const std::string key = lower(name);
    for (FamilyKind k : {FamilyKind::Constant, FamilyKind::CinchedTorus, FamilyKind::MovingCinch,
                         FamilyKind::SingleRidge, FamilyKind::MovingRidges, FamilyKind::ManyRidges,
                         FamilyKind::RETCinches}) {
        if (lower(to_string(k)) == key) return k;
    }
    throw InvalidInput("unknown family: " + std::string(name));
}

void SequenceFamily::validate() const {
    if (is_cinch_family(kind) && !(h0 > 0.0 && h0 <= 1.0)) throw InvalidInput("cinch depth h0 must lie in (0, 1]");
    if (is_ridge_family(kind) && !(h0 > 1.0 && h0 <= 2.0)) throw InvalidInput("ridge height h0 must lie in (1, 2]");
    if (kind == FamilyKind::Constant && !(level > 0.0 && std::isfinite(level))) {
        throw InvalidInput("constant level must be positive");
    }
}

BaseSpace SequenceFamily::base() const {
    return base_shape == BaseSpace::Kind::Circle ? BaseSpace::circle() : BaseSpace::interval(-kPi, kPi);
}

double SequenceFamily::lp_limit_level() const {
    if (kind == FamilyKind::Constant) return level;
    if (kind == FamilyKind::RETCinches) return 5.0;
    return 1.0;
}

MovingTerm moving_term(std::int64_t j) {
    if (j < 1) throw InvalidInput("sequence index j must be at least 1");
    // Level m holds 2^m + 1 terms.
    std::int64_t rest = j - 1;
    int m = 0;
    while (rest >= (std::int64_t{1} << m) + 1) {
        rest -= (std::int64_t{1} << m) + 1;
        ++m;
        if (m > 60) throw InvalidInput("sequence index j out of range");
    }
    const double scale = std::ldexp(1.0, -m);
    return {static_cast<double>(rest) * scale, scale};
}

BumpTrainParams dyadic_train(int j, double level, double peak) {
    if (j < 1 || j > 32) throw InvalidInput("dyadic index j must lie in 1..32");
    BumpTrainParams t;
    t.level = level;
    t.peak = peak;
    t.spacing = kTwoPi * std::ldexp(1.0, -j);
    t.first_center = -kPi + t.spacing;
    t.count = (std::uint64_t{1} << j) - 1;
    t.half_width = std::ldexp(1.0, -2 * j);
    return t;
}

WarpingProfile family_profile(const SequenceFamily& family, int j) {
    family.validate();
    if (j < 1) throw InvalidInput("sequence index j must be at least 1");
    switch (family.kind) {
        case FamilyKind::Constant: return WarpingProfile::constant(family.level);
        case FamilyKind::CinchedTorus: return WarpingProfile::cinch(family.h0, 0.0, 1.0 / j);
        case FamilyKind::SingleRidge: return WarpingProfile::ridge(family.h0, 0.0, 1.0 / j);
        case FamilyKind::MovingCinch: {
            const MovingTerm t = moving_term(j);
            return WarpingProfile::cinch(family.h0, t.center, t.half_width);
        }
        case FamilyKind::MovingRidges: {
            const MovingTerm t = moving_term(j);
            return WarpingProfile::ridge(family.h0, t.center, t.half_width);
        }
        case FamilyKind::ManyRidges: return WarpingProfile::bump_train(dyadic_train(j, 1.0, family.h0));
        case FamilyKind::RETCinches: return WarpingProfile::bump_train(dyadic_train(j, 5.0, 1.0));
    }
    throw InvalidInput("unknown family");
}

WarpedSpace family_space(const SequenceFamily& family, int j) {
    return {family.base(), family.fiber(), family_profile(family, j)};
}

std::vector<double> feature_levels(const SequenceFamily& family, int j, int cap) {
    switch (family.kind) {
        case FamilyKind::Constant: return {};
        case FamilyKind::CinchedTorus:
        case FamilyKind::SingleRidge: return {0.0};
        case FamilyKind::MovingCinch:
        case FamilyKind::MovingRidges: return {moving_term(j).center};
        case FamilyKind::ManyRidges:
        case FamilyKind::RETCinches: {
            // Every stride-th center, so the chosen levels nest as j grows.
            const auto t = dyadic_train(j, 1.0, 2.0);
            std::uint64_t stride = 1;
            while (t.count / stride + 1 > static_cast<std::uint64_t>(cap) + 1 && stride < t.count) stride *= 2;
            std::vector<double> out;
            for (std::uint64_t i = stride; i <= t.count; i += stride) {
                out.push_back(-kPi + t.spacing * static_cast<double>(i));
            }
            return out;
        }
    }
    return {};
}

LimitMetric LimitMetric::product(double level) {
    LimitMetric m;
    m.kind = Kind::IsometricProduct;
    m.level = level;
    return m;
}

LimitMetric LimitMetric::cinch(double h0, double cinch_r) {
    LimitMetric m;
    m.kind = Kind::CinchLimit;
    m.h0 = h0;
    m.cinch_r = cinch_r;
    return m;
}

LimitMetric LimitMetric::ret(double R) {
    LimitMetric m;
    m.kind = Kind::RET;
    m.R = R;
    return m;
}

std::string LimitMetric::name() const {
    char buf[96];
    switch (kind) {
        case Kind::IsometricProduct: std::snprintf(buf, sizeof buf, "product(%g)", level); break;
        case Kind::CinchLimit: std::snprintf(buf, sizeof buf, "cinch(%g@%g)", h0, cinch_r); break;
        case Kind::RET: std::snprintf(buf, sizeof buf, "ret(%g)", R); break;
    }
    return buf;
}

std::vector<LimitMetric> candidate_limits(const SequenceFamily& family) {
    family.validate();
    switch (family.kind) {
        case FamilyKind::Constant: return {LimitMetric::product(family.level)};
        case FamilyKind::CinchedTorus: return {LimitMetric::cinch(family.h0, 0.0), LimitMetric::product(1.0)};
        case FamilyKind::MovingCinch: return {LimitMetric::cinch(family.h0, 0.0), LimitMetric::cinch(family.h0, 1.0)};
        case FamilyKind::SingleRidge:
        case FamilyKind::MovingRidges:
        case FamilyKind::ManyRidges: return {LimitMetric::product(1.0)};
        case FamilyKind::RETCinches: return {LimitMetric::ret(5.0), LimitMetric::product(5.0)};
    }
    return {};
}

double limit_distance(const LimitMetric& limit, const BaseSpace& base, const FiberSpace& fiber,
                      const SurfacePoint& x1, const SurfacePoint& x2) {
    switch (limit.kind) {
        case LimitMetric::Kind::IsometricProduct: return product_distance(base, fiber, limit.level, x1, x2);
        case LimitMetric::Kind::CinchLimit: return cinch_limit_distance(limit.h0, limit.cinch_r, base, fiber, x1, x2);
        case LimitMetric::Kind::RET: return ret_distance(RETParams{limit.R, base, fiber}, x1, x2);
    }
    return 0.0;
}

std::vector<SamplePair> sample_plan(const SequenceFamily& family, int j, const PlanOptions& options) {
    if (options.sources < 1 || options.targets < 1) throw InvalidInput("sample plan must be nonempty");
    const BaseSpace base = family.base();
    const double C = family.fiber().circumference;
    const double lo = base.r0, len = base.length();
    std::vector<SamplePair> plan;
    for (int s = 0; s < options.sources; ++s) {
        const std::uint64_t i = options.seed * 1000003u + static_cast<std::uint64_t>(s) + 1;
        const SurfacePoint p{lo + len * halton(i, 2), C * halton(i, 3)};
        for (int t = 0; t < options.targets; ++t) {
            const std::uint64_t k = options.seed * 1000003u + static_cast<std::uint64_t>(s * options.targets + t) + 1;
            plan.push_back({p, {lo + len * halton(k, 5), C * halton(k, 7)}, false});
        }
    }
    std::vector<double> levels = feature_levels(family, j);
    for (const LimitMetric& m : candidate_limits(family)) {
        if (m.kind == LimitMetric::Kind::CinchLimit) levels.push_back(m.cinch_r);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const double hi = base.is_circle() ? base.r1 - 1e-9 : base.r1;
    for (double r : levels) {
        plan.push_back({{r, 0.0}, {r, 0.5 * C}, true});
        plan.push_back({{r, 0.0}, {r, 0.25 * C}, true});
        plan.push_back({{std::clamp(r - 0.5, lo, hi), 0.0}, {std::clamp(r + 0.5, lo, hi), 0.5 * C}, true});
    }
    return plan;
}

GridSpec experiment_grid(const SequenceFamily& family, int j) {
    GridSpec g;
    g.k = 3;
    if (family.kind == FamilyKind::RETCinches) {
        g.n_r = 1024;
        g.n_theta = 2048;
        g.anchor = -kPi;
        return g;
    }
    g.n_r = g.n_theta = std::max(256, 32 * j);
    const double dr = family.base().length() / g.n_r;
    if (is_cinch_family(family.kind)) {
        g.anchor = feature_levels(family, j).front();
    } else if (is_ridge_family(family.kind)) {
        g.anchor = family.base().r0 + dr / 3.0;
    }
    return g;
}

int worker_threads() {
    if (const char* env = std::getenv("WARPCONV_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace warpconv
