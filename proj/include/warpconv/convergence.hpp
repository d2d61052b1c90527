#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpconv/grid.hpp"
#include "warpconv/space.hpp"

namespace warpconv {

enum class FamilyKind { Constant, CinchedTorus, MovingCinch, SingleRidge, MovingRidges, ManyRidges, RETCinches };

const char* to_string(FamilyKind kind);
/// Accepts the names printed by to_string, ignoring case, '-' and '_' (single-ridge). Throws InvalidInput.
FamilyKind parse_family(std::string_view name);

struct SequenceFamily {
    FamilyKind kind = FamilyKind::SingleRidge;
    double h0 = 2.0;  // cinch depth (0, 1] or ridge height (1, 2]; unused by Constant and RETCinches
    BaseSpace::Kind base_shape = BaseSpace::Kind::Interval;
    double level = 1.0;  // value of the Constant family

    void validate() const;
    [[nodiscard]] BaseSpace base() const;
    [[nodiscard]] FiberSpace fiber() const { return FiberSpace(kTwoPi); }
    /// Constant L^p limit of the profiles.
    [[nodiscard]] double lp_limit_level() const;
};

/// j-th term (1-based) of the moving enumeration: centers k / 2^m for k = 0..2^m,
/// m = 0, 1, 2, ..., with half-width 2^-m.
struct MovingTerm {
    double center = 0.0;
    double half_width = 1.0;
};
MovingTerm moving_term(std::int64_t j);

/// Centers of the j-th ManyRidges / RETCinches profile: -pi + 2 pi i / 2^j, i = 1..2^j - 1.
/// Half-width 4^-j. j <= 32.
BumpTrainParams dyadic_train(int j, double level, double peak);

WarpingProfile family_profile(const SequenceFamily& family, int j);
WarpedSpace family_space(const SequenceFamily& family, int j);
/// Base coordinates where the j-th profile departs most from its limit level (at most `cap`).
std::vector<double> feature_levels(const SequenceFamily& family, int j, int cap = 8);

struct LimitMetric {
    enum class Kind { IsometricProduct, CinchLimit, RET };
    Kind kind = Kind::IsometricProduct;
    double level = 1.0;    // IsometricProduct
    double h0 = 1.0;       // CinchLimit
    double cinch_r = 0.0;  // CinchLimit
    double R = 5.0;        // RET

    static LimitMetric product(double level);
    static LimitMetric cinch(double h0, double cinch_r);
    static LimitMetric ret(double R);
    [[nodiscard]] std::string name() const;
};

/// The limit the family converges to first, followed by comparison candidates.
std::vector<LimitMetric> candidate_limits(const SequenceFamily& family);

double limit_distance(const LimitMetric& limit, const BaseSpace& base, const FiberSpace& fiber,
                      const SurfacePoint& x1, const SurfacePoint& x2);

struct SamplePair {
    SurfacePoint p;
    SurfacePoint q;
    bool adversarial = false;
};

struct PlanOptions {
    int sources = 16;  // Halton source points
    int targets = 8;   // Halton targets, paired with every source
    std::uint64_t seed = 0;
};

/// sources x targets low-discrepancy pairs (independent of j), followed by adversarial pairs on
/// feature levels of the j-th profile and of the candidate limits: antipodal and quarter-turn
/// fiber pairs on each level, and antipodal pairs straddling it.
std::vector<SamplePair> sample_plan(const SequenceFamily& family, int j, const PlanOptions& options = {});

/// n_r = n_theta = max(256, 32 j), k = 3; RETCinches uses 1024 x 2048. Cinch rows are anchored
/// on the cinch level; ridge grids are offset by a third of a row.
GridSpec experiment_grid(const SequenceFamily& family, int j);

/// WARPCONV_THREADS if set and positive, else the hardware concurrency.
int worker_threads();

struct PairDistance {
    double value = 0.0;
    double error = 0.0;  // |distance - value| <= error
};

/// Grid distances of all pairs. Pairs whose sources share a grid row share one sweep.
std::vector<PairDistance> batch_grid_distances(const GridGraph& graph, const std::vector<SamplePair>& pairs,
                                               int threads = 0);

struct Discrepancy {
    double eps_hat = 0.0;    // max |d_j - d_limit| over the plan
    double error = 0.0;      // error bound of the maximizing pair
    double corrected = 0.0;  // max over pairs of (|d_j - d_limit| - error)^+
    std::size_t worst = 0;   // index of the maximizing pair
    std::vector<double> per_pair;
    std::vector<double> per_pair_error;
};

/// Sampled lower estimate of sup |d_j - d_limit|. Product and cinch limits are evaluated on a grid
/// with the same stencil and resolution as d_j, so the grid bias largely cancels (the error bounds
/// of both enter); the RET limit uses its closed form.
Discrepancy discrepancy_estimate(const SequenceFamily& family, int j, const LimitMetric& limit,
                                 const GridSpec& grid, const std::vector<SamplePair>& plan);
Discrepancy discrepancy_from(const std::vector<PairDistance>& dj, const std::vector<PairDistance>& dlim);

std::vector<PairDistance> limit_distances(const LimitMetric& limit, const BaseSpace& base, const FiberSpace& fiber,
                                          const GridSpec& grid, const std::vector<SamplePair>& plan);

double gh_upper_bound(double eps);
/// 2^((n+1)/2) lambda^(n+1) 2 eps mass.
double flat_upper_bound(double eps, double lambda, int n, double mass);
/// Riemannian area: circumference * integral of f over the base.
double mass_estimate(const WarpedSpace& space);
/// Closed-form upper bound on ||f_j - f_limit||_L2.
double l2_upper_bound(const SequenceFamily& family, int j);

struct SlackRow {
    std::string lemma;
    int j = 0;
    std::string item;  // worst pair or curve
    double bound = 0.0;
    double observed = 0.0;
    double slack = 0.0;  // >= -tol when the inequality holds
    double tol = 0.0;
    bool skipped = false;
    std::string reason;

    [[nodiscard]] bool ok() const { return skipped || slack >= -tol; }
};

/// One row per inequality: the worst slack over the plan (or over monotone test curves).
std::vector<SlackRow> audit_theorem_bounds(const SequenceFamily& family, int j, const GridSpec& grid,
                                           const std::vector<SamplePair>& plan);
/// Same, reusing grid distances already computed for the plan.
std::vector<SlackRow> audit_theorem_bounds(const SequenceFamily& family, int j, const GridSpec& grid,
                                           const std::vector<SamplePair>& plan,
                                           const std::vector<PairDistance>& dj);

struct ReportRow {
    int j = 0;
    GridSpec grid;
    std::size_t samples = 0;
    std::vector<Discrepancy> eps;  // one per limit
    double l2 = 0.0;
    double l2_bound = 0.0;
    double lambda = 1.0;
    double mass = 0.0;
    double gh_bound = 0.0;    // from the first limit
    double flat_bound = 0.0;  // from the first limit, n = dimension
};

struct ConvergenceReport {
    std::string label;  // family name, or "MovingBump2D" for the 3-torus
    int dimension = 2;
    SequenceFamily family;  // unused when dimension == 3
    std::vector<LimitMetric> limits;
    std::vector<ReportRow> rows;
    std::vector<SlackRow> slacks;
    std::size_t fixed_pairs = 0;  // leading plan entries shared by every j
};

struct ExperimentOptions {
    std::optional<GridSpec> grid;  // overrides experiment_grid
    PlanOptions plan;
    bool audit = true;
    std::vector<LimitMetric> limits;  // empty: candidate_limits(family)
};

ConvergenceReport run_family_experiment(const SequenceFamily& family, const std::vector<int>& js,
                                        const ExperimentOptions& options = {});

}  // namespace warpconv
