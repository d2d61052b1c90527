#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "warpconv/convergence.hpp"
#include "warpconv/ret_metric.hpp"
#include "warpconv/torus3d.hpp"

namespace warpconv {

using Json = nlohmann::ordered_json;

/// Shortest decimal text with 12 significant digits.
std::string format_number(double v);
/// v rounded to 12 significant digits, so JSON output matches the CSV.
double round12(double v);

/// Profile descriptor {"family": ..., "params": {...}}. Families:
///   constant {c}, cinch {h0, center, half_width}, ridge {h0, center, half_width},
///   sum_of_bumps {level, bumps: [{center, half_width, peak}]},
///   bump_train {level, peak, first_center, spacing, count, half_width}, tabulated {r, f},
///   or a sequence family name (single-ridge, ...) with {j, h0, level}.
/// Unknown families or fields throw InvalidInput.
WarpingProfile profile_from_json(const Json& descriptor);
Json profile_to_json(const WarpingProfile& profile);

Json geodesic_to_json(const GeodesicResult& result);

/// One row per j against report.limits[limit]:
/// j, eps_hat, grid_err, l2_norm, lambda, gh_bound, flat_bound, worst_pair.
std::string report_csv(const ConvergenceReport& report, std::size_t limit = 0);
std::string slack_csv(const std::vector<SlackRow>& slacks);

Json report_to_json(const ConvergenceReport& report);
/// Inverse of report_to_json up to 12 significant digits. Throws InvalidInput on schema violations.
ConvergenceReport report_from_json(const Json& json);

/// Parameters of converge / audit / torus3 runs read from a scenario file.
struct Scenario {
    std::string family = "single-ridge";
    std::vector<int> j_list;
    std::optional<double> h0;  // family default when absent
    double level = 1.0;        // constant family level, or c for torus3
    std::string base = "interval";
    std::optional<GridSpec> grid;
    std::optional<int> n3;  // torus3 grid size
    PlanOptions plan;
    bool audit = true;
    std::string csv;
    std::string json;
    std::string svg;
};

/// Keys: family, j_list, h0, level, base, grid {n_r, n_theta, k, anchor} or {n} for torus3,
/// seed, sources, targets, audit, outputs {csv, json, svg}. Unknown keys throw InvalidInput.
Scenario scenario_from_json(const Json& json);

// Self-contained SVG documents (inline styles, no scripts).

struct LabeledProfile {
    std::string label;
    WarpingProfile profile;
};

std::string svg_profiles(const std::vector<LabeledProfile>& profiles, double a, double b, int samples = 2000);
/// eps_hat against j for every limit of the report, with grid error bars.
std::string svg_convergence(const ConvergenceReport& report);
/// Ball boundaries of the RET metric around the origin in the unwrapped (s, theta) chart.
std::string svg_ret_balls(double R, const std::vector<double>& radii, int samples = 720);
/// Geodesic paths over a shaded map of f on the (r, theta) chart.
std::string svg_geodesics(const WarpedSpace& space, const std::vector<GeodesicResult>& paths);

}  // namespace warpconv
