#include "warpconv/convergence.hpp"
#include "warpconv/errors.hpp"

namespace warpconv {

ConvergenceReport run_family_experiment(const SequenceFamily& family, const std::vector<int>& js,
                                        const ExperimentOptions& options) {
    family.validate();
    if (js.empty()) throw InvalidInput("experiment needs at least one j");
    ConvergenceReport report;
    report.label = to_string(family.kind);
    report.family = family;
    report.limits = options.limits.empty() ? candidate_limits(family) : options.limits;
    report.fixed_pairs = static_cast<std::size_t>(options.plan.sources) * options.plan.targets;

    const BaseSpace base = family.base();
    const FiberSpace fiber = family.fiber();
    const WarpedSpace reference(base, fiber, WarpingProfile::constant(1.0));
    const WarpedSpace limit(base, fiber, WarpingProfile::constant(family.lp_limit_level()));
    const double mass = mass_estimate(reference);

    for (int j : js) {
        const WarpedSpace space = family_space(family, j);
        ReportRow row;
        row.j = j;
        row.grid = options.grid ? *options.grid : experiment_grid(family, j);
        const auto plan = sample_plan(family, j, options.plan);
        row.samples = plan.size();
        const GridGraph g(space, row.grid);
        const auto dj = batch_grid_distances(g, plan);
        for (const LimitMetric& m : report.limits) {
            row.eps.push_back(discrepancy_from(dj, limit_distances(m, base, fiber, row.grid, plan)));
        }
        row.l2 = lp_profile_distance(space, limit, 2.0);
        row.l2_bound = l2_upper_bound(family, j);
        row.lambda = bilipschitz_lambda(space);
        row.mass = mass;
        row.gh_bound = gh_upper_bound(row.eps.front().eps_hat);
        row.flat_bound = flat_upper_bound(row.eps.front().eps_hat, row.lambda, 2, mass);
        if (options.audit) {
            for (SlackRow& s : audit_theorem_bounds(family, j, row.grid, plan, dj)) report.slacks.push_back(std::move(s));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace warpconv
