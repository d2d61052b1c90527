#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "warpconv/convergence.hpp"
#include "warpconv/errors.hpp"

namespace warpconv {

std::vector<PairDistance> batch_grid_distances(const GridGraph& graph, const std::vector<SamplePair>& pairs,
                                               int threads) {
    const int cols = graph.columns();
    struct Job {
        int row;
        std::vector<std::size_t> members;
        std::vector<GridGraph::Node> targets;
    };
    std::map<int, Job> by_row;
    std::vector<double> snaps(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto np = graph.snap(pairs[i].p);
        const auto nq = graph.snap(pairs[i].q);
        Job& job = by_row[np.row];
        job.row = np.row;
        job.members.push_back(i);
        // Rotate so the source sits in column 0; the metric does not depend on theta.
        job.targets.push_back({nq.row, ((nq.col - np.col) % cols + cols) % cols});
        snaps[i] = graph.snap_length(pairs[i].p, np) + graph.snap_length(pairs[i].q, nq);
    }
    std::vector<Job> jobs;
    for (auto& [row, job] : by_row) jobs.push_back(std::move(job));

    std::vector<PairDistance> out(pairs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            const Job& job = jobs[k];
            const auto d = graph.node_distances({job.row, 0}, job.targets);
            for (std::size_t m = 0; m < job.members.size(); ++m) {
                const std::size_t i = job.members[m];
                out[i] = {d[m], snaps[i] + graph.anisotropy() * d[m]};
            }
        }
    };
    const int n = std::min<int>(threads > 0 ? threads : worker_threads(), static_cast<int>(jobs.size()));
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::vector<PairDistance> limit_distances(const LimitMetric& limit, const BaseSpace& base, const FiberSpace& fiber,
                                          const GridSpec& grid, const std::vector<SamplePair>& plan) {
    if (limit.kind == LimitMetric::Kind::IsometricProduct) {
        const GridGraph g(WarpedSpace(base, fiber, WarpingProfile::constant(limit.level)), grid);
        return batch_grid_distances(g, plan);
    }
    if (limit.kind == LimitMetric::Kind::CinchLimit) {
        // A cinch far narrower than a grid row, with a row on its level: edges along that row
        // see h0 and crossing edges see the unit level, as in the limit space.
        GridSpec on_level = grid;
        on_level.anchor = limit.cinch_r;
        const double width = 1e-9 * base.length() / grid.n_r;
        const GridGraph g(WarpedSpace(base, fiber, WarpingProfile::cinch(limit.h0, limit.cinch_r, width)), on_level);
        return batch_grid_distances(g, plan);
    }
    std::vector<PairDistance> out;
    out.reserve(plan.size());
    for (const SamplePair& s : plan) out.push_back({limit_distance(limit, base, fiber, s.p, s.q), 0.0});
    return out;
}

Discrepancy discrepancy_from(const std::vector<PairDistance>& dj, const std::vector<PairDistance>& dlim) {
    if (dj.empty() || dj.size() != dlim.size()) throw InvalidInput("discrepancy needs matching nonempty samples");
    Discrepancy out;
    out.eps_hat = -1.0;
    for (std::size_t i = 0; i < dj.size(); ++i) {
        const double diff = std::abs(dj[i].value - dlim[i].value);
        const double err = dj[i].error + dlim[i].error;
        out.per_pair.push_back(diff);
        out.per_pair_error.push_back(err);
        if (diff > out.eps_hat) {
            out.eps_hat = diff;
            out.error = err;
            out.worst = i;
        }
        out.corrected = std::max(out.corrected, diff - err);
    }
    return out;
}

Discrepancy discrepancy_estimate(const SequenceFamily& family, int j, const LimitMetric& limit,
                                 const GridSpec& grid, const std::vector<SamplePair>& plan) {
    if (plan.empty()) throw InvalidInput("sample plan must be nonempty");
    const GridGraph g(family_space(family, j), grid);
    return discrepancy_from(batch_grid_distances(g, plan),
                            limit_distances(limit, family.base(), family.fiber(), grid, plan));
}

double gh_upper_bound(double eps) {
    if (!(eps >= 0.0)) throw InvalidInput("eps must be nonnegative");
    return 2.0 * eps;
}

double flat_upper_bound(double eps, double lambda, int n, double mass) {
    if (!(eps >= 0.0)) throw InvalidInput("eps must be nonnegative");
    if (!(lambda >= 1.0)) throw InvalidInput("lambda must be at least 1");
    if (!(mass > 0.0)) throw InvalidInput("mass must be positive");
    if (n < 1) throw InvalidInput("dimension must be positive");
    return std::pow(2.0, 0.5 * (n + 1)) * std::pow(lambda, n + 1) * 2.0 * eps * mass;
}

double mass_estimate(const WarpedSpace& space) {
    const BaseSpace& b = space.base();
    return space.fiber().circumference *
           space.integrate_base(b.r0, b.r1, [](double f) { return f; }, QuadratureRule::gauss(16));
}

double l2_upper_bound(const SequenceFamily& family, int j) {
    family.validate();
    switch (family.kind) {
        case FamilyKind::Constant: return 0.0;
        case FamilyKind::CinchedTorus:
        case FamilyKind::SingleRidge: return std::sqrt(2.0 / j);
        case FamilyKind::MovingCinch:
        case FamilyKind::MovingRidges: return std::sqrt(2.0 * moving_term(j).half_width);
        case FamilyKind::ManyRidges:
        case FamilyKind::RETCinches: {
            const double amp = family.kind == FamilyKind::RETCinches ? 4.0 : 1.0;
            const double count = std::ldexp(1.0, j) - 1.0;
            return amp * std::sqrt(count * std::ldexp(2.0, -2 * j));
        }
    }
    return 0.0;
}

}  // namespace warpconv
