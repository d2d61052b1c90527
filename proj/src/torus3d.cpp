#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <thread>

#include "warpconv/errors.hpp"
#include "warpconv/torus3d.hpp"

namespace warpconv {

namespace {

constexpr double kPi = std::numbers::pi;

double halton(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

Grid3Graph::Grid3Graph(Warp2DProfile profile, Grid3Spec spec) : profile_(std::move(profile)), spec_(spec) {
    if (spec_.n < 32) throw InvalidInput("3D grids need at least 32 nodes per axis");
    if (std::uint64_t(spec_.n) * spec_.n * spec_.n > (std::uint64_t{1} << 24)) {
        throw NumericalGuard("3D grid exceeds 2^24 nodes");
    }
    offsets_ = stencil3_offsets(spec_.k);
    const int n = spec_.n;
    h_ = kTwoPi / n;
    anisotropy_ = anisotropy3_constant(spec_.k, profile_.min_value(), profile_.max_value());
    const std::size_t m = offsets_.size();
    weights_.resize(std::size_t(n) * n * m);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (std::size_t o = 0; o < m; ++o) {
                const auto& d = offsets_[o];
                // Midpoints in half-step units, so both directions of an edge agree bit for bit.
                const int mx = wrap_index(2 * ix + d[0], 2 * n), my = wrap_index(2 * iy + d[1], 2 * n);
                const double f = profile_(-kPi + mx * 0.5 * h_, -kPi + my * 0.5 * h_);
                const double w = h_ * std::sqrt(double(d[0] * d[0] + d[1] * d[1]) + f * f * d[2] * d[2]);
                // Multiples of 2^-40 add exactly, so path sums do not depend on summation order.
                weights_[(std::size_t(ix) * n + iy) * m + o] = std::ldexp(std::round(std::ldexp(w, 40)), -40);
            }
}

std::size_t Grid3Graph::index(int ix, int iy, int iz) const {
    return (std::size_t(ix) * spec_.n + iy) * spec_.n + iz;
}

Grid3Graph::Node Grid3Graph::snap(const Point3& p) const {
    auto axis = [&](double v) { return wrap_index(int(std::lround((v + kPi) / h_)), spec_.n); };
    return {axis(p.x), axis(p.y), axis(p.z)};
}

Point3 Grid3Graph::position(Node n) const {
    return {-kPi + n.ix * h_, -kPi + n.iy * h_, -kPi + n.iz * h_};
}

double Grid3Graph::snap_length(const Point3& p, Node n) const {
    const Point3 x = position(n);
    const double dx = std::remainder(x.x - p.x, kTwoPi), dy = std::remainder(x.y - p.y, kTwoPi);
    const double dz = std::remainder(x.z - p.z, kTwoPi);
    // 8-point Gauss rule along the segment.
    static const double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    static const double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int s : {-1, 1}) {
            const double t = 0.5 * (1.0 + s * nodes[i]);
            const double f = profile_(p.x + t * dx, p.y + t * dy);
            sum += 0.5 * weights[i] * std::sqrt(dx * dx + dy * dy + f * f * dz * dz);
        }
    return sum;
}

std::vector<double> Grid3Graph::node_distances(Node source, const std::vector<Node>& targets) const {
    const int n = spec_.n;
    const std::size_t m = offsets_.size();
    std::vector<double> dist(std::size_t(n) * n * n, std::numeric_limits<double>::infinity());
    std::vector<char> done(dist.size(), 0);
    std::vector<char> wanted(dist.size(), 0);
    std::size_t remaining = 0;
    for (const Node& t : targets) {
        char& w = wanted[index(t.ix, t.iy, t.iz)];
        if (!w) ++remaining;
        w = 1;
    }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const std::size_t s = index(source.ix, source.iy, source.iz);
    dist[s] = 0.0;
    heap.push({0.0, s});
    while (!heap.empty() && remaining > 0) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (wanted[u]) --remaining;
        const int iz = int(u % n), iy = int((u / n) % n), ix = int(u / (std::size_t(n) * n));
        const double* w = &weights_[(std::size_t(ix) * n + iy) * m];
        for (std::size_t o = 0; o < m; ++o) {
            const auto& off = offsets_[o];
            const std::size_t v =
                index(wrap_index(ix + off[0], n), wrap_index(iy + off[1], n), wrap_index(iz + off[2], n));
            const double nd = d + w[o];
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    std::vector<double> out;
    out.reserve(targets.size());
    for (const Node& t : targets) out.push_back(dist[index(t.ix, t.iy, t.iz)]);
    return out;
}

PairDistance Grid3Graph::distance(const Point3& p, const Point3& q) const {
    return batch_grid3_distances(*this, {Pair3{p, q, false}}, 1).front();
}

std::vector<PairDistance> batch_grid3_distances(const Grid3Graph& graph, const std::vector<Pair3>& pairs,
                                                int threads) {
    const int n = graph.spec().n;
    struct Job {
        Grid3Graph::Node source;
        std::vector<std::size_t> members;
        std::vector<Grid3Graph::Node> targets;
    };
    std::map<std::pair<int, int>, Job> by_column;
    std::vector<double> snaps(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto np = graph.snap(pairs[i].p);
        const auto nq = graph.snap(pairs[i].q);
        Job& job = by_column[{np.ix, np.iy}];
        job.source = {np.ix, np.iy, 0};
        job.members.push_back(i);
        // f does not depend on z, so shift the source to z index 0.
        job.targets.push_back({nq.ix, nq.iy, wrap_index(nq.iz - np.iz, n)});
        snaps[i] = graph.snap_length(pairs[i].p, np) + graph.snap_length(pairs[i].q, nq);
    }
    std::vector<Job> jobs;
    for (auto& [key, job] : by_column) jobs.push_back(std::move(job));
    std::vector<PairDistance> out(pairs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            const auto d = graph.node_distances(jobs[k].source, jobs[k].targets);
            for (std::size_t m = 0; m < jobs[k].members.size(); ++m) {
                const std::size_t i = jobs[k].members[m];
                out[i] = {d[m], snaps[i] + graph.anisotropy() * d[m]};
            }
        }
    };
    const int t = std::min<int>(threads > 0 ? threads : worker_threads(), int(jobs.size()));
    if (t <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < t; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

double limit3_distance(double c, const Point3& p, const Point3& q) {
    if (!(c > 0.0)) throw InvalidInput("limit level must be positive");
    const double dx = std::remainder(q.x - p.x, kTwoPi), dy = std::remainder(q.y - p.y, kTwoPi);
    const double dz = std::remainder(q.z - p.z, kTwoPi);
    return std::sqrt(dx * dx + dy * dy + c * c * dz * dz);
}

double diameter3_upper_bound(double delta_l2, double c_sup) {
    if (!(c_sup > 0.0)) throw InvalidInput("sup of the limit profile must be positive");
    if (!(delta_l2 >= 0.0)) throw InvalidInput("L2 distance must be nonnegative");
    return 4.0 * std::sqrt(2.0) * kPi + 2.0 * kPi * (c_sup + delta_l2 / (2.0 * kPi));
}

double mass3_estimate(const Warp2DProfile& profile) { return kTwoPi * profile.integral(); }

std::vector<Pair3> sample_plan3(const Warp2DProfile& profile, const PlanOptions& options) {
    if (options.sources < 1 || options.targets < 1) throw InvalidInput("sample plan must be nonempty");
    auto point = [](std::uint64_t i, unsigned a, unsigned b, unsigned c) {
        return Point3{-kPi + kTwoPi * halton(i, a), -kPi + kTwoPi * halton(i, b), -kPi + kTwoPi * halton(i, c)};
    };
    std::vector<Pair3> plan;
    for (int s = 0; s < options.sources; ++s) {
        const Point3 p = point(options.seed * 1000003u + std::uint64_t(s) + 1, 2, 3, 5);
        for (int t = 0; t < options.targets; ++t) {
            const std::uint64_t k = options.seed * 1000003u + std::uint64_t(s * options.targets + t) + 1;
            plan.push_back({p, point(k, 7, 11, 13), false});
        }
    }
    for (const auto& b : profile.bumps()) {
        plan.push_back({{b.x, b.y, 0.0}, {b.x, b.y, kPi - 1e-9}, true});
        plan.push_back({{b.x, b.y, 0.0}, {b.x, b.y, 0.5 * kPi}, true});
        plan.push_back({{b.x - 1.0, b.y, 0.0}, {b.x + 1.0, b.y, kPi - 1e-9}, true});
    }
    return plan;
}

ConvergenceReport run_torus3_experiment(const std::vector<int>& js, const Torus3Options& options) {
    if (js.empty()) throw InvalidInput("experiment needs at least one j");
    ConvergenceReport report;
    report.label = "MovingBump2D";
    report.dimension = 3;
    report.limits = {LimitMetric::product(options.c)};
    report.fixed_pairs = static_cast<std::size_t>(options.plan.sources) * options.plan.targets;

    const Warp2DProfile flat = Warp2DProfile::constant(options.c);
    const Grid3Graph flat_graph(flat, options.grid);
    const double mass = mass3_estimate(Warp2DProfile::constant(1.0));

    for (int j : js) {
        const Warp2DProfile f = Warp2DProfile::moving_bump(options.c, options.h0, j);
        const auto plan = sample_plan3(f, options.plan);
        const Grid3Graph g(f, options.grid);
        const auto dj = batch_grid3_distances(g, plan);
        const auto dlim = batch_grid3_distances(flat_graph, plan);

        ReportRow row;
        row.j = j;
        row.grid = GridSpec{options.grid.n, options.grid.n, options.grid.k, std::nullopt};
        row.samples = plan.size();
        row.eps.push_back(discrepancy_from(dj, dlim));
        row.l2 = f.l2_distance_to(options.c);
        const auto t = moving_term(j);
        row.l2_bound = std::abs(options.h0 - options.c) * std::sqrt(kPi) * t.half_width;
        row.lambda = std::max(f.max_value(), 1.0 / f.min_value());
        row.mass = mass;
        row.gh_bound = gh_upper_bound(row.eps.front().eps_hat);
        row.flat_bound = flat_upper_bound(row.eps.front().eps_hat, row.lambda, 3, mass);

        const double m_j = f.min_value();
        const double diam = diameter3_upper_bound(row.l2, options.c);
        auto tag = [&](std::size_t i) { return "pair " + std::to_string(i); };
        auto worst = [&](const std::string& lemma, auto&& eval) {
            SlackRow best;
            bool any = false;
            for (std::size_t i = 0; i < plan.size(); ++i) {
                SlackRow r = eval(i);
                if (any && r.slack + r.tol >= best.slack + best.tol) continue;
                best = std::move(r);
                best.item = tag(i);
                any = true;
            }
            best.lemma = lemma;
            best.j = j;
            report.slacks.push_back(std::move(best));
        };
        if (!(m_j >= options.c - 1.0 / j && options.c - 1.0 / j > 0.0)) {
            SlackRow r;
            r.lemma = "distance lower bound";
            r.j = j;
            r.skipped = true;
            r.reason = "needs f_j >= c - 1/j > 0";
            report.slacks.push_back(r);
        } else {
            const double bound = -std::sqrt(2.0) * std::sqrt(options.c) * diam / (m_j * std::sqrt(double(j)));
            worst("distance lower bound", [&](std::size_t i) {
                SlackRow r;
                r.bound = bound;
                r.observed = dj[i].value - dlim[i].value;
                r.slack = r.observed - bound;
                r.tol = dj[i].error + dlim[i].error;
                return r;
            });
        }
        worst("diameter bound", [&](std::size_t i) {
            SlackRow r;
            r.bound = diam;
            r.observed = dj[i].value;
            r.slack = diam - dj[i].value;
            r.tol = dj[i].error;
            return r;
        });
        worst("bilipschitz sandwich", [&](std::size_t i) {
            const double d1 = limit3_distance(1.0, plan[i].p, plan[i].q);
            const double lo = d1 / row.lambda, hi = row.lambda * d1, v = dj[i].value;
            SlackRow r;
            r.bound = v - lo < hi - v ? lo : hi;
            r.observed = v;
            r.slack = std::min(v - lo, hi - v);
            r.tol = dj[i].error;
            return r;
        });
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace warpconv
