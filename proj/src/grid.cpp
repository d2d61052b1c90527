#include "warpconv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "warpconv/errors.hpp"

namespace warpconv {

namespace {

constexpr std::size_t kMaxNodes = std::size_t{1} << 25;

// Angle between (x1, a*y1) and (x2, a*y2); both in the closed first quadrant.
double gap_angle(std::pair<int, int> u, std::pair<int, int> v, double a) {
    const double x1 = u.first, y1 = a * u.second, x2 = v.first, y2 = a * v.second;
    return std::atan2(std::abs(x1 * y2 - x2 * y1), x1 * x2 + y1 * y2);
}

}  // namespace

const char* to_string(GeodesicMethod method) {
    switch (method) {
        case GeodesicMethod::Grid: return "grid";
        case GeodesicMethod::Clairaut: return "clairaut";
        case GeodesicMethod::ClosedForm: return "closed-form";
    }
    return "unknown";
}

std::vector<std::pair<int, int>> stencil_offsets(int k) {
    if (k < 1 || k > 3) throw InvalidInput("stencil radius k must be 1, 2 or 3");
    std::vector<std::pair<int, int>> out;
    for (int di = -k; di <= k; ++di) {
        for (int dj = -k; dj <= k; ++dj) {
            if ((di != 0 || dj != 0) && std::gcd(di, dj) == 1) out.emplace_back(di, dj);
        }
    }
    return out;
}

double anisotropy_constant(int k, double aspect_min, double aspect_max) {
    if (!(aspect_min > 0.0) || !(aspect_max >= aspect_min)) throw InvalidInput("aspect range must be positive");
    // The stencil is symmetric under both reflections, so first-quadrant gaps suffice.
    std::vector<std::pair<int, int>> q;
    for (auto [di, dj] : stencil_offsets(k)) {
        if (di >= 0 && dj >= 0) q.emplace_back(di, dj);
    }
    std::sort(q.begin(), q.end(), [](auto u, auto v) {
        return std::atan2(u.second, u.first) < std::atan2(v.second, v.first);
    });
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        const auto u = q[i], v = q[i + 1];
        std::vector<double> candidates{aspect_min, aspect_max};
        const double xx = static_cast<double>(u.first) * v.first;
        const double yy = static_cast<double>(u.second) * v.second;
        if (xx > 0.0 && yy > 0.0) {
            const double critical = std::sqrt(xx / yy);
            if (critical > aspect_min && critical < aspect_max) candidates.push_back(critical);
        }
        for (double a : candidates) worst = std::max(worst, gap_angle(u, v, a));
    }
    return 1.0 / std::cos(0.5 * worst) - 1.0;
}

GridGraph::GridGraph(const WarpedSpace& space, GridSpec spec) : space_(space), spec_(spec) {
    if (spec_.n_r < 8 || spec_.n_theta < 8) throw InvalidInput("grid needs n_r >= 8 and n_theta >= 8");
    if (spec_.k < 1 || spec_.k > 3) throw InvalidInput("stencil radius k must be 1, 2 or 3");
    const BaseSpace& base = space_.base();
    dtheta_ = space_.fiber().circumference / spec_.n_theta;
    if (base.is_circle()) {
        dr_ = kTwoPi / spec_.n_r;
        rows_ = spec_.n_r;
        first_r_ = base.wrap(spec_.anchor.value_or(-std::numbers::pi));
    } else {
        dr_ = base.length() / spec_.n_r;
        const double anchor = spec_.anchor.value_or(base.r0);
        if (!base.contains(anchor)) throw InvalidInput("grid anchor outside the base");
        first_r_ = anchor - std::floor((anchor - base.r0) / dr_ + 1e-9) * dr_;
        rows_ = static_cast<int>(std::floor((base.r1 - first_r_) / dr_ + 1e-9)) + 1;
    }
    if (static_cast<std::size_t>(rows_) * static_cast<std::size_t>(spec_.n_theta) > kMaxNodes) {
        throw NumericalGuard("grid exceeds the node budget");
    }

    for (auto off : stencil_offsets(spec_.k)) {
        if (off.first > 0 || (off.first == 0 && off.second > 0)) half_.push_back(off);
    }
    stencil_ = half_;
    for (auto [di, dj] : half_) stencil_.emplace_back(-di, -dj);

    const auto rule = QuadratureRule::midpoint(4);
    half_weights_.assign(static_cast<std::size_t>(rows_) * half_.size(),
                         std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < rows_; ++i) {
        const double r = base.is_circle() ? first_r_ + i * dr_ : row_r(i);
        for (std::size_t h = 0; h < half_.size(); ++h) {
            const auto [di, dj] = half_[h];
            if (shift_row(i, di) < 0) continue;
            double step = di * dr_;
            if (!base.is_circle() && di != 0) step = row_r(i + di) - r;
            // Multiples of 2^-40 add exactly, so path sums do not depend on summation order.
            const double w = space_.segment_length(r, step, dj * dtheta_, rule);
            half_weights_[i * half_.size() + h] = std::ldexp(std::round(std::ldexp(w, 40)), -40);
        }
    }

    const double amin = space_.global_min() * dtheta_ / dr_;
    const double amax = space_.global_max() * dtheta_ / dr_;
    anisotropy_ = anisotropy_constant(spec_.k, amin, amax);
}

double GridGraph::row_r(int row) const {
    const double r = first_r_ + row * dr_;
    if (space_.base().is_circle()) return space_.base().wrap(r);
    return std::clamp(r, space_.base().r0, space_.base().r1);
}

int GridGraph::shift_row(int row, int d) const {
    const int t = row + d;
    if (space_.base().is_circle()) return ((t % rows_) + rows_) % rows_;
    return (t < 0 || t >= rows_) ? -1 : t;
}

GridGraph::Node GridGraph::snap(const SurfacePoint& p) const {
    space_.check_point(p);
    Node n;
    if (space_.base().is_circle()) {
        const double x = std::remainder(space_.base().wrap(p.r) - first_r_, kTwoPi);
        const long k = std::lround(x / dr_);
        n.row = static_cast<int>(((k % rows_) + rows_) % rows_);
    } else {
        n.row = std::clamp(static_cast<int>(std::lround((p.r - first_r_) / dr_)), 0, rows_ - 1);
    }
    const long c = std::lround(space_.fiber().wrap(p.theta) / dtheta_);
    n.col = static_cast<int>(c % spec_.n_theta);
    return n;
}

SurfacePoint GridGraph::position(Node n) const { return {row_r(n.row), n.col * dtheta_}; }

double GridGraph::snap_length(const SurfacePoint& p, Node n) const {
    const SurfacePoint x = position(n);
    double dr = x.r - p.r;
    if (space_.base().is_circle()) dr = std::remainder(dr, kTwoPi);
    const double dt = space_.fiber().displacement(p.theta, x.theta);
    return space_.segment_length(p.r, dr, dt, QuadratureRule::gauss(8));
}

GridGraph::Sweep GridGraph::run(Node source, const std::vector<Node>& targets) const {
    const int cols = spec_.n_theta;
    const std::size_t n_nodes = static_cast<std::size_t>(rows_) * cols;
    const std::size_t n_half = half_.size();
    Sweep s;
    s.dist.assign(n_nodes, std::numeric_limits<double>::infinity());
    s.via.assign(n_nodes, -1);

    std::vector<char> wanted(n_nodes, 0);
    std::size_t remaining = 0;
    for (const Node& t : targets) {
        const std::size_t id = static_cast<std::size_t>(t.row) * cols + t.col;
        if (!wanted[id]) {
            wanted[id] = 1;
            ++remaining;
        }
    }

    using Entry = std::pair<double, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    const std::uint32_t src = static_cast<std::uint32_t>(source.row * cols + source.col);
    s.dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > s.dist[u]) continue;
        if (wanted[u]) {
            wanted[u] = 0;
            if (--remaining == 0) break;
        }
        const int row = static_cast<int>(u / cols);
        const int col = static_cast<int>(u % cols);
        for (std::size_t e = 0; e < stencil_.size(); ++e) {
            const auto [di, dj] = stencil_[e];
            const int nr = shift_row(row, di);
            if (nr < 0) continue;
            const double w = e < n_half ? half_weights_[row * n_half + e]
                                        : half_weights_[nr * n_half + (e - n_half)];
            int nc = col + dj;
            if (nc < 0) nc += cols;
            if (nc >= cols) nc -= cols;
            const std::uint32_t v = static_cast<std::uint32_t>(nr * cols + nc);
            const double nd = d + w;
            if (nd < s.dist[v]) {
                s.dist[v] = nd;
                s.via[v] = static_cast<std::int8_t>(e);
                heap.emplace(nd, v);
            }
        }
    }
    return s;
}

std::vector<double> GridGraph::node_distances(Node source, const std::vector<Node>& targets) const {
    // Distances are invariant under fiber rotation, so sweep from column 0.
    const int cols = spec_.n_theta;
    std::vector<Node> shifted;
    shifted.reserve(targets.size());
    for (const Node& t : targets) shifted.push_back({t.row, ((t.col - source.col) % cols + cols) % cols});
    const Sweep s = run({source.row, 0}, shifted);
    std::vector<double> out;
    out.reserve(targets.size());
    for (const Node& t : shifted) out.push_back(s.dist[static_cast<std::size_t>(t.row) * cols + t.col]);
    return out;
}

GeodesicResult GridGraph::distance(const SurfacePoint& p, const SurfacePoint& q) const {
    const Node np = snap(p);
    const Node nq = snap(q);
    const int cols = spec_.n_theta;
    const Node target{nq.row, ((nq.col - np.col) % cols + cols) % cols};
    const Sweep s = run({np.row, 0}, {target});

    GeodesicResult out;
    out.method = GeodesicMethod::Grid;
    out.distance = s.dist[static_cast<std::size_t>(target.row) * cols + target.col];

    // Walk predecessors back to the source, then rotate columns back by np.col.
    std::vector<Node> nodes{target};
    std::vector<SegmentWrap> wraps;
    Node cur = target;
    while (s.via[static_cast<std::size_t>(cur.row) * cols + cur.col] >= 0) {
        const auto [di, dj] = stencil_[s.via[static_cast<std::size_t>(cur.row) * cols + cur.col]];
        Node prev{shift_row(cur.row, -di), ((cur.col - dj) % cols + cols) % cols};
        wraps.push_back({(prev.row + di - cur.row) / rows_, (prev.col + dj - cur.col) / cols});
        nodes.push_back(prev);
        cur = prev;
    }
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(wraps.begin(), wraps.end());

    const FiberSpace& fiber = space_.fiber();
    auto link = [&](const SurfacePoint& a, const SurfacePoint& b) {
        SegmentWrap w;
        const double raw = b.theta - a.theta;
        w.fiber = static_cast<int>(std::lround((fiber.displacement(a.theta, b.theta) - raw) / fiber.circumference));
        if (space_.base().is_circle()) {
            w.base = static_cast<int>(std::lround((std::remainder(b.r - a.r, kTwoPi) - (b.r - a.r)) / kTwoPi));
        }
        return w;
    };
    std::vector<SurfacePoint>& verts = out.path.vertices;
    std::vector<SegmentWrap>& pw = out.path.wraps;
    verts.push_back(p);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Node n{nodes[i].row, (nodes[i].col + np.col) % cols};
        SurfacePoint x = position(n);
        SegmentWrap w;
        if (i == 0) {
            if (x.r == p.r && fiber.wrap(x.theta) == fiber.wrap(p.theta)) continue;
            w = link(verts.back(), x);
        } else {
            w = wraps[i - 1];
            // Column rotation by np.col can move the seam crossing.
            const int before = nodes[i - 1].col + np.col, after = nodes[i].col + np.col;
            w.fiber += (after / cols) - (before / cols);
        }
        verts.push_back(x);
        pw.push_back(w);
    }
    const SurfacePoint last = verts.back();
    if (!(last.r == q.r && fiber.wrap(last.theta) == fiber.wrap(q.theta))) {
        pw.push_back(link(last, q));
        verts.push_back(q);
    }
    if (verts.size() == 1) {
        verts.push_back(q);
        pw.push_back({});
    }

    out.error_estimate = snap_length(p, np) + snap_length(q, nq) + anisotropy_ * out.distance;
    return out;
}

GeodesicResult grid_distance(const WarpedSpace& space, const GridSpec& grid, const SurfacePoint& p,
                             const SurfacePoint& q) {
    return GridGraph(space, grid).distance(p, q);
}

}  // namespace warpconv
