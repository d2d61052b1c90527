#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "warpconv/space.hpp"

namespace warpconv {

struct GridSpec {
    int n_r = 128;
    int n_theta = 128;
    int k = 2;  // Chebyshev radius of the edge stencil
    /// Base coordinate that must be a grid row. Defaults to r0 (interval) or -pi (circle).
    std::optional<double> anchor;
};

enum class GeodesicMethod { Grid, Clairaut, ClosedForm };

const char* to_string(GeodesicMethod method);

struct GeodesicResult {
    double distance = 0.0;
    PolylineCurve path;
    GeodesicMethod method = GeodesicMethod::Grid;
    double error_estimate = 0.0;
    bool converged = true;
};

/// Primitive stencil offsets (dr, dtheta) with max(|dr|, |dtheta|) <= k and gcd 1.
std::vector<std::pair<int, int>> stencil_offsets(int k);

/// Largest relative excess of the best stencil path over the straight length, for a
/// locally constant metric in which one grid step has aspect ratio
/// a = f * dtheta / dr somewhere in [aspect_min, aspect_max].
double anisotropy_constant(int k, double aspect_min = 1.0, double aspect_max = 1.0);

/// Shortest paths on the weighted stencil graph of a warped space.
///
/// Edge weights are lengths of straight coordinate segments (4-point midpoint rule per
/// smooth piece of f). The graph is built once and may be queried concurrently.
class GridGraph {
public:
    struct Node {
        int row = 0;
        int col = 0;
    };

    GridGraph(const WarpedSpace& space, GridSpec spec);

    [[nodiscard]] const WarpedSpace& space() const { return space_; }
    [[nodiscard]] const GridSpec& spec() const { return spec_; }
    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int columns() const { return spec_.n_theta; }
    [[nodiscard]] double dr() const { return dr_; }
    [[nodiscard]] double dtheta() const { return dtheta_; }
    [[nodiscard]] double row_r(int row) const;
    /// Relative anisotropy bound c for this grid and profile range.
    [[nodiscard]] double anisotropy() const { return anisotropy_; }

    [[nodiscard]] Node snap(const SurfacePoint& p) const;
    [[nodiscard]] SurfacePoint position(Node n) const;
    /// Length of the straight segment from p to the node (upper bound on their distance).
    [[nodiscard]] double snap_length(const SurfacePoint& p, Node n) const;

    /// Graph distances from source to each target.
    [[nodiscard]] std::vector<double> node_distances(Node source, const std::vector<Node>& targets) const;

    /// Snapped distance with realizing polyline and error estimate
    /// snap(p) + snap(q) + anisotropy * distance.
    [[nodiscard]] GeodesicResult distance(const SurfacePoint& p, const SurfacePoint& q) const;

private:
    struct Sweep {
        std::vector<double> dist;
        std::vector<std::int8_t> via;  // stencil index of the last edge, -1 at the source
    };

    Sweep run(Node source, const std::vector<Node>& targets) const;
    [[nodiscard]] int shift_row(int row, int d) const;  // -1 when outside an interval base

    WarpedSpace space_;
    GridSpec spec_;
    int rows_ = 0;
    double first_r_ = 0.0;
    double dr_ = 0.0;
    double dtheta_ = 0.0;
    double anisotropy_ = 0.0;
    std::vector<std::pair<int, int>> half_;     // offsets with dr > 0, or dr == 0 and dtheta > 0
    std::vector<std::pair<int, int>> stencil_;  // half_ followed by its negations
    std::vector<double> half_weights_;          // rows_ x half_.size()
};

GeodesicResult grid_distance(const WarpedSpace& space, const GridSpec& grid, const SurfacePoint& p,
                             const SurfacePoint& q);

}  // namespace warpconv
