#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "warpconv/convergence.hpp"

namespace warpconv {

/// Warping function f(x, y) of the 3-torus dx^2 + dy^2 + f(x, y)^2 dz^2.
class Warp2DProfile {
public:
    enum class Kind { Constant, MovingBump2D, SumOfBumps2D };

    struct Bump2D {
        double x = 0.0;
        double y = 0.0;
        double radius = 1.0;
        double peak = 1.0;
    };

    static Warp2DProfile constant(double c);
    /// c + (h0 - c) * bump(|(x, y) - (t_j, 0)| / delta_j), with t_j, delta_j the moving enumeration.
    static Warp2DProfile moving_bump(double c, double h0, int j);
    static Warp2DProfile sum_of_bumps(double c, std::vector<Bump2D> bumps);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double level() const { return level_; }
    [[nodiscard]] const std::vector<Bump2D>& bumps() const { return bumps_; }
    /// Periodic in x and y with period 2 pi.
    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_value() const;
    /// ||f - c||_L2 over [-pi, pi]^2.
    [[nodiscard]] double l2_distance_to(double c) const;
    /// Integral of f over [-pi, pi]^2.
    [[nodiscard]] double integral() const;

private:
    Kind kind_ = Kind::Constant;
    double level_ = 1.0;
    std::vector<Bump2D> bumps_;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Grid3Spec {
    int n = 64;  // nodes per axis
    int k = 1;   // 26-neighbourhood plus the z-diagonals (+-1, 0, +-2) and (0, +-1, +-2)
};

/// The 34 edge offsets of the 3D stencil.
std::vector<std::array<int, 3>> stencil3_offsets(int k);

/// Largest relative excess of stencil paths over straight lengths when one z step is
/// `aspect` times a horizontal step, maximized over aspect in [aspect_min, aspect_max].
double anisotropy3_constant(int k, double aspect_min = 1.0, double aspect_max = 1.0);

struct Pair3 {
    Point3 p;
    Point3 q;
    bool adversarial = false;
};

class Grid3Graph {
public:
    struct Node {
        int ix = 0, iy = 0, iz = 0;
    };

    /// Throws InvalidInput for n < 32 and NumericalGuard for n^3 > 2^24.
    Grid3Graph(Warp2DProfile profile, Grid3Spec spec);

    [[nodiscard]] const Warp2DProfile& profile() const { return profile_; }
    [[nodiscard]] const Grid3Spec& spec() const { return spec_; }
    [[nodiscard]] double step() const { return h_; }
    [[nodiscard]] double anisotropy() const { return anisotropy_; }
    [[nodiscard]] Node snap(const Point3& p) const;
    [[nodiscard]] Point3 position(Node n) const;
    /// Length of the straight segment from p to the node.
    [[nodiscard]] double snap_length(const Point3& p, Node n) const;

    [[nodiscard]] std::vector<double> node_distances(Node source, const std::vector<Node>& targets) const;
    /// Graph distance between snapped nodes, error = snaps + anisotropy * distance.
    [[nodiscard]] PairDistance distance(const Point3& p, const Point3& q) const;

private:
    [[nodiscard]] std::size_t index(int ix, int iy, int iz) const;

    Warp2DProfile profile_;
    Grid3Spec spec_;
    double h_ = 0.0;
    double anisotropy_ = 0.0;
    std::vector<std::array<int, 3>> offsets_;
    std::vector<double> weights_;  // n * n * offsets: depends on (ix, iy) only
};

/// Pairs sharing a source (x, y) column share one sweep.
std::vector<PairDistance> batch_grid3_distances(const Grid3Graph& graph, const std::vector<Pair3>& pairs,
                                                int threads = 0);

/// Flat limit dx^2 + dy^2 + c^2 dz^2 on the 2 pi periodic cube.
double limit3_distance(double c, const Point3& p, const Point3& q);

/// 4 sqrt(2) pi + 2 pi (c_sup + delta_l2 / (2 pi)). Throws InvalidInput unless c_sup > 0.
double diameter3_upper_bound(double delta_l2, double c_sup);

/// Riemannian volume 2 pi * integral of f over [-pi, pi]^2.
double mass3_estimate(const Warp2DProfile& profile);

/// sources x targets Halton pairs (independent of j) followed by adversarial pairs through the bump.
std::vector<Pair3> sample_plan3(const Warp2DProfile& profile, const PlanOptions& options = {8, 8, 0});

struct Torus3Options {
    double c = 1.0;
    double h0 = 2.0;
    Grid3Spec grid;
    PlanOptions plan{8, 8, 0};
};

/// MovingBump2D experiment against the flat limit c (evaluated on the same grid). Rows use
/// n = 3 in the flat bound; slacks cover the distance lower bound, the diameter bound and the
/// bilipschitz sandwich.
ConvergenceReport run_torus3_experiment(const std::vector<int>& js, const Torus3Options& options = {});

}  // namespace warpconv
