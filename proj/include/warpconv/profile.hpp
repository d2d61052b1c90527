#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace warpconv {

/// Canonical even bump shape on [-1, 1]: (1 + cos(pi t)) / 2, zero outside.
/// Equals 1 at t = 0 and vanishes with zero slope at t = +-1.
double bump_shape(double t);

struct Bump {
    double center = 0.0;
    double half_width = 1.0;
    double peak = 1.0;  // profile value at the center
};

enum class ProfileFamily { Constant, CinchBump, RidgeBump, SumOfBumps, BumpTrain, Tabulated };

const char* to_string(ProfileFamily family);

struct QuadratureRule {
    enum class Kind { Midpoint, Gauss };
    Kind kind = Kind::Gauss;
    int n = 64;  // subintervals per smooth piece

    static QuadratureRule midpoint(int n) { return {Kind::Midpoint, n}; }
    static QuadratureRule gauss(int n) { return {Kind::Gauss, n}; }
};

/// Equally spaced identical bumps: centers first_center + i * spacing, i < count.
struct BumpTrainParams {
    double level = 1.0;
    double peak = 1.0;
    double first_center = 0.0;
    double spacing = 1.0;
    std::uint64_t count = 0;
    double half_width = 0.0;
};

/// Positive warping function f(r) of the base coordinate.
///
/// Every bump family uses the canonical shape: inside a support
/// [s - delta, s + delta] the value is level + (peak - level) * bump_shape((r - s) / delta);
/// outside all supports it is exactly the level. Bump supports never overlap.
/// Tabulated profiles interpolate linearly and clamp beyond their end knots.
class WarpingProfile {
public:
    static WarpingProfile constant(double c);
    /// Valley at level 1 dipping to h0 in (0, 1].
    static WarpingProfile cinch(double h0, double center, double half_width);
    /// Ridge at level 1 rising to h0 in (1, 2].
    static WarpingProfile ridge(double h0, double center, double half_width);
    static WarpingProfile sum_of_bumps(double level, std::vector<Bump> bumps);
    static WarpingProfile bump_train(const BumpTrainParams& params);
    static WarpingProfile tabulated(std::vector<double> r, std::vector<double> f);

    [[nodiscard]] ProfileFamily family() const { return family_; }
    /// Ambient value outside bump supports; the constant for Constant profiles.
    [[nodiscard]] double level() const { return level_; }
    [[nodiscard]] bool is_constant() const { return family_ == ProfileFamily::Constant; }

    [[nodiscard]] double operator()(double r) const;

    /// f(r + dr) - f(r) without cancellation when both points lie in one smooth piece.
    [[nodiscard]] double increment(double r, double dr) const;

    [[nodiscard]] double min_on(double a, double b) const;
    [[nodiscard]] double max_on(double a, double b) const;

    /// Number of non-smooth points strictly inside (a, b).
    [[nodiscard]] std::uint64_t breakpoint_count(double a, double b) const;
    /// Sorted non-smooth points strictly inside (a, b). Throws NumericalGuard
    /// when there are more than max_count of them.
    [[nodiscard]] std::vector<double> breakpoints(double a, double b,
                                                  std::uint64_t max_count = 1u << 22) const;

    /// Integral of g(f(r)) over [a, b] (a <= b), split at every breakpoint.
    /// Bump pieces are integrated in the bump's local coordinate so arbitrarily
    /// narrow bumps keep their shape; long trains of identical bumps are summed
    /// as count * (one bump).
    [[nodiscard]] double integrate(double a, double b, const std::function<double(double)>& g,
                                   QuadratureRule rule) const;

    [[nodiscard]] const std::vector<Bump>& bumps() const { return bumps_; }
    [[nodiscard]] const BumpTrainParams& train() const { return train_; }
    [[nodiscard]] const std::vector<double>& table_r() const { return table_r_; }
    [[nodiscard]] const std::vector<double>& table_f() const { return table_f_; }

    [[nodiscard]] std::string describe() const;

private:
    WarpingProfile() = default;

    struct Piece {
        enum class Kind { Level, Bump, Linear } kind;
        double a, b;          // physical extent
        double t0 = 0, t1 = 0;  // local coordinates for Bump pieces
        double half_width = 0, peak = 0;
        double fa = 0, fb = 0;  // Linear endpoint values
    };

    void for_each_piece(double a, double b, const std::function<void(const Piece&)>& visit) const;
    [[nodiscard]] double integrate_piece(const Piece& piece, const std::function<double(double)>& g,
                                         QuadratureRule rule) const;
    [[nodiscard]] std::uint64_t train_index_floor(double r) const;

    ProfileFamily family_ = ProfileFamily::Constant;
    double level_ = 1.0;
    std::vector<Bump> bumps_;
    BumpTrainParams train_;
    std::vector<double> table_r_;
    std::vector<double> table_f_;
};

}  // namespace warpconv
