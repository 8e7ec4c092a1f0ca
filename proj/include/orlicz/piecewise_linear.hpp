#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace orlicz {

struct Knot {
  double t;
  double value;
};

/// Location and size of a jump in the right-hand slope. A piecewise-linear
/// function's dM' is the sum of point masses of these sizes.
struct SlopeJump {
  double location;
  double jump;
};

/// Convex, nondecreasing, piecewise-linear function on [0, inf) through
/// (0, 0). Beyond the last knot it continues with `final_slope`, which may
/// be +inf (the function is +inf past the last knot).
class PiecewiseLinear {
 public:
  /// Throws NonConvex when slopes decrease, InvalidParameter for malformed knots.
  PiecewiseLinear(std::vector<Knot> knots, double final_slope);

  double operator()(double t) const;
  /// Slope of the segment starting at t (right-hand derivative).
  double right_slope(double t) const;
  /// Nonzero slope jumps at knots t > 0, in increasing order. An infinite
  /// final slope shows up as an infinite jump at the last knot.
  std::vector<SlopeJump> slope_jumps() const;
  /// Leftmost t with f(t) = y. Throws OutOfRange when y exceeds the range.
  double inverse(double y) const;
  /// Legendre conjugate, computed knot by knot: slopes become abscissae.
  PiecewiseLinear conjugate() const;

  const std::vector<Knot>& knots() const noexcept { return knots_; }
  double final_slope() const noexcept { return final_slope_; }
  bool has_infinite_final_slope() const noexcept;
  /// Slope of segment i (i == knots().size() - 1 gives the final slope).
  double segment_slope(std::size_t i) const;

 private:
  std::vector<Knot> knots_;
  std::vector<double> slopes_;  // slopes_[i] applies on [t_i, t_{i+1}); last entry is final_slope
  double final_slope_;
};

/// {"knots": [[t, v], ...], "final_slope": s | "inf"}
nlohmann::json to_json(const PiecewiseLinear& f);
PiecewiseLinear piecewise_from_json(const nlohmann::json& j);

}  // namespace orlicz
