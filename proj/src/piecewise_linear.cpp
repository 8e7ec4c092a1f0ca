#include "orlicz/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlicz/errors.hpp"
#include "orlicz/numerics.hpp"

namespace orlicz {

namespace {
// Relative slack on slope comparisons so that knots produced by conjugation
// (which carry rounding) are not rejected.
constexpr double kSlopeSlack = 1e-12;
}  // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<Knot> knots, double final_slope)
    : knots_(std::move(knots)), final_slope_(final_slope) {
  if (knots_.empty() || knots_.front().t != 0.0 || knots_.front().value != 0.0) {
    throw Error(ErrorCode::InvalidParameter, "piecewise-linear knots must start at (0, 0)");
  }
  if (std::isnan(final_slope_)) throw Error(ErrorCode::InvalidParameter, "final slope is NaN");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].value)) {
      throw Error(ErrorCode::InvalidParameter, "knots must be finite");
    }
    if (!(knots_[i].t > knots_[i - 1].t)) {
      throw Error(ErrorCode::InvalidParameter, "knot abscissae must be strictly increasing");
    }
  }
  slopes_.reserve(knots_.size());
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    slopes_.push_back((knots_[i + 1].value - knots_[i].value) / (knots_[i + 1].t - knots_[i].t));
  }
  slopes_.push_back(final_slope_);
  if (slopes_.front() < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "an Orlicz function cannot decrease");
  }
  // rounding in a slope computed from two knot values
  auto noise = [this](std::size_t i) {
    if (i + 1 >= knots_.size()) return 0.0;
    const double scale = std::abs(knots_[i].value) + std::abs(knots_[i + 1].value);
    return 4.0 * std::numeric_limits<double>::epsilon() * scale / (knots_[i + 1].t - knots_[i].t);
  };
  for (std::size_t i = 1; i < slopes_.size(); ++i) {
    const double prev = slopes_[i - 1];
    if (slopes_[i] < prev - kSlopeSlack * std::max(1.0, std::abs(prev)) - noise(i - 1) - noise(i)) {
      throw Error(ErrorCode::NonConvex, "slopes decrease after knot " + std::to_string(i));
    }
  }
}

bool PiecewiseLinear::has_infinite_final_slope() const noexcept { return std::isinf(final_slope_); }

double PiecewiseLinear::segment_slope(std::size_t i) const { return slopes_.at(i); }

double PiecewiseLinear::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const Knot& k) { return x < k.t; });
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const Knot& k = knots_[i];
  if (t == k.t) return k.value;
  if (std::isinf(slopes_[i])) return kInf;
  return k.value + slopes_[i] * (t - k.t);
}

double PiecewiseLinear::right_slope(double t) const {
  if (t < 0.0) t = 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const Knot& k) { return x < k.t; });
  return slopes_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::vector<SlopeJump> PiecewiseLinear::slope_jumps() const {
  std::vector<SlopeJump> jumps;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const double jump = std::isinf(slopes_[i]) ? kInf : slopes_[i] - slopes_[i - 1];
    if (jump > 0.0) jumps.push_back({knots_[i].t, jump});
  }
  return jumps;
}

double PiecewiseLinear::inverse(double y) const {
  if (std::isnan(y) || y < 0.0) throw Error(ErrorCode::InvalidParameter, "inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (knots_[i + 1].value >= y) {
      if (knots_[i + 1].value == y) {
        // leftmost preimage: walk back over a flat stretch at level y
        std::size_t j = i + 1;
        while (j > 0 && knots_[j - 1].value == y) --j;
        return knots_[j].t;
      }
      return knots_[i].t + (y - knots_[i].value) / slopes_[i];
    }
  }
  const Knot& last = knots_.back();
  if (std::isinf(final_slope_)) {
    throw Error(ErrorCode::OutOfRange, "level " + std::to_string(y) + " is never attained (jumps to +inf)");
  }
  if (final_slope_ <= 0.0) {
    throw Error(ErrorCode::OutOfRange, "level " + std::to_string(y) + " exceeds the bounded range");
  }
  return last.t + (y - last.value) / final_slope_;
}

PiecewiseLinear PiecewiseLinear::conjugate() const {
  // Between consecutive distinct slopes the maximiser of x t - f(t) is a
  // single knot, so the conjugate is linear there with that knot's abscissa
  // as slope. At x = slope of segment i the value is x t_i - v_i.
  std::vector<Knot> out{{0.0, 0.0}};
  const std::size_t last = knots_.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double s = slopes_[i];
    if (std::isinf(s)) break;
    const double value = s * knots_[i].t - knots_[i].value;
    if (s > out.back().t) {
      out.push_back({s, std::max(value, out.back().value)});
    }
  }
  const double conj_final = std::isinf(final_slope_) ? knots_.back().t : kInf;
  return PiecewiseLinear(std::move(out), conj_final);
}

nlohmann::json to_json(const PiecewiseLinear& f) {
  nlohmann::json knots = nlohmann::json::array();
  for (const Knot& k : f.knots()) knots.push_back({k.t, k.value});
  nlohmann::json j;
  j["knots"] = knots;
  if (f.has_infinite_final_slope()) {
    j["final_slope"] = "inf";
  } else {
    j["final_slope"] = f.final_slope();
  }
  return j;
}

PiecewiseLinear piecewise_from_json(const nlohmann::json& j) {
  try {
    std::vector<Knot> knots;
    for (const auto& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2) {
        throw Error(ErrorCode::ParseError, "each knot must be a [t, value] pair");
      }
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    const auto& fs = j.at("final_slope");
    double final_slope = 0.0;
    if (fs.is_string()) {
      if (fs.get<std::string>() != "inf") throw Error(ErrorCode::ParseError, "final_slope must be a number or \"inf\"");
      final_slope = kInf;
    } else {
      final_slope = fs.get<double>();
    }
    return PiecewiseLinear(std::move(knots), final_slope);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("piecewise-linear JSON: ") + e.what());
  }
}

}  // namespace orlicz
