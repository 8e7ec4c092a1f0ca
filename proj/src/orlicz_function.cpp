#include "orlicz/orlicz_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace orlicz {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
constexpr double kGrowthCap = 0x1.0p100;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

OrliczFunction::OrliczFunction(RealFn value, RealFn derivative, RealFn second_derivative,
                               FunctionKind kind, bool degenerate_allowed)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      second_derivative_(std::move(second_derivative)),
      kind_(std::move(kind)),
      degenerate_allowed_(degenerate_allowed) {
  if (!value_) throw Error(ErrorCode::InvalidParameter, "an Orlicz function needs an evaluator");
}

double OrliczFunction::derivative(double t) const {
  if (derivative_) return derivative_(t);
  return central_difference(value_, t, 1);
}

double OrliczFunction::second_derivative(double t) const {
  if (!second_derivative_) {
    throw Error(ErrorCode::MissingSecondDerivative, describe() + " has no second derivative");
  }
  return second_derivative_(t);
}

std::optional<PiecewiseLinear> OrliczFunction::as_piecewise() const {
  if (const auto* pw = std::get_if<PiecewiseKind>(&kind_)) return pw->pwl;
  if (const auto* tr = std::get_if<TruncatedKind>(&kind_)) {
    auto inner = tr->inner->as_piecewise();
    if (!inner) return std::nullopt;
    std::vector<Knot> knots;
    for (const Knot& k : inner->knots()) {
      if (k.t < tr->T) knots.push_back(k);
    }
    knots.push_back({tr->T, tr->value_at_T});
    return PiecewiseLinear(std::move(knots), tr->slope_at_T);
  }
  return std::nullopt;
}

std::string OrliczFunction::describe() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerKind>) {
          return "power:" + format_number(k.p);
        } else if constexpr (std::is_same_v<K, GaussianKind>) {
          return "gaussian";
        } else if constexpr (std::is_same_v<K, PiecewiseKind>) {
          return "pwl(" + std::to_string(k.pwl.knots().size()) + " knots)";
        } else if constexpr (std::is_same_v<K, TruncatedKind>) {
          return "truncated(" + k.inner->describe() + ", T=" + format_number(k.T) + ")";
        } else {
          return k.label;
        }
      },
      kind_);
}

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::InvalidParameter, "a vector needs at least one entry");
  for (double v : entries_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "vector entries must be finite");
  }
}

double Vector::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

bool Vector::is_zero() const { return max_abs() == 0.0; }

OrliczFunction make_power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidParameter, "power Orlicz function needs p >= 1");
  }
  RealFn value = [p](double t) { return t <= 0.0 ? 0.0 : std::pow(t, p); };
  RealFn derivative = [p](double t) {
    if (p == 1.0) return 1.0;
    return t <= 0.0 ? 0.0 : p * std::pow(t, p - 1.0);
  };
  RealFn second = [p](double t) {
    if (p == 1.0) return 0.0;
    if (t <= 0.0) {
      if (p < 2.0) return kInf;
      return p == 2.0 ? 2.0 : 0.0;
    }
    return p * (p - 1.0) * std::pow(t, p - 2.0);
  };
  return OrliczFunction(std::move(value), std::move(derivative), std::move(second), PowerKind{p});
}

OrliczFunction make_gaussian_m() {
  // Substituting u = 1/t and integrating by parts gives
  // M(s) = sqrt(2/pi) s exp(-1/(2 s^2)) - erfc(1/(s sqrt 2)).
  RealFn value = [](double s) {
    if (s <= 0.0) return 0.0;
    const double v = kSqrt2OverPi * s * std::exp(-0.5 / (s * s)) - std::erfc(1.0 / (s * std::numbers::sqrt2));
    return std::max(v, 0.0);
  };
  RealFn derivative = [](double t) { return t <= 0.0 ? 0.0 : kSqrt2OverPi * std::exp(-0.5 / (t * t)); };
  RealFn second = [](double t) {
    if (t <= 0.0) return 0.0;
    const double e = std::exp(-0.5 / (t * t));
    if (e == 0.0) return 0.0;
    return kSqrt2OverPi * e / (t * t * t);
  };
  return OrliczFunction(std::move(value), std::move(derivative), std::move(second), GaussianKind{});
}

double gaussian_m_by_quadrature(double s, const QuadratureSpec& spec) {
  if (s <= 0.0) return 0.0;
  return integrate([](double t) { return t <= 0.0 ? 0.0 : kSqrt2OverPi * std::exp(-0.5 / (t * t)); }, 0.0, s,
                   spec);
}

OrliczFunction make_piecewise_linear(PiecewiseLinear pwl) {
  const bool degenerate = pwl.segment_slope(0) == 0.0;
  auto shared = std::make_shared<const PiecewiseLinear>(pwl);
  RealFn value = [shared](double t) { return (*shared)(t); };
  RealFn derivative = [shared](double t) { return shared->right_slope(t); };
  return OrliczFunction(std::move(value), std::move(derivative), RealFn{}, PiecewiseKind{std::move(pwl)},
                        degenerate);
}

OrliczFunction make_piecewise_linear(std::vector<Knot> knots, double final_slope) {
  return make_piecewise_linear(PiecewiseLinear(std::move(knots), final_slope));
}

namespace {

struct ConjugatePoint {
  double value;
  double argmax;  // leftmost maximiser; +inf when unbounded
};

ConjugatePoint conjugate_point(const OrliczFunction& m, double x) {
  if (std::isnan(x) || x < 0.0) throw Error(ErrorCode::InvalidParameter, "conjugate needs x >= 0");
  if (x <= m.derivative(0.0)) return {0.0, 0.0};
  double hi = 1.0;
  while (m.derivative(hi) < x) {
    hi *= 2.0;
    if (hi > kGrowthCap) return {kInf, kInf};
  }
  const Bracket b = bisect_predicate([&](double t) { return m.derivative(t) >= x; }, 0.0, hi,
                                     std::numeric_limits<double>::min(), 1e-15);
  auto objective = [&](double t) { return x * t - m(t); };
  double best = 0.0;
  for (double t : {b.lo, b.hi}) {
    const double v = objective(t);
    if (std::isfinite(v)) best = std::max(best, v);
  }
  return {best, b.hi};
}

}  // namespace

double conjugate(const OrliczFunction& m, double x) {
  if (auto pwl = m.as_piecewise()) {
    if (std::isnan(x) || x < 0.0) throw Error(ErrorCode::InvalidParameter, "conjugate needs x >= 0");
    return pwl->conjugate()(x);
  }
  return conjugate_point(m, x).value;
}

OrliczFunction conjugate_function(const OrliczFunction& m) {
  if (auto pwl = m.as_piecewise()) return make_piecewise_linear(pwl->conjugate());
  RealFn value = [m](double x) { return conjugate_point(m, x).value; };
  RealFn derivative = [m](double x) { return conjugate_point(m, x).argmax; };
  RealFn second;
  if (m.has_second_derivative()) {
    second = [m](double x) {
      const double t = conjugate_point(m, x).argmax;
      if (!std::isfinite(t)) return kInf;
      const double curvature = m.second_derivative(t);
      return curvature > 0.0 ? 1.0 / curvature : kInf;
    };
  }
  return OrliczFunction(std::move(value), std::move(derivative), std::move(second),
                        CustomKind{"conjugate(" + m.describe() + ")"}, true);
}

double inverse(const OrliczFunction& m, double y, double hi_hint) {
  if (std::isnan(y) || y < 0.0) throw Error(ErrorCode::InvalidParameter, "inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  if (auto pwl = m.as_piecewise()) return pwl->inverse(y);
  double hi = hi_hint > 0.0 ? hi_hint : 1.0;
  while (m(hi) < y) {
    hi *= 2.0;
    if (hi > kGrowthCap) {
      throw Error(ErrorCode::OutOfRange, "level " + format_number(y) + " exceeds the range of " + m.describe());
    }
  }
  const Bracket b = bisect_predicate([&](double t) { return m(t) >= y; }, 0.0, hi,
                                     std::numeric_limits<double>::min(), 1e-15);
  if (!std::isfinite(m(b.hi))) {
    throw Error(ErrorCode::OutOfRange, "level " + format_number(y) + " is skipped by a jump to +inf");
  }
  return b.hi;
}

OrliczFunction truncate_linear(const OrliczFunction& m) {
  double T = 0.0;
  double value_at_T = 0.0;
  double slope_at_T = 0.0;
  const auto pwl = m.as_piecewise();
  if (pwl && pwl->has_infinite_final_slope() && (*pwl)(pwl->knots().back().t) < 1.0) {
    // M jumps to infinity below level 1: cut at the last knot, drop the jump
    const std::size_t last = pwl->knots().size() - 1;
    if (last == 0) throw Error(ErrorCode::DegenerateFunction, m.describe() + " is infinite right after 0");
    T = pwl->knots().back().t;
    value_at_T = pwl->knots().back().value;
    slope_at_T = pwl->segment_slope(last - 1);
  } else {
    T = inverse(m, 1.0);
    value_at_T = m(T);
    slope_at_T = m.derivative(T);
  }
  auto inner = std::make_shared<const OrliczFunction>(m);
  RealFn value = [inner, T, value_at_T, slope_at_T](double t) {
    return t <= T ? (*inner)(t) : value_at_T + slope_at_T * (t - T);
  };
  RealFn derivative = [inner, T, slope_at_T](double t) { return t < T ? inner->derivative(t) : slope_at_T; };
  RealFn second;
  if (m.has_second_derivative()) {
    second = [inner, T](double t) { return t <= T ? inner->second_derivative(t) : 0.0; };
  }
  return OrliczFunction(std::move(value), std::move(derivative), std::move(second),
                        TruncatedKind{inner, T, value_at_T, slope_at_T}, m.degenerate_allowed());
}

double orlicz_norm(const OrliczFunction& m, const Vector& x) {
  if (x.is_zero()) return 0.0;
  const double largest = x.max_abs();
  auto level = [&](double t) {
    double sum = 0.0;
    for (double v : x.entries()) {
      if (v != 0.0) sum += m(std::abs(v) / t);
    }
    return sum;
  };

  double lo = largest;
  try {
    lo = largest / inverse(m, 1.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutOfRange) throw;
  }
  for (int i = 0; !(level(lo) > 1.0); ++i) {
    if (i > 2000) throw Error(ErrorCode::DegenerateFunction, m.describe() + " never exceeds 1");
    lo *= 0.5;
  }
  double hi = static_cast<double>(x.size()) * largest;
  for (int i = 0; level(hi) > 1.0; ++i) {
    if (i > 2000) throw Error(ErrorCode::NonConvergent, "norm bracket did not close");
    hi *= 2.0;
  }
  const Bracket b = bisect_predicate([&](double t) { return level(t) <= 1.0; }, lo, hi,
                                     std::numeric_limits<double>::min(), 1e-15);
  return b.hi;
}

double choquet_eval(const OrliczFunction& m, double x) {
  if (std::isnan(x) || x < 0.0) throw Error(ErrorCode::InvalidParameter, "choquet_eval needs x >= 0");
  if (x == 0.0) return 0.0;
  if (auto pwl = m.as_piecewise()) {
    double sum = x * pwl->segment_slope(0);
    for (const SlopeJump& j : pwl->slope_jumps()) {
      if (j.location < x) sum += (x - j.location) * j.jump;
    }
    return sum;
  }

  RealFn curvature;
  if (m.has_second_derivative()) {
    curvature = [&m](double y) { return m.second_derivative(y); };
  } else if (m.has_analytic_derivative()) {
    curvature = [&m](double y) { return central_difference([&m](double s) { return m.derivative(s); }, y, 1); };
  } else {
    curvature = [&m](double y) { return central_difference([&m](double s) { return m(s); }, y, 2); };
  }

  double upper = x;
  if (const auto* tr = std::get_if<TruncatedKind>(&m.kind())) upper = std::min(x, tr->T);
  double integral = 0.0;
  try {
    integral = integrate([&](double y) { return (x - y) * curvature(y); }, 0.0, upper);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidParameter && !m.has_second_derivative()) {
      throw Error(ErrorCode::MissingSecondDerivative,
                  "finite-difference curvature of " + m.describe() + " is not usable: " + e.what());
    }
    throw;
  }
  return x * m.derivative(0.0) + integral;
}

}  // namespace orlicz
