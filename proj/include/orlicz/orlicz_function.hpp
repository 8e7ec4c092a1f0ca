#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/numerics.hpp"
#include "orlicz/piecewise_linear.hpp"

namespace orlicz {

class OrliczFunction;

struct PowerKind {
  double p;
};
struct GaussianKind {};
struct PiecewiseKind {
  PiecewiseLinear pwl;
};
/// M on [0, T] continued by its tangent line at T.
struct TruncatedKind {
  std::shared_ptr<const OrliczFunction> inner;
  double T;
  double value_at_T;
  double slope_at_T;
};
struct CustomKind {
  std::string label;
};

using FunctionKind = std::variant<PowerKind, GaussianKind, PiecewiseKind, TruncatedKind, CustomKind>;

/// Convex nondecreasing M on [0, inf) with M(0) = 0. Immutable; copies
/// share state and are safe to use from several threads.
class OrliczFunction {
 public:
  OrliczFunction(RealFn value, RealFn derivative, RealFn second_derivative, FunctionKind kind,
                 bool degenerate_allowed = false);

  double operator()(double t) const { return value_(t); }
  /// Right-hand derivative M'. Falls back to finite differences when no
  /// analytic form was supplied.
  double derivative(double t) const;
  bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }
  bool has_second_derivative() const noexcept { return static_cast<bool>(second_derivative_); }
  /// M''; throws MissingSecondDerivative when absent.
  double second_derivative(double t) const;

  const FunctionKind& kind() const noexcept { return kind_; }
  bool degenerate_allowed() const noexcept { return degenerate_allowed_; }

  /// Piecewise-linear view when dM' is purely atomic (piecewise-linear
  /// kinds, possibly truncated); empty otherwise.
  std::optional<PiecewiseLinear> as_piecewise() const;

  std::string describe() const;

 private:
  RealFn value_;
  RealFn derivative_;
  RealFn second_derivative_;
  FunctionKind kind_;
  bool degenerate_allowed_;
};

/// Finite scalar sequence x = (x_1, ..., x_n), n >= 1.
class Vector {
 public:
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }
  double max_abs() const;
  bool is_zero() const;

 private:
  std::vector<double> entries_;
};

OrliczFunction make_power(double p);
/// M(s) = sqrt(2/pi) * integral_0^s exp(-1/(2t^2)) dt.
OrliczFunction make_gaussian_m();
OrliczFunction make_piecewise_linear(std::vector<Knot> knots, double final_slope);
OrliczFunction make_piecewise_linear(PiecewiseLinear pwl);

/// Value of the Gaussian Orlicz function by direct quadrature of its
/// defining integral. Slow; used to cross-check the closed form.
double gaussian_m_by_quadrature(double s, const QuadratureSpec& spec = {});

/// M*(x) = sup_{t >= 0} (x t - M(t)); returns +inf when unbounded.
double conjugate(const OrliczFunction& m, double x);
/// M* as an Orlicz function. Piecewise-linear kinds conjugate exactly.
OrliczFunction conjugate_function(const OrliczFunction& m);

/// Leftmost t with M(t) = y; the search bracket grows by doubling from hi_hint.
double inverse(const OrliczFunction& m, double y, double hi_hint = 1.0);

/// M on [0, T] with M(T) = 1, continued linearly with slope M'(T).
OrliczFunction truncate_linear(const OrliczFunction& m);

/// Luxemburg norm inf{t > 0 : sum_i M(|x_i| / t) <= 1}; 0 for the zero vector.
double orlicz_norm(const OrliczFunction& m, const Vector& x);

/// integral over [0, inf) of (x - y)^+ dM'(y), evaluated from M'' (plus the
/// x M'(0) atom) or from the slope jumps of atomic kinds.
double choquet_eval(const OrliczFunction& m, double x);

}  // namespace orlicz
