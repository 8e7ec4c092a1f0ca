#include "orlicz/forward_map.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace orlicz {

namespace {

void check_s(double s) {
  if (std::isnan(s) || s < 0.0) throw Error(ErrorCode::InvalidParameter, "forward map needs s >= 0");
}

void check_mean(const TailDistribution& tail) {
  if (!tail.is_atomic()) (void)tail.integrated_tail(0.0);
}

}  // namespace

double forward_from_tail(const TailDistribution& tail, double s) {
  check_s(s);
  check_mean(tail);
  if (s == 0.0) return 0.0;
  if (std::isinf(s)) return kInf;
  return s * tail.integrated_tail(1.0 / s);
}

double forward_derivative(const TailDistribution& tail, double s) {
  check_s(s);
  if (s == 0.0) return 0.0;
  const double z = 1.0 / s;
  return tail.integrated_tail(z) + z * tail.tail(z);
}

Estimate forward_from_sample_estimate(std::span<const double> samples, double s) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "forward map of an empty sample");
  check_s(s);
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : samples) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidParameter, "samples must be >= 0");
    const double c = std::max(s * v - 1.0, 0.0);
    ++k;
    const double delta = c - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (c - mean);
  }
  Estimate e;
  e.value = mean;
  if (k > 1) e.standard_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
  return e;
}

double forward_from_sample(std::span<const double> samples, double s) {
  return forward_from_sample_estimate(samples, s).value;
}

ForwardResult forward_map(const TailDistribution& tail, std::span<const double> grid) {
  check_mean(tail);
  auto law = std::make_shared<const TailDistribution>(tail);
  std::vector<std::pair<double, double>> values;
  values.reserve(grid.size());
  for (double s : grid) values.emplace_back(s, forward_from_tail(*law, s));

  RealFn value = [law](double s) { return s <= 0.0 ? 0.0 : forward_from_tail(*law, s); };
  RealFn derivative = [law](double s) { return s <= 0.0 ? 0.0 : forward_derivative(*law, s); };
  RealFn second;
  if (law->has_density()) {
    second = [law](double s) {
      if (s <= 0.0) return 0.0;
      const double z = 1.0 / s;
      return z * z * z * law->density(z).value_or(0.0);
    };
  }
  OrliczFunction fn(std::move(value), std::move(derivative), std::move(second),
                    CustomKind{"forward(" + law->description() + ")"}, true);
  return {std::move(values), std::move(fn)};
}

std::vector<double> default_grid(double T, std::size_t count) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidParameter, "grid end must be positive");
  if (count < 2) throw Error(ErrorCode::InvalidParameter, "grid needs at least two points");
  std::vector<double> grid(count);
  const double lo = std::log(1e-3 * T);
  const double hi = std::log(T);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  grid.back() = T;
  return grid;
}

std::vector<double> default_grid(const OrliczFunction& m) { return default_grid(inverse(m, 1.0)); }

double roundtrip_residual(const OrliczFunction& m, std::span<const double> grid) {
  const InversionResult inv = invert(m);
  const double mass = inv.diagnostics.mass_of_Q;
  double worst = 0.0;
  for (double s : grid) {
    const double target = inv.inverted(s);
    const double got = forward_from_tail(inv.distribution, s) * mass;
    worst = std::max(worst, std::abs(got - target) / std::max(target, 1e-12));
  }
  return worst;
}

}  // namespace orlicz
