#include "orlicz/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orlicz {

InverseTransformSampler::InverseTransformSampler(const TailDistribution& dist, std::size_t cells,
                                                 double cell_tolerance)
    : dist_(dist) {
  if (cells < 1) throw Error(ErrorCode::InvalidParameter, "sampler needs at least one cell");
  if (dist_.is_atomic()) {
    double sum = 0.0;
    for (const Atom& a : dist_.atoms()) {
      sum += a.probability;
      cumulative_.push_back(sum);
    }
    cumulative_.back() = 1.0;
    return;
  }

  step_ = w_max_ / static_cast<double>(cells);
  x_.resize(cells + 1);
  slope_.assign(cells + 1, std::numeric_limits<double>::quiet_NaN());
  exact_.assign(cells, 0);
  auto node = [&](double w) { return w == 0.0 ? dist_.support_min() : dist_.tail_inverse(std::exp(-w)); };
  for (std::size_t k = 0; k <= cells; ++k) {
    const double w = step_ * static_cast<double>(k);
    x_[k] = node(w);
    if (auto f = dist_.density(x_[k]); f && *f > 0.0) {
      slope_[k] = std::exp(-w) / *f;  // dx/dw = tail / density
    }
  }
  for (std::size_t k = 0; k < cells; ++k) {
    if (!std::isfinite(slope_[k]) || !std::isfinite(slope_[k + 1])) {
      exact_[k] = 1;
      continue;
    }
    const double w = step_ * (static_cast<double>(k) + 0.5);
    const double exact = node(w);
    const double approx = interpolate(k, w);
    if (std::abs(approx - exact) > cell_tolerance * std::max(std::abs(exact), std::numeric_limits<double>::min())) {
      exact_[k] = 1;
    }
  }
}

std::size_t InverseTransformSampler::exact_cells() const noexcept {
  return static_cast<std::size_t>(std::count(exact_.begin(), exact_.end(), 1));
}

double InverseTransformSampler::exact_in_cell(std::size_t cell, double w) const {
  const double level = std::exp(-w);
  auto reached = [&](double x) { return dist_.tail(x) <= level; };
  const double lo = x_[cell];
  if (reached(lo)) return lo;
  const double hi = x_[cell + 1];
  if (!reached(hi)) return dist_.tail_inverse(level);
  return bisect_predicate(reached, lo, hi, std::numeric_limits<double>::min(), 1e-15).hi;
}

double InverseTransformSampler::interpolate(std::size_t cell, double w) const {
  const double t = w / step_ - static_cast<double>(cell);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * x_[cell] + h10 * step_ * slope_[cell] + h01 * x_[cell + 1] + h11 * step_ * slope_[cell + 1];
}

double InverseTransformSampler::quantile(double u) const {
  if (std::isnan(u) || u <= 0.0 || u >= 1.0) throw Error(ErrorCode::InvalidParameter, "quantile needs u in (0, 1)");
  if (!cumulative_.empty()) {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                                cumulative_.size() - 1);
    return dist_.atoms()[i].location;
  }
  const double w = -std::log1p(-u);
  if (!(w < w_max_)) return dist_.tail_inverse(1.0 - u);
  const std::size_t cell = std::min(static_cast<std::size_t>(w / step_), exact_.size() - 1);
  if (exact_[cell]) {
    return exact_in_cell(cell, w);
  }
  return interpolate(cell, w);
}

std::vector<double> InverseTransformSampler::draw(RandomStream& stream, std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw(stream));
  return out;
}

}  // namespace orlicz
