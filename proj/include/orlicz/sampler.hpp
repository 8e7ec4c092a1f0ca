#pragma once

// Table-driven inverse-transform sampler for TailDistribution.

#include <cstddef>
#include <vector>

#include "orlicz/inversion.hpp"
#include "orlicz/numerics.hpp"

namespace orlicz {

/// Precomputes the quantile on a grid in w = -log(1 - u) and interpolates
/// with cubic Hermite polynomials. Cells whose midpoint disagrees with the
/// exact quantile by more than `cell_tolerance` (relative) are resolved by
/// bisection on the tail instead. Atomic laws use a cumulative table.
class InverseTransformSampler {
 public:
  explicit InverseTransformSampler(const TailDistribution& dist, std::size_t cells = 8192,
                                   double cell_tolerance = 1e-10);

  double quantile(double u) const;
  double draw(RandomStream& stream) const { return quantile(stream.uniform_open()); }
  std::vector<double> draw(RandomStream& stream, std::size_t count) const;

  const TailDistribution& distribution() const noexcept { return dist_; }
  std::size_t exact_cells() const noexcept;

 private:
  double exact_in_cell(std::size_t cell, double w) const;
  double interpolate(std::size_t cell, double w) const;

  TailDistribution dist_;
  double w_max_ = 38.0;
  double step_ = 0.0;
  std::vector<double> x_;
  std::vector<double> slope_;  // dx/dw at the nodes
  std::vector<char> exact_;    // per cell
  std::vector<double> cumulative_;
};

}  // namespace orlicz
