#pragma once

// From a law on [0, inf) back to the Orlicz function it generates:
// M(s) = integral_0^s integral_{1/t <= X} X dP dt.

#include <span>
#include <utility>
#include <vector>

#include "orlicz/inversion.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

struct ForwardResult {
  std::vector<std::pair<double, double>> m_values;
  OrliczFunction as_function;
};

/// M(s) for the law `tail`. The double integral is evaluated through its
/// antiderivative s * E (X - 1/s)^+. Throws InfiniteMean when E X diverges.
double forward_from_tail(const TailDistribution& tail, double s);

/// M'(s) = E[X; X >= 1/s].
double forward_derivative(const TailDistribution& tail, double s);

/// (1/N) sum_j v_j (s - 1/v_j)^+ over the sample.
double forward_from_sample(std::span<const double> samples, double s);
/// Same average with its standard error.
Estimate forward_from_sample_estimate(std::span<const double> samples, double s);

/// Tabulates M on `grid` and wraps the construction as an OrliczFunction.
ForwardResult forward_map(const TailDistribution& tail, std::span<const double> grid);

/// `count` log-spaced points from 1e-3 T to T.
std::vector<double> default_grid(double T, std::size_t count = 64);
/// Default grid for M: T is the point where M reaches 1.
std::vector<double> default_grid(const OrliczFunction& m);

/// Largest relative gap between mass_of_Q * forward(invert(M)) and the
/// inverted (possibly truncated) M over the grid.
double roundtrip_residual(const OrliczFunction& m, std::span<const double> grid);

}  // namespace orlicz
