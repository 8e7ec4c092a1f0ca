#pragma once

// Shared numerical kernels: adaptive Simpson quadrature (with improper upper
// limits and integrable endpoint singularities), monotone bisection, finite
// differences and a reproducible random stream.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>

#include "orlicz/errors.hpp"

namespace orlicz {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 60;
  /// An improper integral stops doubling its cutoff once the last panel
  /// contributes less than this.
  double infinity_cutoff_tol = 1e-12;
  /// Also stop once the last panel is below this fraction of the running sum.
  double infinity_cutoff_rel_tol = 0.0;
  /// Cap on cutoff doublings (and on halvings toward a singular endpoint).
  int max_doublings = 400;

  void validate() const;
};

/// Tolerances for integrals whose value may sit many orders of magnitude
/// below one (tails, truncated forward maps). Accuracy is relative.
QuadratureSpec relative_quadrature();

/// Integrates f over [lo, hi]; hi may be +inf. `breakpoints` lists interior
/// points where f or its derivative jumps; panels are split there. A
/// non-finite value of f at lo is treated as an integrable singularity and
/// handled by geometric panels shrinking toward lo.
double integrate(const RealFn& f, double lo, double hi, const QuadratureSpec& spec = {},
                 std::span<const double> breakpoints = {});

/// Monte Carlo mean with its standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct Bracket {
  double lo;
  double hi;
};

/// Shrinks [lo, hi] around the point where `reached` switches from false to
/// true. `reached` must be monotone (false then true) with !reached(lo) and
/// reached(hi). Stops when hi - lo <= max(abs_tol, rel_tol * |hi|) or when
/// the interval can no longer be halved in floating point.
Bracket bisect_predicate(const std::function<bool(double)>& reached, double lo, double hi,
                         double abs_tol, double rel_tol = 0.0);

/// Solves g(t) = target for nondecreasing g on [lo, hi]. Returns lo when
/// g(lo) already reaches the target (leftmost preimage), otherwise the
/// midpoint of the final bracket.
double bisect_monotone(const RealFn& g, double target, double lo, double hi, double tol = 1e-12);

/// Same search, returning the final bracket with g(lo) < target <= g(hi).
/// A bracket with lo == hi means g(lo) already reached the target.
Bracket bisect_monotone_bracket(const RealFn& g, double target, double lo, double hi,
                                double tol = 1e-12);

/// First (order 1) or second (order 2) derivative by central differences,
/// switching to forward stencils when the central stencil would cross zero.
double central_difference(const RealFn& f, double t, int order);

/// Deterministic stream of pseudo-random numbers keyed by (seed, stream_id).
/// Each worker owns its own stream; streams are never shared.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  RandomStream(const RandomStream&) = delete;
  RandomStream& operator=(const RandomStream&) = delete;
  RandomStream(RandomStream&&) = default;
  RandomStream& operator=(RandomStream&&) = default;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1) with 52-bit resolution.
  double uniform_open();
  /// Uniform integer in [0, bound); bound > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace orlicz
