#pragma once

// From an Orlicz function M to the law Q / Q([0, inf)) with
// Q = integral of y * delta_{1/y} dM'(y): its mass, tail, density, atoms,
// quantiles and samples.

#include <optional>
#include <string>
#include <vector>

#include "orlicz/numerics.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

struct Atom {
  double location;
  double probability;
};

enum class SourceKind { Inverted, Analytic, Empirical };

std::string_view to_string(SourceKind kind);

/// Probability law on [0, inf) described by its tail P(X >= x). Either
/// continuous (tail function, optional density) or purely atomic.
class TailDistribution {
 public:
  struct Parts {
    RealFn tail;  // unused for atomic laws
    double support_min = 0.0;
    double mass_of_Q = 1.0;
    RealFn density;
    std::vector<Atom> atoms;
    SourceKind source = SourceKind::Analytic;
    std::string description;
  };

  explicit TailDistribution(Parts parts);

  /// P(X >= x).
  double tail(double x) const;
  double cdf(double x) const { return 1.0 - tail(x); }
  bool has_density() const noexcept { return static_cast<bool>(density_); }
  /// Density of the continuous part; nullopt when none is known.
  std::optional<double> density(double x) const;

  bool is_atomic() const noexcept { return !atoms_.empty(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double support_min() const noexcept { return support_min_; }
  double mass_of_Q() const noexcept { return mass_of_Q_; }
  SourceKind source() const noexcept { return source_; }
  const std::string& description() const noexcept { return description_; }

  /// Smallest x with P(X >= x) <= level, for level in [0, 1).
  double tail_inverse(double level) const;
  /// integral_z^inf P(X >= u) du, i.e. E (X - z)^+.
  double integrated_tail(double z, const QuadratureSpec& spec = relative_quadrature()) const;

 private:
  RealFn tail_;
  double support_min_;
  double mass_of_Q_;
  RealFn density_;
  std::vector<Atom> atoms_;          // sorted by location
  std::vector<double> upper_mass_;   // upper_mass_[i] = sum of probabilities of atoms i..end
  SourceKind source_;
  std::string description_;
};

/// Pareto law P(X >= x) = x^{-p} on x >= 1.
TailDistribution make_pareto_tail(double p);
/// Law of |Z| for standard normal Z.
TailDistribution make_half_normal_tail();
/// Law putting the given probabilities on the given points.
TailDistribution make_atomic(std::vector<Atom> atoms, std::string description,
                             SourceKind source = SourceKind::Analytic);
/// Empirical law of a sample.
TailDistribution make_empirical(std::span<const double> samples);

struct InversionDiagnostics {
  bool truncation_applied = false;
  std::optional<double> truncation_point_T;
  double mass_of_Q = 0.0;
  double m_prime_at_zero = 0.0;
};

struct InversionResult {
  TailDistribution distribution;
  InversionDiagnostics diagnostics;
  /// The function actually inverted (M itself, or its linear truncation).
  OrliczFunction inverted;
};

/// Q([0, inf)) = integral y dM'(y). Throws DivergentMass when infinite and
/// NonzeroDerivativeAtZero when M'(0) > 0.
double q_mass(const OrliczFunction& m);

/// integral_0^{1/x} y dM'(y) = (1/x) M'(1/x) - M(1/x), or the sum of
/// knot * jump over knots <= 1/x for atomic kinds.
double unnormalized_tail(const OrliczFunction& m, double x);

InversionResult invert(const OrliczFunction& m, bool auto_truncate = true);

/// Generalized (left-continuous) inverse of the distribution function for
/// u in (0, 1): the smallest x with P(X >= x) <= 1 - u. Atoms are returned
/// exactly on their u-interval.
double quantile(const TailDistribution& dist, double u);

/// `count` independent draws by inverse transform of uniforms from `stream`.
std::vector<double> sample(const TailDistribution& dist, RandomStream& stream, std::size_t count);

}  // namespace orlicz
