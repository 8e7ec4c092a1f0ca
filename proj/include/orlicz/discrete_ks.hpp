#pragma once

// Discrete sequences a_1 >= ... >= a_n > 0 whose permutation averages
// (1/n!) sum_pi max_i |x_i a_pi(i)| are equivalent to an Orlicz norm.

#include <optional>
#include <string>
#include <vector>

#include "orlicz/numerics.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

struct KSSequence {
  std::vector<double> a;
  std::optional<std::string> source_m;

  std::size_t n() const noexcept { return a.size(); }
  /// Throws InvalidParameter unless a is nonempty, positive and nonincreasing.
  void validate() const;
};

/// a_i = n (M*^{-1}(i/n) - M*^{-1}((i-1)/n)).
KSSequence ks_sequence(const OrliczFunction& m, std::size_t n);

inline constexpr std::size_t kMaxExactPermutationSize = 10;

/// Average over all n! permutations; n <= 10.
double permutation_average_exact(const Vector& x, const KSSequence& a);

/// Average over k uniformly random permutations drawn from `stream`.
Estimate permutation_average_sampled(const Vector& x, const KSSequence& a, std::size_t k, RandomStream& stream);

/// The piecewise-linear M* with M*(a_1 + ... + a_k) = k/n, continued with
/// its last slope.
PiecewiseLinear conjugate_from_sequence(const KSSequence& a);

/// M = (M*)* for the M* above, conjugated knot by knot.
OrliczFunction m_from_sequence(const KSSequence& a);

}  // namespace orlicz
