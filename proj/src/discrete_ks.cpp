#include "orlicz/discrete_ks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace orlicz {

namespace {

void check_dimensions(const Vector& x, const KSSequence& a) {
  a.validate();
  if (x.size() != a.n()) {
    throw Error(ErrorCode::DimensionMismatch, "vector has " + std::to_string(x.size()) + " entries, sequence " +
                                                  std::to_string(a.n()));
  }
}

}  // namespace

void KSSequence::validate() const {
  if (a.empty()) throw Error(ErrorCode::InvalidParameter, "empty sequence");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i])) throw Error(ErrorCode::InvalidParameter, "sequence must be positive");
    if (i > 0 && a[i] > a[i - 1]) throw Error(ErrorCode::InvalidParameter, "sequence must be nonincreasing");
  }
}

KSSequence ks_sequence(const OrliczFunction& m, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  const OrliczFunction conj = conjugate_function(m);
  std::vector<double> levels(n + 1, 0.0);
  try {
    for (std::size_t i = 1; i <= n; ++i) {
      levels[i] = inverse(conj, static_cast<double>(i) / static_cast<double>(n));
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::ConjugateNotInvertible, "M* of " + m.describe() + " cannot be inverted: " + e.what());
  }
  KSSequence out;
  out.source_m = m.describe();
  out.a.resize(n);
  const double scale = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.a[i] = scale * (levels[i + 1] - levels[i]);
    if (!(out.a[i] > 0.0) || !std::isfinite(out.a[i])) {
      throw Error(ErrorCode::ConjugateNotInvertible, "M* of " + m.describe() + " is not strictly increasing on [0, 1]");
    }
  }
  for (std::size_t i = 1; i < n; ++i) out.a[i] = std::min(out.a[i], out.a[i - 1]);
  return out;
}

double permutation_average_exact(const Vector& x, const KSSequence& a) {
  check_dimensions(x, a);
  const std::size_t n = a.n();
  if (n > kMaxExactPermutationSize) {
    throw Error(ErrorCode::TooLarge, "exact enumeration is limited to n <= 10");
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = std::abs(x[i]);
  std::sort(weights.begin(), weights.end());

  std::vector<std::size_t> pi(n);
  std::iota(pi.begin(), pi.end(), 0);
  double sum = 0.0;
  double count = 0.0;
  do {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, weights[i] * a.a[pi[i]]);
    sum += best;
    count += 1.0;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return sum / count;
}

Estimate permutation_average_sampled(const Vector& x, const KSSequence& a, std::size_t k, RandomStream& stream) {
  check_dimensions(x, a);
  if (k < 2) throw Error(ErrorCode::InvalidParameter, "sampling needs at least two permutations");
  const std::size_t n = a.n();
  std::vector<std::size_t> pi(n);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 1; t <= k; ++t) {
    std::iota(pi.begin(), pi.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(pi[i], pi[stream.below(i + 1)]);
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(x[i]) * a.a[pi[i]]);
    const double delta = best - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta * (best - mean);
  }
  const double kk = static_cast<double>(k);
  return {mean, std::sqrt(m2 / (kk - 1.0) / kk)};
}

PiecewiseLinear conjugate_from_sequence(const KSSequence& a) {
  a.validate();
  const std::size_t n = a.n();
  const double scale = static_cast<double>(n);
  std::vector<Knot> knots{{0.0, 0.0}};
  double partial = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    partial += a.a[k - 1];
    // the sequence carries a factor n, so the abscissae are partial sums over n
    knots.push_back({partial / scale, static_cast<double>(k) / scale});
  }
  const double last_slope = 1.0 / a.a[n - 1];
  return PiecewiseLinear(std::move(knots), last_slope);
}

OrliczFunction m_from_sequence(const KSSequence& a) {
  return make_piecewise_linear(conjugate_from_sequence(a).conjugate());
}

}  // namespace orlicz
