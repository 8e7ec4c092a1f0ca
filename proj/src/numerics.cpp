#include "orlicz/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace orlicz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::NotBracketed: return "NotBracketed";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingSecondDerivative: return "MissingSecondDerivative";
    case ErrorCode::DivergentMass: return "DivergentMass";
    case ErrorCode::NonzeroDerivativeAtZero: return "NonzeroDerivativeAtZero";
    case ErrorCode::DegenerateFunction: return "DegenerateFunction";
    case ErrorCode::InfiniteMean: return "InfiniteMean";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ConjugateNotInvertible: return "ConjugateNotInvertible";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth < 1 || max_doublings < 1 ||
      infinity_cutoff_tol < 0.0 || infinity_cutoff_rel_tol < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "quadrature spec needs abs_tol > 0, rel_tol > 0, max_depth >= 1");
  }
}

QuadratureSpec relative_quadrature() {
  QuadratureSpec spec;
  spec.abs_tol = std::numeric_limits<double>::min();
  spec.rel_tol = 1e-11;
  spec.infinity_cutoff_tol = std::numeric_limits<double>::min();
  spec.infinity_cutoff_rel_tol = 1e-13;
  return spec;
}

namespace {

class Simpson {
 public:
  Simpson(const RealFn& f, const QuadratureSpec& spec) : f_(f), spec_(spec) {}

  double eval(double x) const {
    const double v = f_(x);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter,
                  "integrand is not finite at interior point " + std::to_string(x));
    }
    return v;
  }

  // [a, b] with finite integrand on the closed interval.
  double regular(double a, double b, double eps) const {
    if (a == b) return 0.0;
    constexpr int kStartPanels = 4;
    const double width = (b - a) / kStartPanels;
    double total = 0.0;
    double left = a;
    double f_left = eval(a);
    for (int i = 0; i < kStartPanels; ++i) {
      const double right = (i + 1 == kStartPanels) ? b : a + width * (i + 1);
      const double f_right = eval(right);
      const double mid = 0.5 * (left + right);
      const double f_mid = eval(mid);
      const double whole = (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
      total += refine(left, right, f_left, f_mid, f_right, whole, eps / kStartPanels, 0);
      left = right;
      f_left = f_right;
    }
    return total;
  }

  // [a, b] where f(a) is not finite: geometric panels [a + d/2^(k+1), a + d/2^k].
  double singular_at_lo(double a, double b, double eps) const {
    double sum = 0.0;
    double hi = b;
    for (int k = 0; k < spec_.max_doublings * 4; ++k) {
      const double lo = a + 0.5 * (hi - a);
      if (lo <= a || lo >= hi) return sum;
      const double panel = regular(lo, hi, eps / 2.0);
      sum += panel;
      if (std::abs(panel) < spec_.infinity_cutoff_tol ||
          std::abs(panel) <= spec_.infinity_cutoff_rel_tol * std::abs(sum)) {
        return sum;
      }
      hi = lo;
    }
    throw Error(ErrorCode::NonConvergent, "endpoint singularity does not decay");
  }

 private:
  double refine(double a, double b, double fa, double fm, double fb, double whole, double eps,
                int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if (!(lm > a && lm < m && rm > m && rm < b)) return whole;
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    const double delta = both - whole;
    const double tol = std::max(eps, spec_.rel_tol * std::abs(both));
    if (std::abs(delta) <= 15.0 * tol) return both + delta / 15.0;
    if (depth + 1 >= spec_.max_depth) {
      throw Error(ErrorCode::NonConvergent, "adaptive Simpson exceeded max_depth near " + std::to_string(m));
    }
    return refine(a, m, fa, flm, fm, left, eps / 2.0, depth + 1) +
           refine(m, b, fm, frm, fb, right, eps / 2.0, depth + 1);
  }

  const RealFn& f_;
  const QuadratureSpec& spec_;
};

double finite_interval(const Simpson& simpson, const RealFn& f, double lo, double hi, double eps,
                       const std::vector<double>& cuts) {
  // cuts are sorted and strictly inside (lo, hi)
  double total = 0.0;
  double a = lo;
  const double width = hi - lo;
  auto panel = [&](double x, double y) {
    const double share = eps * (y - x) / width;
    if (x == lo && !std::isfinite(f(x))) return simpson.singular_at_lo(x, y, share);
    return simpson.regular(x, y, share);
  };
  for (double c : cuts) {
    total += panel(a, c);
    a = c;
  }
  total += panel(a, hi);
  return total;
}

std::vector<double> cuts_within(std::span<const double> breakpoints, double lo, double hi) {
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

double integrate(const RealFn& f, double lo, double hi, const QuadratureSpec& spec,
                 std::span<const double> breakpoints) {
  spec.validate();
  if (std::isnan(lo) || std::isnan(hi) || !std::isfinite(lo) || lo > hi) {
    throw Error(ErrorCode::InvalidInterval, "integration interval must satisfy lo <= hi with finite lo");
  }
  if (lo == hi) return 0.0;
  const Simpson simpson(f, spec);

  if (std::isfinite(hi)) {
    return finite_interval(simpson, f, lo, hi, spec.abs_tol, cuts_within(breakpoints, lo, hi));
  }

  double cutoff = std::max(1.0, lo + 1.0);
  double sum = finite_interval(simpson, f, lo, cutoff, spec.abs_tol, cuts_within(breakpoints, lo, cutoff));
  for (int k = 0; k < spec.max_doublings; ++k) {
    const double next_cutoff = 2.0 * cutoff;
    const double panel = finite_interval(simpson, f, cutoff, next_cutoff, spec.abs_tol,
                                         cuts_within(breakpoints, cutoff, next_cutoff));
    sum += panel;
    if (std::abs(panel) < spec.infinity_cutoff_tol ||
        std::abs(panel) <= spec.infinity_cutoff_rel_tol * std::abs(sum)) {
      return sum;
    }
    cutoff = next_cutoff;
  }
  throw Error(ErrorCode::NonConvergent, "improper integral did not settle within the doubling cap");
}

Bracket bisect_predicate(const std::function<bool(double)>& reached, double lo, double hi,
                         double abs_tol, double rel_tol) {
  while (hi - lo > std::max(abs_tol, rel_tol * std::abs(hi))) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi};
}

Bracket bisect_monotone_bracket(const RealFn& g, double target, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "bisection tolerance must be positive");
  if (lo > hi) throw Error(ErrorCode::InvalidInterval, "bisection needs lo <= hi");
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (!(g_lo <= target && target <= g_hi)) {
    throw Error(ErrorCode::NotBracketed, "target " + std::to_string(target) + " outside [g(lo), g(hi)] = [" +
                                             std::to_string(g_lo) + ", " + std::to_string(g_hi) + "]");
  }
  if (g_lo >= target) return {lo, lo};
  return bisect_predicate([&](double t) { return g(t) >= target; }, lo, hi, tol);
}

double bisect_monotone(const RealFn& g, double target, double lo, double hi, double tol) {
  const Bracket b = bisect_monotone_bracket(g, target, lo, hi, tol);
  return b.lo + 0.5 * (b.hi - b.lo);
}

double central_difference(const RealFn& f, double t, int order) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, std::abs(t));
  if (order == 1) {
    const double h = std::cbrt(eps) * scale;
    if (t - h < 0.0) {
      return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    }
    return (f(t + h) - f(t - h)) / (2.0 * h);
  }
  if (order == 2) {
    const double h = std::sqrt(std::sqrt(eps)) * scale;
    if (t - h < 0.0) {
      return (2.0 * f(t) - 5.0 * f(t + h) + 4.0 * f(t + 2.0 * h) - f(t + 3.0 * h)) / (h * h);
    }
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
  }
  throw Error(ErrorCode::InvalidParameter, "central_difference order must be 1 or 2");
}

namespace {
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x6f726c69u};
  return std::mt19937_64(seq);
}
}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RandomStream::uniform_open() {
  // (k + 1/2) / 2^52 is exact, so it never hits 0 or 1.
  const std::uint64_t k = engine_() >> 12;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-52;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidParameter, "below() needs a positive bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

}  // namespace orlicz
