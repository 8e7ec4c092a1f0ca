#include "orlicz/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>


namespace orlicz {

namespace {
constexpr double kSqrt2OverPi = 0.79788456080286535588;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}
}  // namespace

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Inverted: return "inverted";
    case SourceKind::Analytic: return "analytic";
    case SourceKind::Empirical: return "empirical";
  }
  return "unknown";
}

TailDistribution::TailDistribution(Parts parts)
    : tail_(std::move(parts.tail)),
      support_min_(parts.support_min),
      mass_of_Q_(parts.mass_of_Q),
      density_(std::move(parts.density)),
      atoms_(std::move(parts.atoms)),
      source_(parts.source),
      description_(std::move(parts.description)) {
  if (atoms_.empty() && !tail_) {
    throw Error(ErrorCode::InvalidParameter, "a distribution needs a tail function or atoms");
  }
  if (!atoms_.empty()) {
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    double total = 0.0;
    for (const Atom& a : atoms_) {
      if (!(a.probability >= 0.0) || !(a.location >= 0.0) || !std::isfinite(a.location)) {
        throw Error(ErrorCode::InvalidParameter, "atoms need finite locations >= 0 and probabilities >= 0");
      }
      total += a.probability;
    }
    if (std::abs(total - 1.0) > 1e-10) {
      throw Error(ErrorCode::InvalidParameter, "atom probabilities sum to " + format_number(total));
    }
    upper_mass_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = atoms_.size(); i-- > 0;) upper_mass_[i] = upper_mass_[i + 1] + atoms_[i].probability;
    support_min_ = atoms_.front().location;
  }
}

double TailDistribution::tail(double x) const {
  if (x <= support_min_) return 1.0;
  if (!atoms_.empty()) {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.location < v; });
    return std::min(1.0, upper_mass_[static_cast<std::size_t>(it - atoms_.begin())]);
  }
  return std::clamp(tail_(x), 0.0, 1.0);
}

std::optional<double> TailDistribution::density(double x) const {
  if (!density_) return std::nullopt;
  if (x < support_min_) return 0.0;
  return density_(x);
}

double TailDistribution::tail_inverse(double level) const {
  if (std::isnan(level) || level < 0.0 || level >= 1.0) {
    throw Error(ErrorCode::InvalidParameter, "tail level must lie in [0, 1)");
  }
  if (!atoms_.empty()) {
    // first atom whose upper mass after it drops to <= level
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (upper_mass_[i + 1] <= level) return atoms_[i].location;
    }
    return atoms_.back().location;
  }
  double lo = support_min_;
  double hi = std::max(1.0, 2.0 * support_min_);
  while (tail(hi) > level) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error(ErrorCode::NonConvergent, "tail never drops to the requested level");
  }
  const Bracket b = bisect_predicate([&](double x) { return tail(x) <= level; }, lo, hi,
                                     std::numeric_limits<double>::min(), 1e-15);
  return b.hi;
}

double TailDistribution::integrated_tail(double z, const QuadratureSpec& spec) const {
  if (!atoms_.empty()) {
    double sum = 0.0;
    for (const Atom& a : atoms_) {
      if (a.location > z) sum += a.probability * (a.location - z);
    }
    return sum;
  }
  const double lo = std::max(z, 0.0);
  double below = lo > z ? (lo - z) : 0.0;  // tail is 1 on [z, 0)
  const double start = std::max(lo, support_min_);
  below += start - lo;  // tail is 1 on [lo, support_min)
  try {
    return below + integrate([this](double u) { return tail(u); }, start, kInf, spec);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonConvergent) {
      throw Error(ErrorCode::InfiniteMean, description_ + " has no finite mean");
    }
    throw;
  }
}

TailDistribution make_pareto_tail(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidParameter, "Pareto index must be positive");
  TailDistribution::Parts parts;
  parts.tail = [p](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -p); };
  parts.density = [p](double x) { return x < 1.0 ? 0.0 : p * std::pow(x, -p - 1.0); };
  parts.support_min = 1.0;
  parts.source = SourceKind::Analytic;
  parts.description = "pareto:" + format_number(p);
  return TailDistribution(std::move(parts));
}

TailDistribution make_half_normal_tail() {
  TailDistribution::Parts parts;
  parts.tail = [](double x) { return x <= 0.0 ? 1.0 : std::erfc(x / std::numbers::sqrt2); };
  parts.density = [](double x) { return x < 0.0 ? 0.0 : kSqrt2OverPi * std::exp(-0.5 * x * x); };
  parts.support_min = 0.0;
  parts.source = SourceKind::Analytic;
  parts.description = "halfnormal";
  return TailDistribution(std::move(parts));
}

TailDistribution make_atomic(std::vector<Atom> atoms, std::string description, SourceKind source) {
  if (atoms.empty()) throw Error(ErrorCode::EmptySample, "an atomic law needs at least one atom");
  TailDistribution::Parts parts;
  parts.atoms = std::move(atoms);
  parts.source = source;
  parts.description = std::move(description);
  return TailDistribution(std::move(parts));
}

TailDistribution make_empirical(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "empirical law of an empty sample");
  std::map<double, std::size_t> counts;
  for (double v : samples) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, "samples must be finite and >= 0");
    }
    ++counts[v];
  }
  std::vector<Atom> atoms;
  const double n = static_cast<double>(samples.size());
  for (const auto& [v, c] : counts) atoms.push_back({v, static_cast<double>(c) / n});
  return make_atomic(std::move(atoms), "empirical(" + std::to_string(samples.size()) + ")",
                     SourceKind::Empirical);
}

namespace {

void require_flat_start(const OrliczFunction& m) {
  const double d0 = m.derivative(0.0);
  const double slack = m.has_analytic_derivative() ? 0.0 : 1e-7;
  if (d0 > slack) {
    throw Error(ErrorCode::NonzeroDerivativeAtZero, m.describe() + " has M'(0) = " + format_number(d0));
  }
}

double atomic_mass(const PiecewiseLinear& pwl) {
  double sum = 0.0;
  for (const SlopeJump& j : pwl.slope_jumps()) {
    if (std::isinf(j.jump)) throw Error(ErrorCode::DivergentMass, "infinite slope jump");
    sum += j.location * j.jump;
  }
  return sum;
}

double generic_mass(const OrliczFunction& m) {
  if (m.has_second_derivative()) {
    try {
      return integrate([&m](double y) { return y * m.second_derivative(y); }, 0.0, kInf);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonConvergent) throw Error(ErrorCode::DivergentMass, m.describe());
      throw;
    }
  }
  // integral_0^B y dM'(y) = B M'(B) - M(B); follow it out by doubling B.
  double previous = 0.0;
  for (double B = 1.0; B < 0x1.0p200; B *= 2.0) {
    const double current = B * m.derivative(B) - m(B);
    if (B > 1.0 && std::abs(current - previous) <= 1e-12 * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  throw Error(ErrorCode::DivergentMass, m.describe() + ": B M'(B) - M(B) keeps growing");
}

}  // namespace

double q_mass(const OrliczFunction& m) {
  require_flat_start(m);
  if (auto pwl = m.as_piecewise()) return atomic_mass(*pwl);
  return std::visit(
      [&m](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerKind>) {
          throw Error(ErrorCode::DivergentMass, m.describe() + ": integral of y p(p-1) y^(p-2) diverges");
        } else if constexpr (std::is_same_v<K, GaussianKind>) {
          // B M'(B) - M(B) = erfc(1/(B sqrt 2)) -> 1
          return 1.0;
        } else if constexpr (std::is_same_v<K, TruncatedKind>) {
          // dM' carries no mass beyond T
          return k.T * k.slope_at_T - k.value_at_T;
        } else {
          return generic_mass(m);
        }
      },
      m.kind());
}

double unnormalized_tail(const OrliczFunction& m, double x) {
  if (std::isnan(x) || x <= 0.0) throw Error(ErrorCode::InvalidParameter, "tail needs x > 0");
  require_flat_start(m);
  const double y = 1.0 / x;
  if (auto pwl = m.as_piecewise()) {
    double sum = 0.0;
    for (const SlopeJump& j : pwl->slope_jumps()) {
      if (j.location > y) break;
      if (std::isinf(j.jump)) return kInf;
      sum += j.location * j.jump;
    }
    return sum;
  }
  if (y == 0.0) return 0.0;
  const OrliczFunction* base = &m;
  if (const auto* tr = std::get_if<TruncatedKind>(&m.kind())) {
    if (y >= tr->T) return tr->T * tr->slope_at_T - tr->value_at_T;
    base = tr->inner.get();
  }
  if (std::holds_alternative<GaussianKind>(base->kind())) return std::erfc(x / std::numbers::sqrt2);
  return std::max(0.0, y * base->derivative(y) - (*base)(y));
}

InversionResult invert(const OrliczFunction& m, bool auto_truncate) {
  InversionDiagnostics diag;
  diag.m_prime_at_zero = m.derivative(0.0);
  require_flat_start(m);

  OrliczFunction used = m;
  double mass = 0.0;
  try {
    mass = q_mass(m);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DivergentMass || !auto_truncate) throw;
    used = truncate_linear(m);
    mass = q_mass(used);
    diag.truncation_applied = true;
  }
  if (const auto* tr = std::get_if<TruncatedKind>(&used.kind())) diag.truncation_point_T = tr->T;
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::DegenerateFunction, used.describe() + " carries no mass (dM' vanishes)");
  }
  diag.mass_of_Q = mass;

  const std::string description = "inverted(" + used.describe() + ")";
  if (auto pwl = used.as_piecewise()) {
    std::vector<Atom> atoms;
    for (const SlopeJump& j : pwl->slope_jumps()) {
      atoms.push_back({1.0 / j.location, j.location * j.jump / mass});
    }
    // absorb rounding in the probabilities so they sum to one
    double total = 0.0;
    for (const Atom& a : atoms) total += a.probability;
    for (Atom& a : atoms) a.probability /= total;
    TailDistribution::Parts parts;
    parts.atoms = std::move(atoms);
    parts.mass_of_Q = mass;
    parts.source = SourceKind::Inverted;
    parts.description = description;
    return {TailDistribution(std::move(parts)), diag, used};
  }

  TailDistribution::Parts parts;
  parts.support_min = diag.truncation_point_T ? 1.0 / *diag.truncation_point_T : 0.0;
  parts.mass_of_Q = mass;
  parts.tail = [used, mass](double x) { return x <= 0.0 ? 1.0 : unnormalized_tail(used, x) / mass; };
  if (used.has_second_derivative()) {
    parts.density = [used, mass](double x) {
      if (x < 0.0) return 0.0;
      const double y = 1.0 / x;
      const OrliczFunction* base = &used;
      if (const auto* tr = std::get_if<TruncatedKind>(&used.kind())) {
        if (y < tr->T) base = tr->inner.get();
      }
      // y^3 M''(y) underflows against overflow as x -> 0
      if (std::holds_alternative<GaussianKind>(base->kind())) {
        return std::numbers::sqrt2 / std::sqrt(std::numbers::pi) * std::exp(-0.5 * x * x) / mass;
      }
      if (x == 0.0) return 0.0;
      return used.second_derivative(y) * y * y * y / mass;
    };
  }
  parts.source = SourceKind::Inverted;
  parts.description = description;
  return {TailDistribution(std::move(parts)), diag, used};
}

double quantile(const TailDistribution& dist, double u) {
  if (std::isnan(u) || u <= 0.0 || u >= 1.0) throw Error(ErrorCode::InvalidParameter, "quantile needs u in (0, 1)");
  if (dist.is_atomic()) {
    double cumulative = 0.0;
    for (const Atom& a : dist.atoms()) {
      cumulative += a.probability;
      if (cumulative >= u) return a.location;
    }
    return dist.atoms().back().location;
  }
  return dist.tail_inverse(1.0 - u);
}

std::vector<double> sample(const TailDistribution& dist, RandomStream& stream, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(quantile(dist, stream.uniform_open()));
  return out;
}

}  // namespace orlicz
