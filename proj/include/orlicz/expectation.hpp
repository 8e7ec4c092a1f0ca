#pragma once

// E max_i |x_i X_i| by layer-cake quadrature and by Monte Carlo, and sweeps
// comparing it with the Orlicz norm.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/inversion.hpp"
#include "orlicz/numerics.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/sampler.hpp"

namespace orlicz {

/// integral_0^inf [1 - prod_i (1 - P(X >= u / |x_i|))] du; zero entries are
/// skipped. Throws InfiniteMean when the law has no finite mean.
double exact_emax(const TailDistribution& dist, const Vector& x);

/// Mean of max_i |x_i| X_i over `trials` independent draws, and its
/// standard error. Uses the exact quantile for every draw.
Estimate mc_emax(const TailDistribution& dist, const Vector& x, std::size_t trials, RandomStream& stream);
/// Same estimate drawing through a precomputed sampler.
Estimate mc_emax(const InverseTransformSampler& sampler, const Vector& x, std::size_t trials,
                 RandomStream& stream);

enum class FamilyKind { Canonical, Constant, Geometric, RandomUniform, RandomSparse };

struct VectorFamily {
  FamilyKind kind = FamilyKind::Canonical;
  double rho = 0.9;             // geometric
  std::optional<std::size_t> k;  // random_sparse; default ceil(n / 10)

  /// "canonical", "constant", "geometric", "geometric:0.8", "random_uniform",
  /// "random_sparse", "random_sparse:5".
  static VectorFamily parse(const std::string& tag);
  std::string label() const;
  /// Instantiates the family in dimension n; random families draw from `stream`.
  Vector instantiate(std::size_t n, RandomStream& stream) const;
};

struct ExperimentConfig {
  std::string m_spec = "power:2";
  std::vector<std::size_t> n_values;
  std::vector<VectorFamily> vector_families;
  std::size_t mc_trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: one per hardware thread

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct EquivalenceRow {
  std::string vector_label;
  std::size_t n = 0;
  double norm_value = 0.0;
  double emax_quadrature = 0.0;
  double emax_mc = 0.0;
  double mc_stderr = 0.0;
  double ratio = 0.0;
  bool consistent = true;  // |emax_mc - emax_quadrature| <= 4 mc_stderr
};

struct EquivalenceReport {
  std::string m_description;
  std::string dist_description;
  std::vector<EquivalenceRow> rows;
  std::optional<double> c1_empirical;
  std::optional<double> c2_empirical;
  std::uint64_t seed = 0;

  void recompute_constants();
  nlohmann::json to_json() const;
  static EquivalenceReport from_json(const nlohmann::json& j);
  std::string to_csv() const;
};

/// Inverts the configured M (with truncation when needed) and fills one row
/// per (n, family). Row r uses RandomStream(seed, r) for Monte Carlo and
/// RandomStream(seed, r + 2^32) to draw random vectors, so the report does
/// not depend on the thread count.
EquivalenceReport run_equivalence(const ExperimentConfig& config);

/// The four sweeps over power:1.5, power:2, power:3 and gaussian with
/// n in {10, 100, 1000} and every vector family.
std::vector<ExperimentConfig> default_sweep(std::size_t trials = 100000, std::uint64_t seed = 20240917);

}  // namespace orlicz
