#include "orlicz/expectation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "orlicz/m_spec.hpp"

namespace orlicz {

namespace {

struct Weight {
  double value;
  double count;
};

// Distinct nonzero |x_i| with multiplicities, largest first.
std::vector<Weight> weights_of(const Vector& x) {
  std::map<double, double, std::greater<>> counts;
  for (double v : x.entries()) {
    if (v != 0.0) counts[std::abs(v)] += 1.0;
  }
  std::vector<Weight> out;
  for (const auto& [v, c] : counts) out.push_back({v, c});
  return out;
}

double atomic_emax(const TailDistribution& dist, const std::vector<Weight>& weights) {
  const auto& atoms = dist.atoms();
  std::vector<double> candidates;
  for (const Weight& w : weights) {
    for (const Atom& a : atoms) candidates.push_back(w.value * a.location);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // P(max <= c) = prod_j P(|x_j| X <= c)^count_j
  auto cdf = [&](double c) {
    double log_p = 0.0;
    for (const Weight& w : weights) {
      double below = 0.0;
      for (const Atom& a : atoms) {
        if (w.value * a.location <= c) below += a.probability;
      }
      if (below <= 0.0) return 0.0;
      log_p += w.count * std::log(std::min(below, 1.0));
    }
    return std::exp(log_p);
  };
  double sum = 0.0;
  double previous = 0.0;
  for (double c : candidates) {
    const double current = cdf(c);
    sum += c * (current - previous);
    previous = current;
  }
  return sum;
}

template <class Draw>
Estimate mc_loop(const Vector& x, std::size_t trials, Draw&& draw) {
  if (trials < 2) throw Error(ErrorCode::InvalidParameter, "Monte Carlo needs at least two trials");
  std::vector<double> weights;
  for (double v : x.entries()) {
    if (v != 0.0) weights.push_back(std::abs(v));
  }
  if (weights.empty()) return {};
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 1; t <= trials; ++t) {
    double best = 0.0;
    for (double w : weights) best = std::max(best, w * draw());
    const double delta = best - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta * (best - mean);
  }
  const double n = static_cast<double>(trials);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double exact_emax(const TailDistribution& dist, const Vector& x) {
  const std::vector<Weight> weights = weights_of(x);
  if (weights.empty()) return 0.0;
  (void)dist.integrated_tail(0.0);
  if (dist.is_atomic()) return atomic_emax(dist, weights);

  const double flat_end = dist.support_min() * weights.front().value;
  auto integrand = [&](double u) {
    double log_below = 0.0;
    for (const Weight& w : weights) {
      const double t = dist.tail(u / w.value);
      if (t >= 1.0) return 1.0;
      log_below += w.count * std::log1p(-t);
    }
    return -std::expm1(log_below);
  };
  try {
    return flat_end + integrate(integrand, flat_end, kInf, relative_quadrature());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonConvergent) {
      throw Error(ErrorCode::InfiniteMean, "E max diverges for " + dist.description());
    }
    throw;
  }
}

Estimate mc_emax(const TailDistribution& dist, const Vector& x, std::size_t trials, RandomStream& stream) {
  return mc_loop(x, trials, [&] { return quantile(dist, stream.uniform_open()); });
}

Estimate mc_emax(const InverseTransformSampler& sampler, const Vector& x, std::size_t trials,
                 RandomStream& stream) {
  return mc_loop(x, trials, [&] { return sampler.draw(stream); });
}

VectorFamily VectorFamily::parse(const std::string& tag) {
  const auto colon = tag.find(':');
  const std::string head = tag.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : tag.substr(colon + 1);
  VectorFamily f;
  auto number = [&]() {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw Error(ErrorCode::ParseError, "bad vector family '" + tag + "'");
    return v;
  };
  if (head == "canonical" && arg.empty()) {
    f.kind = FamilyKind::Canonical;
  } else if (head == "constant" && arg.empty()) {
    f.kind = FamilyKind::Constant;
  } else if (head == "geometric") {
    f.kind = FamilyKind::Geometric;
    if (colon != std::string::npos) f.rho = number();
    if (!(f.rho > 0.0 && f.rho <= 1.0)) throw Error(ErrorCode::InvalidParameter, "geometric ratio must lie in (0, 1]");
  } else if (head == "random_uniform" && arg.empty()) {
    f.kind = FamilyKind::RandomUniform;
  } else if (head == "random_sparse") {
    f.kind = FamilyKind::RandomSparse;
    if (colon != std::string::npos) {
      const double k = number();
      if (!(k >= 1.0) || k != std::floor(k)) throw Error(ErrorCode::InvalidParameter, "sparsity must be a positive integer");
      f.k = static_cast<std::size_t>(k);
    }
  } else {
    throw Error(ErrorCode::ParseError, "unknown vector family '" + tag + "'");
  }
  return f;
}

std::string VectorFamily::label() const {
  switch (kind) {
    case FamilyKind::Canonical: return "canonical";
    case FamilyKind::Constant: return "constant";
    case FamilyKind::Geometric: {
      std::ostringstream os;
      os << "geometric:" << rho;
      return os.str();
    }
    case FamilyKind::RandomUniform: return "random_uniform";
    case FamilyKind::RandomSparse: return k ? "random_sparse:" + std::to_string(*k) : "random_sparse";
  }
  return "unknown";
}

Vector VectorFamily::instantiate(std::size_t n, RandomStream& stream) const {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "vector dimension must be >= 1");
  std::vector<double> x(n, 0.0);
  switch (kind) {
    case FamilyKind::Canonical:
      x[0] = 1.0;
      break;
    case FamilyKind::Constant:
      std::fill(x.begin(), x.end(), 1.0);
      break;
    case FamilyKind::Geometric:
      for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(rho, static_cast<double>(i));
      break;
    case FamilyKind::RandomUniform:
      for (double& v : x) v = stream.uniform_open();
      break;
    case FamilyKind::RandomSparse: {
      const std::size_t count = std::min(n, k.value_or((n + 9) / 10));
      std::vector<std::size_t> index(n);
      for (std::size_t i = 0; i < n; ++i) index[i] = i;
      for (std::size_t i = 0; i < count; ++i) {
        std::swap(index[i], index[i + stream.below(n - i)]);
        x[index[i]] = stream.uniform_open();
      }
      break;
    }
  }
  return Vector(std::move(x));
}

void ExperimentConfig::validate() const {
  if (mc_trials < 2) throw Error(ErrorCode::InvalidParameter, "mc_trials must be >= 2");
  for (std::size_t n : n_values) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "every n must be >= 1");
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.m_spec = j.at("m").get<std::string>();
    c.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    c.vector_families.clear();
    for (const auto& tag : j.at("vector_families")) c.vector_families.push_back(VectorFamily::parse(tag.get<std::string>()));
    c.mc_trials = j.at("mc_trials").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json families = nlohmann::json::array();
  for (const VectorFamily& f : vector_families) families.push_back(f.label());
  nlohmann::json j = {{"m", m_spec},           {"n_values", n_values}, {"vector_families", families},
                      {"mc_trials", mc_trials}, {"seed", seed}};
  if (threads != 0) j["threads"] = threads;
  return j;
}

void EquivalenceReport::recompute_constants() {
  c1_empirical.reset();
  c2_empirical.reset();
  for (const EquivalenceRow& r : rows) {
    c1_empirical = c1_empirical ? std::min(*c1_empirical, r.ratio) : r.ratio;
    c2_empirical = c2_empirical ? std::max(*c2_empirical, r.ratio) : r.ratio;
  }
}

nlohmann::json EquivalenceReport::to_json() const {
  nlohmann::json out_rows = nlohmann::json::array();
  for (const EquivalenceRow& r : rows) {
    out_rows.push_back({{"vector", r.vector_label},
                        {"n", r.n},
                        {"norm", r.norm_value},
                        {"emax_quadrature", r.emax_quadrature},
                        {"emax_mc", r.emax_mc},
                        {"mc_stderr", r.mc_stderr},
                        {"ratio", r.ratio},
                        {"consistent", r.consistent}});
  }
  return {{"m", m_description},
          {"distribution", dist_description},
          {"seed", seed},
          {"c1_empirical", optional_number(c1_empirical)},
          {"c2_empirical", optional_number(c2_empirical)},
          {"rows", out_rows}};
}

EquivalenceReport EquivalenceReport::from_json(const nlohmann::json& j) {
  EquivalenceReport r;
  try {
    r.m_description = j.at("m").get<std::string>();
    r.dist_description = j.at("distribution").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("c1_empirical").is_null()) r.c1_empirical = j.at("c1_empirical").get<double>();
    if (!j.at("c2_empirical").is_null()) r.c2_empirical = j.at("c2_empirical").get<double>();
    for (const auto& row : j.at("rows")) {
      EquivalenceRow e;
      e.vector_label = row.at("vector").get<std::string>();
      e.n = row.at("n").get<std::size_t>();
      e.norm_value = row.at("norm").get<double>();
      e.emax_quadrature = row.at("emax_quadrature").get<double>();
      e.emax_mc = row.at("emax_mc").get<double>();
      e.mc_stderr = row.at("mc_stderr").get<double>();
      e.ratio = row.at("ratio").get<double>();
      e.consistent = row.at("consistent").get<bool>();
      r.rows.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("equivalence report: ") + e.what());
  }
  return r;
}

std::string EquivalenceReport::to_csv() const {
  std::ostringstream os;
  os << "vector,n,norm,emax_quadrature,emax_mc,mc_stderr,ratio,consistent\n";
  for (const EquivalenceRow& r : rows) {
    os << r.vector_label << ',' << r.n << ',' << format_g17(r.norm_value) << ',' << format_g17(r.emax_quadrature)
       << ',' << format_g17(r.emax_mc) << ',' << format_g17(r.mc_stderr) << ',' << format_g17(r.ratio) << ','
       << (r.consistent ? "true" : "false") << '\n';
  }
  return os.str();
}

EquivalenceReport run_equivalence(const ExperimentConfig& config) {
  config.validate();
  const OrliczFunction m = parse_m_spec(config.m_spec);
  const InversionResult inv = invert(m, true);
  const InverseTransformSampler sampler(inv.distribution);

  struct Job {
    std::size_t n;
    const VectorFamily* family;
  };
  std::vector<Job> jobs;
  for (std::size_t n : config.n_values) {
    for (const VectorFamily& f : config.vector_families) jobs.push_back({n, &f});
  }

  EquivalenceReport report;
  report.m_description = inv.inverted.describe();
  report.dist_description = inv.distribution.description();
  report.seed = config.seed;
  report.rows.resize(jobs.size());

  constexpr std::uint64_t kVectorStreamOffset = std::uint64_t{1} << 32;
  auto run_row = [&](std::size_t r) {
    RandomStream vector_stream(config.seed, r + kVectorStreamOffset);
    const Vector x = jobs[r].family->instantiate(jobs[r].n, vector_stream);
    RandomStream mc_stream(config.seed, r);
    EquivalenceRow row;
    row.vector_label = jobs[r].family->label();
    row.n = jobs[r].n;
    row.norm_value = orlicz_norm(inv.inverted, x);
    row.emax_quadrature = exact_emax(inv.distribution, x);
    const Estimate mc = mc_emax(sampler, x, config.mc_trials, mc_stream);
    row.emax_mc = mc.value;
    row.mc_stderr = mc.standard_error;
    row.ratio = row.emax_quadrature / row.norm_value;
    row.consistent = std::abs(row.emax_mc - row.emax_quadrature) <= 4.0 * row.mc_stderr;
    report.rows[r] = std::move(row);
  };

  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
  if (workers <= 1) {
    for (std::size_t r = 0; r < jobs.size(); ++r) run_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = next++; r < jobs.size(); r = next++) run_row(r);
        } catch (...) {
          failures[w] = std::current_exception();
          next = jobs.size();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  report.recompute_constants();
  return report;
}

std::vector<ExperimentConfig> default_sweep(std::size_t trials, std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (const char* m : {"power:1.5", "power:2", "power:3", "gaussian"}) {
    ExperimentConfig c;
    c.m_spec = m;
    c.n_values = {10, 100, 1000};
    for (const char* f : {"canonical", "constant", "geometric", "random_uniform", "random_sparse"}) {
      c.vector_families.push_back(VectorFamily::parse(f));
    }
    c.mc_trials = trials;
    c.seed = seed;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace orlicz
