#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orlicz/discrete_ks.hpp"
#include "orlicz/expectation.hpp"
#include "orlicz/forward_map.hpp"
#include "orlicz/inversion.hpp"
#include "orlicz/m_spec.hpp"

namespace orlicz::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad number '" + item + "' in --x");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--x needs at least one entry");
  return out;
}

struct Options {
  std::string m = "power:2";
  std::string tail;
  std::string x;
  std::string config;
  std::string out;
  std::string format;
  std::size_t grid = 0;
  std::size_t count = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 0.0;
  double smax = 1.0;
  bool no_truncate = false;
};

class Emitter {
 public:
  Emitter(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::InvalidParameter, "cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

bool want_json(const Options& o) { return o.format == "json"; }

int cmd_norm(const Options& o, std::ostream& out) {
  const OrliczFunction m = parse_m_spec(o.m);
  const double norm = orlicz_norm(m, Vector(parse_list(o.x)));
  Emitter e(o.out, out);
  if (want_json(o)) {
    *e << nlohmann::json{{"m", m.describe()}, {"norm", norm}}.dump() << '\n';
  } else {
    *e << scalar(norm) << '\n';
  }
  return 0;
}

int cmd_invert(const Options& o, std::ostream& out) {
  const OrliczFunction m = parse_m_spec(o.m);
  const InversionResult inv = invert(m, !o.no_truncate);
  const TailDistribution& d = inv.distribution;
  std::vector<double> xs;
  if (d.is_atomic()) {
    for (const Atom& a : d.atoms()) xs.push_back(a.location);
  } else {
    const std::size_t points = o.grid == 0 ? 50 : o.grid;
    const double lo = d.support_min();
    const double hi = d.tail_inverse(1e-6);
    for (std::size_t i = 0; i < points; ++i) {
      xs.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
  }
  Emitter e(o.out, out);
  if (want_json(o)) {
    nlohmann::json rows = nlohmann::json::array();
    for (double x : xs) {
      const auto f = d.density(x);
      rows.push_back({{"x", x}, {"tail", d.tail(x)}, {"density", f ? nlohmann::json(*f) : nullptr}, {"cdf", d.cdf(x)}});
    }
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : d.atoms()) atoms.push_back({a.location, a.probability});
    nlohmann::json j = {{"m", inv.inverted.describe()},
                        {"distribution", d.description()},
                        {"mass_of_Q", inv.diagnostics.mass_of_Q},
                        {"truncation_applied", inv.diagnostics.truncation_applied},
                        {"truncation_T", inv.diagnostics.truncation_point_T ? nlohmann::json(*inv.diagnostics.truncation_point_T)
                                                                           : nlohmann::json(nullptr)},
                        {"support_min", d.support_min()},
                        {"atoms", atoms},
                        {"rows", rows}};
    *e << j.dump(2) << '\n';
  } else {
    *e << "x,tail,density,cdf\n";
    for (double x : xs) {
      const auto f = d.density(x);
      *e << exact(x) << ',' << exact(d.tail(x)) << ',' << (f ? exact(*f) : std::string()) << ',' << exact(d.cdf(x))
         << '\n';
    }
  }
  return 0;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const InversionResult inv = invert(parse_m_spec(o.m), !o.no_truncate);
  RandomStream stream(o.seed, 0);
  const std::vector<double> values = sample(inv.distribution, stream, o.count);
  Emitter e(o.out, out);
  if (want_json(o)) {
    *e << nlohmann::json(values).dump() << '\n';
  } else {
    for (double v : values) *e << exact(v) << '\n';
  }
  return 0;
}

int cmd_forward(const Options& o, std::ostream& out) {
  const TailDistribution tail = parse_tail_spec(o.tail);
  const std::vector<double> grid = default_grid(o.smax, o.grid == 0 ? 64 : o.grid);
  const ForwardResult fr = forward_map(tail, grid);
  Emitter e(o.out, out);
  if (want_json(o)) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [s, v] : fr.m_values) rows.push_back({{"s", s}, {"M", v}});
    *e << nlohmann::json{{"distribution", tail.description()}, {"rows", rows}}.dump(2) << '\n';
  } else {
    *e << "s,M\n";
    for (const auto& [s, v] : fr.m_values) *e << exact(s) << ',' << exact(v) << '\n';
  }
  return 0;
}

int cmd_roundtrip(const Options& o, std::ostream& out, std::ostream& err) {
  const OrliczFunction m = parse_m_spec(o.m);
  const InversionResult inv = invert(m);
  const std::vector<double> grid =
      o.grid == 0 ? default_grid(inv.inverted) : default_grid(inverse(inv.inverted, 1.0), o.grid);
  const double residual = roundtrip_residual(m, grid);
  Emitter e(o.out, out);
  if (want_json(o)) {
    *e << nlohmann::json{{"m", inv.inverted.describe()}, {"residual", residual}}.dump() << '\n';
  } else {
    *e << scalar(residual) << '\n';
  }
  if (o.tol > 0.0 && !(residual <= o.tol)) {
    err << "error: round-trip residual " << scalar(residual) << " exceeds " << scalar(o.tol) << '\n';
    return 1;
  }
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::ifstream in(o.config);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + ex.what());
  }
  ExperimentConfig config = ExperimentConfig::from_json(j);
  if (o.seed_given) config.seed = o.seed;
  const EquivalenceReport report = run_equivalence(config);
  Emitter e(o.out, out);
  if (o.format == "csv") {
    *e << report.to_csv();
  } else {
    *e << report.to_json().dump(2) << '\n';
  }
  return 0;
}

int cmd_discrete(const Options& o, std::ostream& out) {
  const OrliczFunction m = parse_m_spec(o.m);
  const Vector x(parse_list(o.x));
  const std::size_t n = o.n == 0 ? x.size() : o.n;
  const KSSequence a = ks_sequence(m, n);
  const double average = permutation_average_exact(x, a);
  const double norm = orlicz_norm(m, x);
  Emitter e(o.out, out);
  if (o.format == "csv") {
    *e << "i,a\n";
    for (std::size_t i = 0; i < a.n(); ++i) *e << i + 1 << ',' << exact(a.a[i]) << '\n';
    return 0;
  }
  nlohmann::json j = {{"m", m.describe()},
                      {"a", a.a},
                      {"permutation_average", average},
                      {"norm", norm},
                      {"ratio", number_or_null(average / norm)}};
  if (want_json(o)) {
    *e << j.dump(2) << '\n';
  } else {
    *e << "a: " << nlohmann::json(a.a).dump() << '\n'
       << "permutation_average: " << scalar(average) << '\n'
       << "norm: " << scalar(norm) << '\n'
       << "ratio: " << scalar(average / norm) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orlicz functions, the laws that generate them, and E max |x_i X_i|", "orlicz"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* c, std::vector<std::string> allowed) {
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember(std::move(allowed)));
    c->add_option("--out", o.out, "write to this file instead of stdout");
  };

  CLI::App* norm = app.add_subcommand("norm", "Orlicz norm of a vector");
  norm->add_option("--m", o.m, "Orlicz function (power:p, gaussian, pwl:@file.json)");
  norm->add_option("--x", o.x, "comma-separated entries")->required();
  add_format(norm, {"text", "json"});

  CLI::App* inv = app.add_subcommand("invert", "tail, density and cdf table of the inverted law");
  inv->add_option("--m", o.m, "Orlicz function")->required();
  inv->add_option("--grid", o.grid, "number of x points (default 50)");
  inv->add_flag("--no-truncate", o.no_truncate, "fail instead of truncating when the mass diverges");
  add_format(inv, {"csv", "json"});

  CLI::App* smp = app.add_subcommand("sample", "draws from the inverted law");
  smp->add_option("--m", o.m, "Orlicz function")->required();
  smp->add_option("--count", o.count, "number of draws")->required();
  smp->add_option("--seed", o.seed, "random seed");
  smp->add_flag("--no-truncate", o.no_truncate, "fail instead of truncating when the mass diverges");
  add_format(smp, {"csv", "json"});

  CLI::App* fwd = app.add_subcommand("forward", "Orlicz function generated by a tail law");
  fwd->add_option("--tail", o.tail, "tail law (pareto:p, halfnormal)")->required();
  fwd->add_option("--grid", o.grid, "number of s points (default 64)");
  fwd->add_option("--smax", o.smax, "largest s on the grid (default 1)")->check(CLI::PositiveNumber);
  add_format(fwd, {"csv", "json"});

  CLI::App* rt = app.add_subcommand("roundtrip", "largest relative residual of invert followed by forward");
  rt->add_option("--m", o.m, "Orlicz function")->required();
  rt->add_option("--grid", o.grid, "number of s points (default 64)");
  rt->add_option("--tol", o.tol, "exit 1 when the residual exceeds this");
  add_format(rt, {"text", "json"});

  CLI::App* ver = app.add_subcommand("verify", "equivalence sweep from a JSON config");
  ver->add_option("--config", o.config, "experiment config file")->required();
  auto* seed_opt = ver->add_option("--seed", o.seed, "override the config seed");
  add_format(ver, {"csv", "json"});

  CLI::App* dis = app.add_subcommand("discrete", "discrete sequence and exact permutation average");
  dis->add_option("--m", o.m, "Orlicz function")->required();
  dis->add_option("--n", o.n, "sequence length (default: length of --x)");
  dis->add_option("--x", o.x, "comma-separated entries")->required();
  add_format(dis, {"text", "csv", "json"});

  std::vector<const char*> argv{"orlicz"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  o.seed_given = seed_opt->count() > 0;

  try {
    if (norm->parsed()) return cmd_norm(o, out);
    if (inv->parsed()) return cmd_invert(o, out);
    if (smp->parsed()) return cmd_sample(o, out);
    if (fwd->parsed()) return cmd_forward(o, out);
    if (rt->parsed()) return cmd_roundtrip(o, out, err);
    if (ver->parsed()) return cmd_verify(o, out);
    if (dis->parsed()) return cmd_discrete(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace orlicz::cli
