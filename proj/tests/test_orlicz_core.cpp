#include <cmath>
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "oracles.hpp"
#include "orlicz/m_spec.hpp"
#include "orlicz/orlicz_function.hpp"

using namespace orlicz;
using Catch::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ParseError;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

}  // namespace

TEST_CASE("power functions", "[core]") {
  CHECK(make_power(2.0)(3.0) == 9.0);
  CHECK(make_power(1.0).derivative(5.0) == 1.0);
  CHECK(make_power(2.5).second_derivative(1.0) == Approx(3.75));
  CHECK(make_power(2.0)(0.0) == 0.0);
  CHECK(code_of([] { make_power(0.5); }) == ErrorCode::InvalidParameter);
  CHECK(make_power(3.0).describe() == "power:3");
}

TEST_CASE("gaussian Orlicz function", "[core]") {
  const OrliczFunction m = make_gaussian_m();
  CHECK(m(0.0) == 0.0);
  CHECK(m.derivative(1.0) == Approx(oracle::kSqrt2OverPi * std::exp(-0.5)).epsilon(1e-14));
  CHECK(m.derivative(1.0) == Approx(0.483941).margin(1e-6));
  CHECK(m(10.0) >= 0.0);
  CHECK(m(10.0) <= 10.0 * oracle::kSqrt2OverPi);
  CHECK(m.second_derivative(2.0) == Approx(oracle::kSqrt2OverPi * std::exp(-0.125) / 8.0).epsilon(1e-14));
  for (double s : {0.2, 0.5, 1.0, 2.0, 3.7, 10.0}) {
    const double ref = oracle::gaussian_m(s);
    CHECK(m(s) == Approx(ref).epsilon(1e-9).margin(1e-10));
    CHECK(gaussian_m_by_quadrature(s) == Approx(ref).epsilon(1e-8).margin(1e-10));
  }
}

TEST_CASE("piecewise-linear functions", "[core]") {
  const OrliczFunction id = make_piecewise_linear({{0, 0}, {1, 1}}, 1.0);
  for (double t : {0.0, 0.3, 1.0, 7.5}) CHECK(id(t) == Approx(t));
  const OrliczFunction flat = make_piecewise_linear({{0, 0}, {1, 0}}, 1.0);
  CHECK(flat(2.0) == 1.0);
  CHECK(flat.degenerate_allowed());
  CHECK(make_piecewise_linear({{0, 0}, {1, 1}}, 3.0)(2.0) == 4.0);
  CHECK(code_of([] { make_piecewise_linear({{0, 0}, {1, 2}}, 1.0); }) == ErrorCode::NonConvex);
  CHECK(code_of([] { make_piecewise_linear({{0, 0}, {1, 1}, {1, 2}}, 3.0); }) == ErrorCode::InvalidParameter);

  const PiecewiseLinear f({{0, 0}, {1, 0.5}, {2, 2}, {4, 7}}, 4.0);
  for (const Knot& k : f.knots()) CHECK(f(k.t) == k.value);
  CHECK(f.right_slope(1.0) == 1.5);
  CHECK(f.right_slope(0.999) == 0.5);
  const auto jumps = f.slope_jumps();
  REQUIRE(jumps.size() == 3);
  CHECK(jumps[0].location == 1.0);
  CHECK(jumps[0].jump == Approx(1.0));
  CHECK(f.inverse(2.0) == Approx(2.0));
  CHECK(f.inverse(0.0) == 0.0);

  const PiecewiseLinear g = piecewise_from_json(to_json(f));
  CHECK(to_json(g) == to_json(f));
  const PiecewiseLinear capped({{0, 0}, {1, 1}}, kInf);
  CHECK(to_json(capped)["final_slope"] == "inf");
  CHECK(piecewise_from_json(to_json(capped)).has_infinite_final_slope());
  CHECK(std::isinf(capped(1.5)));
  CHECK(code_of([] { piecewise_from_json(nlohmann::json::parse(R"({"knots": 3})")); }) == ErrorCode::ParseError);
}

TEST_CASE("convexity and monotonicity of built-in kinds", "[core][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  const std::vector<OrliczFunction> kinds = {make_power(1.0), make_power(1.5), make_power(3.0), make_gaussian_m(),
                                             truncate_linear(make_gaussian_m()),
                                             make_piecewise_linear({{0, 0}, {0.5, 0.1}, {2, 1.5}}, 2.0)};
  for (const OrliczFunction& m : kinds) {
    CHECK(m(0.0) == 0.0);
    for (int i = 0; i < 200; ++i) {
      double a = d(rng);
      double b = d(rng);
      if (a > b) std::swap(a, b);
      CHECK(m((a + b) / 2.0) <= (m(a) + m(b)) / 2.0 + 1e-12);
      CHECK(m(a) <= m(b) + 1e-15);
      if (!m.degenerate_allowed() && b > 0.0) CHECK(m(b) > 0.0);
    }
  }
}

TEST_CASE("conjugates", "[core]") {
  const OrliczFunction sq = make_power(2.0);
  CHECK(conjugate(sq, 2.0) == Approx(1.0).epsilon(1e-10));
  CHECK(conjugate(make_power(1.0), 0.5) == Approx(0.0).margin(1e-12));
  CHECK(conjugate(sq, 3.0) == Approx(9.0 / 4.0).epsilon(1e-10));
  CHECK(std::isinf(conjugate(make_power(1.0), 2.0)));
  const OrliczFunction g = make_gaussian_m();
  for (double x : {0.1, 0.4, 0.7}) {
    CHECK(conjugate(g, x) == Approx(oracle::brute_conjugate([&](double t) { return g(t); }, x, 20.0)).epsilon(1e-7));
  }
  const OrliczFunction p3 = make_power(3.0);
  for (double x : {0.5, 1.0, 4.0}) {
    // sup (x t - t^3) at t = sqrt(x / 3)
    const double t = std::sqrt(x / 3.0);
    CHECK(conjugate(p3, x) == Approx(x * t - t * t * t).epsilon(1e-10));
  }
  const PiecewiseLinear f({{0, 0}, {1, 0.5}, {2, 2}}, 3.0);
  const PiecewiseLinear fs = f.conjugate();
  for (double x : {0.0, 0.25, 0.5, 1.0, 1.5, 2.9}) {
    CHECK(fs(x) == Approx(oracle::brute_conjugate([&](double t) { return f(t); }, x, 10.0)).margin(1e-12));
  }
  CHECK(fs.has_infinite_final_slope());
}

TEST_CASE("conjugate involution", "[core][property]") {
  for (const OrliczFunction& m : {make_power(1.5), make_power(2.0), make_power(3.0), truncate_linear(make_gaussian_m())}) {
    const OrliczFunction mss = conjugate_function(conjugate_function(m));
    for (double t : log_grid(0.01, inverse(m, 1.0) * 2.0, 50)) {
      const double ref = m(t);
      CHECK(std::abs(mss(t) - ref) <= 1e-6 * std::max(ref, std::numeric_limits<double>::min()));
    }
  }
}

TEST_CASE("inverse picks the leftmost preimage", "[core]") {
  const OrliczFunction sq = make_power(2.0);
  CHECK(inverse(sq, 4.0) == Approx(2.0).epsilon(1e-14));
  CHECK(inverse(sq, 0.0) == 0.0);
  CHECK(inverse(make_piecewise_linear({{0, 0}, {1, 0}}, 1.0), 0.0) == 0.0);
  CHECK(inverse(make_piecewise_linear({{0, 0}, {1, 0}}, 1.0), 0.5) == Approx(1.5));
  const OrliczFunction capped = make_piecewise_linear(PiecewiseLinear({{0, 0}, {1, 0.5}}, kInf));
  CHECK(code_of([&] { inverse(capped, 1.0); }) == ErrorCode::OutOfRange);
  const OrliczFunction g = make_gaussian_m();
  const double T = inverse(g, 1.0);
  CHECK(g(T) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear truncation", "[core]") {
  const OrliczFunction t2 = truncate_linear(make_power(2.0));
  CHECK(t2(2.0) == Approx(3.0));
  CHECK(t2(0.5) == 0.25);
  const OrliczFunction t1 = truncate_linear(make_power(1.0));
  for (double t : {0.2, 1.0, 3.0}) CHECK(t1(t) == Approx(t));
  const OrliczFunction g = make_gaussian_m();
  const OrliczFunction tg = truncate_linear(g);
  const double T = std::get<TruncatedKind>(tg.kind()).T;
  CHECK(T == Approx(inverse(g, 1.0)).epsilon(1e-14));
  CHECK(tg(T + 1.0) == Approx(1.0 + g.derivative(T)).epsilon(1e-12));
  CHECK(tg.second_derivative(T + 0.5) == 0.0);
  const OrliczFunction capped = truncate_linear(make_piecewise_linear(PiecewiseLinear({{0, 0}, {1, 0.5}}, kInf)));
  CHECK(std::get<TruncatedKind>(capped.kind()).T == 1.0);
  CHECK(capped(2.0) == Approx(1.0).epsilon(1e-15));
  CHECK(code_of([] { truncate_linear(make_piecewise_linear(PiecewiseLinear({{0, 0}}, kInf))); }) ==
        ErrorCode::DegenerateFunction);
}

TEST_CASE("orlicz norm examples", "[core]") {
  CHECK(orlicz_norm(make_power(2.0), Vector{3.0, 4.0}) == Approx(5.0).epsilon(1e-12));
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(orlicz_norm(make_power(p), Vector{1.0, 1.0}) == Approx(std::pow(2.0, 1.0 / p)).epsilon(1e-12));
  }
  const OrliczFunction g = make_gaussian_m();
  const double t = orlicz_norm(g, Vector{1.0, 0.0, 0.0});
  CHECK(t == Approx(1.0 / inverse(g, 1.0)).epsilon(1e-12));
  CHECK(g(1.0 / t) == Approx(1.0).epsilon(1e-10));
  CHECK(orlicz_norm(g, Vector{0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(Vector(std::vector<double>{}), Error);
  CHECK_THROWS_AS(Vector({1.0, std::nan("")}), Error);
}

TEST_CASE("orlicz norm properties", "[core][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(-10.0, 10.0);
  const std::vector<OrliczFunction> kinds = {make_power(1.5), make_power(3.0), make_gaussian_m(),
                                             truncate_linear(make_power(2.0))};
  for (const OrliczFunction& m : kinds) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + trial % 7;
      const std::vector<double> x = random_vector(rng, n);
      const std::vector<double> y = random_vector(rng, n);
      const double nx = orlicz_norm(m, Vector(x));
      const double alpha = scale(rng);
      std::vector<double> ax(x), sum(x);
      for (std::size_t i = 0; i < n; ++i) {
        ax[i] *= alpha;
        sum[i] += y[i];
      }
      CHECK(orlicz_norm(m, Vector(ax)) == Approx(std::abs(alpha) * nx).epsilon(1e-10));
      CHECK(orlicz_norm(m, Vector(sum)) <= nx + orlicz_norm(m, Vector(y)) + 1e-10);
      double level = 0.0;
      for (double v : x) level += m(std::abs(v) / nx);
      CHECK(level <= 1.0);
      CHECK(level >= 1.0 - 1e-8);
    }
  }
}

TEST_CASE("power norms are p-norms", "[core][property]") {
  std::mt19937_64 rng(23);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> x = random_vector(rng, 1 + trial % 12);
      CHECK(orlicz_norm(make_power(p), Vector(x)) == Approx(oracle::p_norm(x, p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("truncation keeps norms whose arguments stay below T", "[core][property]") {
  std::mt19937_64 rng(29);
  for (const OrliczFunction& m : {make_power(2.0), make_power(3.0), make_gaussian_m()}) {
    const OrliczFunction mt = truncate_linear(m);
    const double T = std::get<TruncatedKind>(mt.kind()).T;
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> x = random_vector(rng, 2 + trial % 5);
      const double nx = orlicz_norm(m, Vector(x));
      double largest = 0.0;
      for (double v : x) largest = std::max(largest, std::abs(v));
      REQUIRE(largest / nx <= T);
      CHECK(orlicz_norm(mt, Vector(x)) == Approx(nx).epsilon(1e-10));
    }
  }
}

TEST_CASE("choquet representation", "[core]") {
  CHECK(choquet_eval(make_power(2.0), 1.0) == Approx(1.0).epsilon(1e-10));
  CHECK(choquet_eval(make_gaussian_m(), 0.0) == 0.0);
  CHECK(choquet_eval(make_piecewise_linear({{0, 0}, {1, 0}}, 1.0), 3.0) == Approx(2.0));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  const std::vector<OrliczFunction> kinds = {
      make_power(1.0),     make_power(1.5), make_power(2.0), make_power(3.0), make_gaussian_m(),
      truncate_linear(make_power(2.5)), truncate_linear(make_gaussian_m()),
      make_piecewise_linear({{0, 0}, {0.5, 0.1}, {1.2, 0.8}, {3, 4}}, 5.0)};
  for (const OrliczFunction& m : kinds) {
    for (int i = 0; i < 50; ++i) {
      const double x = d(rng);
      CHECK(choquet_eval(m, x) == Approx(m(x)).margin(1e-6));
    }
  }
}

TEST_CASE("m_spec parsing", "[core]") {
  CHECK(parse_m_spec("power:2")(3.0) == 9.0);
  CHECK(parse_m_spec("gaussian").describe() == "gaussian");
  const OrliczFunction inline_pwl = parse_m_spec(R"(pwl:{"knots": [[0,0],[1,0]], "final_slope": 1})");
  CHECK(inline_pwl(3.0) == 2.0);
  CHECK(code_of([] { parse_m_spec("power:x"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_m_spec("cubic"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_m_spec("pwl:@/nonexistent.json"); }) == ErrorCode::ParseError);
  CHECK(parse_tail_spec("pareto:2").tail(2.0) == 0.25);
  CHECK(code_of([] { parse_tail_spec("lognormal"); }) == ErrorCode::ParseError);
}
