#include <cmath>
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "oracles.hpp"
#include "orlicz/forward_map.hpp"
#include "orlicz/sampler.hpp"

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

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("forward map examples", "[forward]") {
  const TailDistribution p2 = make_pareto_tail(2.0);
  CHECK(forward_from_tail(p2, 0.5) == Approx(0.25).epsilon(1e-12));
  CHECK(forward_from_tail(p2, 0.0) == 0.0);
  CHECK(forward_from_tail(make_half_normal_tail(), 0.0) == 0.0);
  const TailDistribution atom = make_atomic({{1.0, 1.0}}, "atom");
  CHECK(forward_from_tail(atom, 0.7) == 0.0);
  CHECK(forward_from_tail(atom, 3.0) == Approx(2.0));
  CHECK(code_of([&] { forward_from_tail(p2, -1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { forward_from_tail(make_pareto_tail(1.0), 0.5); }) == ErrorCode::InfiniteMean);
  CHECK(code_of([] { forward_from_tail(make_pareto_tail(0.7), 0.5); }) == ErrorCode::InfiniteMean);
}

TEST_CASE("forward map agrees with the nested double integral", "[forward]") {
  for (double p : {1.5, 2.0, 3.0}) {
    const TailDistribution d = make_pareto_tail(p);
    auto tail = [p](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -p); };
    for (double s : {0.3, 0.8, 1.0, 1.7}) {
      const double ref = oracle::nested_forward(tail, s, 200, 4000, 1.0);
      CHECK(forward_from_tail(d, s) == Approx(ref).epsilon(1e-5));
    }
  }
  const TailDistribution hn = make_half_normal_tail();
  auto tail = [](double x) { return std::erfc(x / std::sqrt(2.0)); };
  for (double s : {0.5, 1.0, 2.5}) {
    CHECK(forward_from_tail(hn, s) == Approx(oracle::nested_forward(tail, s, 200, 4000)).epsilon(1e-5));
    // inverting the gaussian function gives back M itself
    CHECK(forward_from_tail(hn, s) == Approx(oracle::gaussian_m(s)).epsilon(1e-8));
  }
}

TEST_CASE("Pareto closed form below one", "[forward]") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const TailDistribution d = make_pareto_tail(p);
    for (double s : linear_grid(0.05, 1.0, 20)) {
      CHECK(forward_from_tail(d, s) == Approx(std::pow(s, p) / (p - 1.0)).epsilon(1e-6));
    }
  }
}

TEST_CASE("forward maps are Orlicz functions", "[forward][property]") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  for (const TailDistribution& law : {make_pareto_tail(1.5), make_pareto_tail(3.0), make_half_normal_tail(),
                                      make_atomic({{0.5, 0.5}, {2.0, 0.5}}, "two")}) {
    const std::vector<double> grid = default_grid(3.0);
    const ForwardResult fr = forward_map(law, grid);
    CHECK(fr.as_function(0.0) == 0.0);
    for (std::size_t i = 1; i < fr.m_values.size(); ++i) CHECK(fr.m_values[i].second >= fr.m_values[i - 1].second);
    for (int i = 0; i < 30; ++i) {
      double a = d(rng);
      double b = d(rng);
      if (a > b) std::swap(a, b);
      const double mid = fr.as_function((a + b) / 2.0);
      CHECK(mid <= (fr.as_function(a) + fr.as_function(b)) / 2.0 + 1e-9);
      if (a > 0.05 && !law.is_atomic()) {
        CHECK(fr.as_function.derivative(a) == Approx(central_difference([&](double t) { return fr.as_function(t); }, a, 1)).epsilon(1e-5).margin(1e-12));
      }
    }
  }
}

TEST_CASE("empirical forward map", "[forward]") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  CHECK(forward_from_sample(ones, 3.0) == 2.0);
  const std::vector<double> two = {2.0};
  CHECK(forward_from_sample(two, 0.25) == 0.0);
  const std::vector<double> with_zero = {0.0, 4.0};
  CHECK(forward_from_sample(with_zero, 1.0) == 1.5);
  CHECK(code_of([] { forward_from_sample(std::vector<double>{}, 1.0); }) == ErrorCode::EmptySample);

  const TailDistribution p2 = make_pareto_tail(2.0);
  const InverseTransformSampler sampler(p2);
  RandomStream stream(5, 0);
  const std::vector<double> draws = sampler.draw(stream, 200000);
  for (double s : linear_grid(0.2, 2.0, 10)) {
    const Estimate e = forward_from_sample_estimate(draws, s);
    CHECK(std::abs(e.value - forward_from_tail(p2, s)) <= 4.0 * e.standard_error + 1e-15);
  }
}

TEST_CASE("round trips", "[forward]") {
  const std::vector<double> grid = linear_grid(0.05, 1.0, 20);
  CHECK(roundtrip_residual(make_power(2.0), grid) <= 1e-4);
  CHECK(roundtrip_residual(make_power(3.0), grid) <= 1e-4);
  const OrliczFunction atom = make_piecewise_linear({{0, 0}, {1, 0}}, 1.0);
  CHECK(roundtrip_residual(atom, linear_grid(0.1, 3.0, 30)) <= 1e-10);
  const OrliczFunction g = make_gaussian_m();
  CHECK(roundtrip_residual(g, default_grid(g)) <= 1e-4);
}

TEST_CASE("default grid", "[forward]") {
  const std::vector<double> g = default_grid(2.0);
  REQUIRE(g.size() == 64);
  CHECK(g.front() == Approx(2e-3));
  CHECK(g.back() == 2.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == Approx(g[1] / g[0]).epsilon(1e-12));
  CHECK(code_of([] { default_grid(-1.0); }) == ErrorCode::InvalidParameter);
}
