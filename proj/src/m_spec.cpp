#include "orlicz/m_spec.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace orlicz {

namespace {

double parse_parameter(std::string_view text, std::string_view spec) {
  const std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::ParseError, "bad numeric parameter in '" + std::string(spec) + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

OrliczFunction parse_m_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "power") {
    if (rest.empty()) throw Error(ErrorCode::ParseError, "power needs an exponent, e.g. power:2");
    return make_power(parse_parameter(rest, spec));
  }
  if (head == "gaussian" && colon == std::string_view::npos) return make_gaussian_m();
  if (head == "pwl") {
    std::string text;
    if (!rest.empty() && rest.front() == '@') {
      text = read_file(std::string(rest.substr(1)));
    } else {
      text = std::string(rest);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("pwl json: ") + e.what());
    }
    return make_piecewise_linear(piecewise_from_json(j));
  }
  throw Error(ErrorCode::ParseError, "unknown Orlicz function '" + std::string(spec) + "'");
}

TailDistribution parse_tail_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  if (head == "pareto" && colon != std::string_view::npos) {
    return make_pareto_tail(parse_parameter(spec.substr(colon + 1), spec));
  }
  if (head == "halfnormal" && colon == std::string_view::npos) return make_half_normal_tail();
  throw Error(ErrorCode::ParseError, "unknown tail law '" + std::string(spec) + "'");
}

}  // namespace orlicz
