#include "qdesign/spec_strings.hpp"

#include <cctype>
#include <charconv>
#include <fmt/format.h>
#include <map>
#include <vector>

#include "qdesign/errors.hpp"
#include "qdesign/serialize.hpp"

namespace qdesign {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::string_view text, std::string_view why) {
  throw Error(ErrorKind::kParse, fmt::format("cannot parse '{}': {}", text, why));
}

double to_number(std::string_view text, std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    fail(text, fmt::format("'{}' is not a number for key '{}'", value, key));
  }
  return out;
}

struct Spec {
  std::string head;
  std::map<std::string, std::string, std::less<>> keys;
};

// "head:k=v,k=v". Values may themselves contain ':' and '='.
Spec split(std::string_view text) {
  Spec s;
  const std::string_view t = trim(text);
  const auto colon = t.find(':');
  s.head = std::string(trim(t.substr(0, colon)));
  if (s.head.empty()) fail(text, "empty specification");
  if (colon == std::string_view::npos) return s;
  std::string_view rest = t.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) fail(text, fmt::format("expected key=value, got '{}'", item));
    std::string key(trim(item.substr(0, eq)));
    if (!s.keys.emplace(key, std::string(trim(item.substr(eq + 1)))).second) {
      fail(text, fmt::format("duplicate key '{}'", key));
    }
  }
  return s;
}

void only_keys(std::string_view text, const Spec& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : s.keys) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) fail(text, fmt::format("unknown key '{}'", k));
  }
}

double sigma_value(std::string_view text, const Spec& s) {
  const double sigma = to_number(text, "sigma", s.keys.at("sigma"));
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("sigma must be positive (got {})", sigma));
  }
  return sigma;
}

}  // namespace

FamilySpec parse_family(std::string_view text) {
  const Spec s = split(text);
  FamilySpec out;
  if (s.head == "gg") {
    only_keys(text, s, {"beta", "sigma"});
    if (!s.keys.contains("beta")) fail(text, "missing beta");
    out.beta = to_number(text, "beta", s.keys.at("beta"));
    if (!(out.beta >= 1.0)) {
      throw Error(ErrorKind::kInvalidParameter, fmt::format("beta must be >= 1 (got {})", out.beta));
    }
  } else if (s.head == "gaussian" || s.head == "laplacian") {
    only_keys(text, s, {"sigma"});
    out.beta = s.head == "gaussian" ? 2.0 : 1.0;
  } else {
    fail(text, fmt::format("unknown noise family '{}'", s.head));
  }
  if (s.keys.contains("sigma")) out.sigma = sigma_value(text, s);
  return out;
}

NoiseDensity parse_noise(std::string_view text) {
  if (trim(text) == "pointmass") return NoiseDensity::point_mass();
  const FamilySpec f = parse_family(text);
  if (!f.sigma) fail(text, "missing sigma");
  return NoiseDensity::generalized_gaussian(f.beta, *f.sigma * *f.sigma);
}

Quantizer parse_quantizer(std::string_view text, const NoiseDensity& ambient) {
  const std::string_view t = trim(text);
  if (t == "threshold") return Quantizer::threshold();
  if (t == "sine") return Quantizer::sine();
  const auto colon = t.find(':');
  const std::string_view head = t.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : t.substr(colon + 1);
  if (head == "aupl") {
    const Spec s = split(t);
    only_keys(text, s, {"file"});
    if (!s.keys.contains("file")) fail(text, "missing file");
    return Quantizer::piecewise_linear(load_aupl_file(s.keys.at("file")));
  }
  if (head == "dither") {
    // The family value may carry its own "head:key=value", so split by hand.
    std::optional<std::string> family;
    std::optional<double> sigma;
    std::string_view rest = body;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.starts_with("family=")) {
        family = std::string(item.substr(7));
      } else if (item.starts_with("sigma=")) {
        sigma = to_number(text, "sigma", item.substr(6));
      } else {
        fail(text, fmt::format("unexpected item '{}'", item));
      }
    }
    if (!sigma) fail(text, "missing sigma");
    if (!(*sigma > 0.0)) {
      throw Error(ErrorKind::kInvalidParameter, fmt::format("dither sigma must be positive (got {})", *sigma));
    }
    double beta = 0.0;
    if (family) {
      const FamilySpec f = parse_family(*family);
      if (f.sigma) fail(text, "the dither family takes no sigma of its own");
      beta = f.beta;
    } else if (ambient.has_density()) {
      beta = ambient.beta();
    } else {
      fail(text, "dither family is required when the noise is a point mass");
    }
    return Quantizer::dithered(NoiseDensity::generalized_gaussian(beta, 1.0), *sigma * *sigma);
  }
  fail(text, fmt::format("unknown quantizer '{}'", head));
}

std::string describe(const NoiseDensity& d) {
  if (!d.has_density()) return "pointmass";
  return fmt::format("gg:beta={},sigma={}", d.beta(), d.sigma());
}

}  // namespace qdesign
