#include "qdesign/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "qdesign/errors.hpp"

namespace qdesign {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cell index and local offset on a uniform grid of n cells over [lo, lo+width].
std::pair<std::size_t, double> locate(double x, double lo, double width, std::size_t n) {
  const double h = width / static_cast<double>(n);
  const double p = (x - lo) / h;
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor(p)));
  k = std::min(k, n - 1);
  return {k, x - (lo + static_cast<double>(k) * h)};
}

}  // namespace

Quantizer Quantizer::threshold() { return Quantizer(Threshold{}); }

Quantizer Quantizer::sine() { return Quantizer(Sine{}); }

Quantizer Quantizer::dithered(const NoiseDensity& dither_family, double dither_sigma2) {
  if (!(dither_sigma2 > 0.0) || !std::isfinite(dither_sigma2)) {
    throw Error(ErrorKind::kInvalidParameter,
                fmt::format("dither variance must be positive, got {}", dither_sigma2));
  }
  if (!dither_family.has_density()) {
    throw Error(ErrorKind::kInvalidParameter, "dither family must have a density");
  }
  return Quantizer(Dithered{dither_family.with_sigma2(dither_sigma2)});
}

Quantizer Quantizer::piecewise_linear(std::vector<double> slopes) {
  const std::size_t k_intervals = slopes.size();
  if (k_intervals == 0) {
    throw InvalidSlopesError(0, "slope vector must be non-empty");
  }
  const double K = static_cast<double>(k_intervals);
  std::vector<double> nodes(k_intervals + 1, 0.0);
  double prefix = 0.0;
  for (std::size_t k = 0; k < k_intervals; ++k) {
    if (!std::isfinite(slopes[k])) {
      throw InvalidSlopesError(k + 1, fmt::format("slope {} is not finite", k + 1));
    }
    prefix += slopes[k];
    if (prefix < -kSlopeSumTolerance || prefix > K + kSlopeSumTolerance) {
      throw InvalidSlopesError(
          k + 1, fmt::format("prefix sum {} = {} outside [0, {}]", k + 1, prefix, K));
    }
    nodes[k + 1] = nodes[k] + slopes[k] / K;
  }
  if (std::abs(prefix - 0.5 * K) > kSlopeSumTolerance) {
    throw InvalidSlopesError(
        k_intervals, fmt::format("slopes sum to {}, continuity at 0 needs {}", prefix, 0.5 * K));
  }
  return Quantizer(PiecewiseLinear{std::move(slopes), std::move(nodes)});
}

Quantizer Quantizer::tabulated(double radius, std::vector<double> values) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("radius must be positive, got {}", radius));
  }
  if (values.size() < 2) {
    throw Error(ErrorKind::kInvalidParameter, "tabulated quantizer needs at least two nodes");
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kInvalidParameter, fmt::format("node value {} outside [0, 1]", v));
    }
  }
  if (std::abs(values.back() - 0.5) > 1e-12) {
    throw Error(ErrorKind::kInvalidParameter, "value at the origin must be 1/2");
  }
  values.back() = 0.5;
  return Quantizer(Tabulated{radius, std::move(values)});
}

Quantizer Quantizer::complement(const Quantizer& q) {
  return Quantizer(Complement{std::make_shared<const Quantizer>(q)});
}

std::string Quantizer::name() const {
  return std::visit(
      Overloaded{
          [](const Threshold&) -> std::string { return "threshold"; },
          [](const Sine&) -> std::string { return "sine"; },
          [](const Dithered&) -> std::string { return "dither"; },
          [](const PiecewiseLinear&) -> std::string { return "aupl"; },
          [](const Tabulated&) -> std::string { return "tabulated"; },
          [](const Truncated& t) -> std::string { return "truncated(" + t.inner->name() + ")"; },
          [](const Complement& c) -> std::string { return "complement(" + c.inner->name() + ")"; },
      },
      v_);
}

double Quantizer::evaluate_nonpositive(double x) const {
  return std::visit(
      Overloaded{
          [x](const Threshold&) { return x >= 0.0 ? 1.0 : 0.0; },
          [x](const Sine&) {
            if (x <= -1.0) return 0.0;
            return 0.5 * (1.0 + std::sin(0.5 * std::numbers::pi * x));
          },
          [x](const Dithered& d) { return d.dither.cdf(x); },
          [x](const PiecewiseLinear& p) {
            if (x < -1.0) return 0.0;
            if (x == 0.0) return 0.5;
            const auto [k, off] = locate(x, -1.0, 1.0, p.slopes.size());
            return std::clamp(p.nodes[k] + p.slopes[k] * off, 0.0, 1.0);
          },
          [x](const Tabulated& t) {
            if (x < -t.radius) return 0.0;
            if (x == 0.0) return 0.5;
            const std::size_t n = t.values.size() - 1;
            const auto [k, off] = locate(x, -t.radius, t.radius, n);
            const double h = t.radius / static_cast<double>(n);
            return std::clamp(t.values[k] + (t.values[k + 1] - t.values[k]) * off / h, 0.0, 1.0);
          },
          [x](const Truncated& t) { return x < -1.0 ? 0.0 : t.inner->evaluate(x); },
          [x](const Complement& c) { return 1.0 - c.inner->evaluate(x); },
      },
      v_);
}

double Quantizer::evaluate(double x) const {
  if (std::holds_alternative<Threshold>(v_)) return x >= 0.0 ? 1.0 : 0.0;
  if (x > 0.0) return 1.0 - evaluate_nonpositive(-x);
  return evaluate_nonpositive(x);
}

double Quantizer::derivative_nonpositive(double x) const {
  return std::visit(
      Overloaded{
          [x](const Threshold&) { return x == 0.0 ? kInf : 0.0; },
          [x](const Sine&) {
            if (x <= -1.0) return 0.0;
            return 0.25 * std::numbers::pi * std::cos(0.5 * std::numbers::pi * x);
          },
          [x](const Dithered& d) { return d.dither.pdf(x); },
          [x](const PiecewiseLinear& p) {
            if (x < -1.0) return 0.0;
            return p.slopes[locate(x, -1.0, 1.0, p.slopes.size()).first];
          },
          [x](const Tabulated& t) {
            if (x < -t.radius) return 0.0;
            const std::size_t n = t.values.size() - 1;
            const std::size_t k = locate(x, -t.radius, t.radius, n).first;
            return (t.values[k + 1] - t.values[k]) * static_cast<double>(n) / t.radius;
          },
          [x](const Truncated& t) { return x < -1.0 ? 0.0 : t.inner->derivative(x); },
          [x](const Complement& c) { return -c.inner->derivative(x); },
      },
      v_);
}

double Quantizer::derivative(double x) const {
  // gamma' is even for antisymmetric gamma.
  return derivative_nonpositive(x > 0.0 ? -x : x);
}

double Quantizer::lower() const {
  return std::visit(
      Overloaded{
          [](const Threshold&) { return 0.0; },
          [](const Dithered&) { return -kInf; },
          [](const Tabulated& t) { return -t.radius; },
          [](const Complement& c) { return c.inner->lower(); },
          [](const auto&) { return -1.0; },
      },
      v_);
}

double Quantizer::upper() const { return -lower(); }

double Quantizer::left_value() const {
  if (const auto* c = std::get_if<Complement>(&v_)) return 1.0 - c->inner->left_value();
  return 0.0;
}

double Quantizer::right_value() const { return 1.0 - left_value(); }

bool Quantizer::is_unit_support() const {
  return std::visit(Overloaded{
                        [](const Dithered&) { return false; },
                        [](const Complement&) { return false; },
                        [](const Tabulated& t) { return t.radius <= 1.0; },
                        [](const auto&) { return true; },
                    },
                    v_);
}

std::vector<double> Quantizer::breakpoints() const {
  std::vector<double> out;
  auto mirrored_grid = [&out](double lo, std::size_t n) {
    // Nodes lo + k*|lo|/n on [lo, 0] and their mirror images.
    const double h = -lo / static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
      const double x = lo + static_cast<double>(k) * h;
      out.push_back(x);
      out.push_back(-x);
    }
  };
  std::visit(Overloaded{
                 [&](const Threshold&) { out.push_back(0.0); },
                 [&](const Sine&) {},
                 [&](const Dithered&) { out.push_back(0.0); },
                 [&](const PiecewiseLinear& p) { mirrored_grid(-1.0, p.slopes.size()); },
                 [&](const Tabulated& t) { mirrored_grid(-t.radius, t.values.size() - 1); },
                 [&](const Truncated& t) {
                   out = t.inner->breakpoints();
                   std::erase_if(out, [](double x) { return x <= -1.0 || x >= 1.0; });
                   out.push_back(-1.0);
                   out.push_back(1.0);
                 },
                 [&](const Complement& c) { out = c.inner->breakpoints(); },
             },
             v_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t Quantizer::grid_intervals() const {
  if (const auto* p = std::get_if<PiecewiseLinear>(&v_)) return p->slopes.size();
  throw Error(ErrorKind::kInvalidParameter, "not a piecewise-linear quantizer");
}

std::span<const double> Quantizer::slopes() const {
  if (const auto* p = std::get_if<PiecewiseLinear>(&v_)) return p->slopes;
  throw Error(ErrorKind::kInvalidParameter, "not a piecewise-linear quantizer");
}

Quantizer truncate_to_unit_support(const Quantizer& q) {
  if (q.is_unit_support()) return q;
  return Quantizer(Quantizer::Truncated{std::make_shared<const Quantizer>(q)});
}

int sample_output(const Quantizer& q, double x, double u) { return u < q.evaluate(x) ? 1 : 0; }

}  // namespace qdesign
