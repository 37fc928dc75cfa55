#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "error_kind.hpp"
#include "qdesign/dense_qp.hpp"
#include "qdesign/golden.hpp"
#include "qdesign/parallel.hpp"
#include "qdesign/quadrature.hpp"
#include "qdesign/rng.hpp"

using qdesign::ErrorKind;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  // A 15-point rule is exact through degree 29.
  for (int p = 0; p <= 29; ++p) {
    const double got = qdesign::detail::gl_panel([p](double x) { return std::pow(x, p); }, -1.0, 1.0);
    const double want = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(got, want, 1e-14) << p;
  }
}

TEST(Quadrature, SmoothIntegrals) {
  EXPECT_NEAR(qdesign::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-12);
  EXPECT_NEAR(qdesign::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0), std::sqrt(std::numbers::pi),
              1e-12);
}

TEST(Quadrature, KinkedIntegrandWithBreakpoints) {
  const double cuts[] = {0.3};
  const double got = qdesign::integrate_piecewise([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, cuts);
  EXPECT_NEAR(got, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-14);
}

TEST(Quadrature, ReportsNonFiniteIntegrand) {
  EXPECT_EQ(error_kind_of([] { (void)qdesign::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0); }),
            ErrorKind::kNumericalFailure);
}

TEST(Golden, FindsParabolaMinimum) {
  const auto r = qdesign::golden_section_minimize([](double x) { return (x - 0.7) * (x - 0.7) + 1.0; }, 0.0, 3.0, 1e-8);
  EXPECT_NEAR(r.x, 0.7, 1e-7);
  EXPECT_NEAR(r.fx, 1.0, 1e-12);
}

TEST(Golden, ToleratesInfiniteValues) {
  const auto r = qdesign::golden_section_minimize(
      [](double x) { return x < 0.2 ? std::numeric_limits<double>::infinity() : std::cosh(x - 1.1); }, 0.0, 3.0,
      1e-7);
  EXPECT_NEAR(r.x, 1.1, 1e-6);
}

TEST(DenseQp, BoxAndCoupling) {
  // min (x-3)^2 + (y-2)^2 s.t. x + y <= 4, x >= 0, y >= 0 -> (2.5, 1.5).
  qdesign::QpProblem p;
  p.G = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  p.g0 = Eigen::Vector2d(-6.0, -4.0);
  p.CI.resize(2, 3);
  p.CI << -1.0, 1.0, 0.0, -1.0, 0.0, 1.0;
  p.ci0 = Eigen::Vector3d(4.0, 0.0, 0.0);
  const auto s = qdesign::solve_qp(p);
  ASSERT_TRUE(s.ok) << s.message;
  EXPECT_NEAR(s.x[0], 2.5, 1e-12);
  EXPECT_NEAR(s.x[1], 1.5, 1e-12);
  EXPECT_NEAR(s.multipliers[0], 1.0, 1e-12);
  EXPECT_EQ(s.multipliers[1], 0.0);
}

TEST(DenseQp, InfeasibleIsReported) {
  qdesign::QpProblem p;
  p.G = Eigen::MatrixXd::Identity(1, 1);
  p.g0 = Eigen::VectorXd::Zero(1);
  p.CI.resize(1, 2);
  p.CI << 1.0, -1.0;
  p.ci0 = Eigen::Vector2d(-2.0, 1.0);  // x >= 2 and x <= 1
  EXPECT_FALSE(qdesign::solve_qp(p).ok);
}

TEST(DenseQp, RandomProblemsSatisfyKkt) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6, m = 10;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = z(rng);
    qdesign::QpProblem p;
    p.G = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    p.g0.resize(n);
    for (int i = 0; i < n; ++i) p.g0[i] = z(rng);
    p.CI.resize(n, m);
    p.ci0.resize(m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) p.CI(i, j) = z(rng);
      p.ci0[j] = 1.0 + std::abs(z(rng));  // x = 0 is strictly feasible
    }
    const auto s = qdesign::solve_qp(p);
    ASSERT_TRUE(s.ok) << s.message;
    const Eigen::VectorXd slack = p.CI.transpose() * s.x + p.ci0;
    const Eigen::VectorXd stat = p.G * s.x + p.g0 - p.CI * s.multipliers;
    EXPECT_LT(stat.lpNorm<Eigen::Infinity>(), 1e-9);
    for (int j = 0; j < m; ++j) {
      EXPECT_GE(slack[j], -1e-9);
      EXPECT_GE(s.multipliers[j], 0.0);
      EXPECT_LT(std::abs(slack[j] * s.multipliers[j]), 1e-9);
    }
  }
}

TEST(Philox, KnownAnswers) {
  using P = qdesign::Philox4x32;
  const auto zero = P::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero, (P::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const auto ones = P::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones, (P::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  const auto pi = P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi, (P::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  qdesign::Philox4x32 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    (void)c();
    (void)d();
  }
  qdesign::Philox4x32 a2(42, 7), c2(42, 8), d2(43, 7);
  EXPECT_NE(a2(), c2());
  EXPECT_NE(qdesign::Philox4x32(42, 7)(), d2());
}

TEST(Philox, UniformMoments) {
  qdesign::Philox4x32 r(1, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  qdesign::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    qdesign::parallel_for(100, [](std::size_t i) {
      if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "37");
  }
}
