#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "error_kind.hpp"
#include "oracles.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/noise.hpp"

using qdesign::Error;
using qdesign::ErrorKind;
using qdesign::NoiseDensity;

TEST(NoisePdf, GaussianAtZero) {
  EXPECT_NEAR(NoiseDensity::gaussian(1.0).pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(NoisePdf, LaplacianAtZero) {
  EXPECT_NEAR(NoiseDensity::laplacian(2.0).pdf(0.0), 0.5, 1e-15);
}

TEST(NoisePdf, MatchesIndependentFormula) {
  for (double beta : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    for (double s2 : {0.01, 1.0, 9.0}) {
      const auto d = NoiseDensity::generalized_gaussian(beta, s2);
      for (double w : {-2.0, -0.3, 0.0, 0.1, 0.7, 1.9}) {
        EXPECT_NEAR(d.pdf(w), oracle::gg_pdf(w, beta, s2), 1e-12 * (1.0 + oracle::gg_pdf(w, beta, s2)))
            << beta << " " << s2 << " " << w;
      }
    }
  }
}

TEST(NoisePdf, Symmetric) {
  const auto d = NoiseDensity::generalized_gaussian(1.7, 0.6);
  for (double w : {0.01, 0.5, 1.3, 4.0}) EXPECT_EQ(d.pdf(w), d.pdf(-w));
}

TEST(NoisePdf, PointMassHasNoDensity) {
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::point_mass().pdf(0.0); }), ErrorKind::kNoDensity);
}

TEST(NoiseDensityFactory, RejectsBadParameters) {
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::generalized_gaussian(0.5, 1.0); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::gaussian(0.0); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::gaussian(-1.0); }), ErrorKind::kInvalidParameter);
}

TEST(NoiseDensityFactory, ScaleFromVariance) {
  // alpha^2 = sigma^2 Gamma(1/b) / Gamma(3/b): sqrt(2) sigma for the Gaussian, sigma/sqrt(2) for the Laplacian.
  EXPECT_NEAR(NoiseDensity::gaussian(4.0).alpha(), 2.0 * std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(NoiseDensity::laplacian(4.0).alpha(), 2.0 / std::numbers::sqrt2, 1e-14);
}

TEST(NoiseCdf, Examples) {
  EXPECT_EQ(NoiseDensity::gaussian(1.0).cdf(0.0), 0.5);
  EXPECT_EQ(NoiseDensity::laplacian(0.3).cdf(0.0), 0.5);
  EXPECT_EQ(NoiseDensity::generalized_gaussian(3.0, 2.0).cdf(0.0), 0.5);
  EXPECT_NEAR(NoiseDensity::gaussian(1.0).cdf(1.0), 0.841344746068543, 1e-14);
  EXPECT_EQ(NoiseDensity::point_mass().cdf(-0.5), 0.0);
  EXPECT_EQ(NoiseDensity::point_mass().cdf(0.0), 1.0);
}

TEST(NoiseCdf, ClosedFormOracles) {
  for (double w : {-3.0, -1.0, -0.2, 0.4, 2.5}) {
    EXPECT_NEAR(NoiseDensity::gaussian(0.49).cdf(w), oracle::normal_cdf(w, 0.7), 1e-15);
    EXPECT_NEAR(NoiseDensity::laplacian(0.49).cdf(w), oracle::laplace_cdf(w, 0.49), 1e-15);
  }
}

TEST(NoiseCdf, GeneralShapeMatchesIntegratedPdf) {
  for (double beta : {1.5, 3.0, 4.0}) {
    const auto d = NoiseDensity::generalized_gaussian(beta, 1.0);
    for (double w : {-2.0, -0.8, -0.1}) {
      // The density's derivative is singular at 0 for beta < 2, so Simpson needs a fine mesh.
      const double ref =
          0.5 - oracle::simpson([&](double x) { return oracle::gg_pdf(x, beta, 1.0); }, w, 0.0, 200000);
      EXPECT_NEAR(d.cdf(w), ref, 1e-11) << beta << " " << w;
    }
  }
}

TEST(NoiseCdf, ReflectionIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const NoiseDensity ds[] = {NoiseDensity::gaussian(0.3), NoiseDensity::laplacian(2.0),
                             NoiseDensity::generalized_gaussian(1.5, 1.0),
                             NoiseDensity::generalized_gaussian(4.0, 0.01)};
  for (const auto& d : ds) {
    for (int i = 0; i < 100; ++i) {
      const double w = u(rng);
      EXPECT_EQ(d.cdf(w) + d.cdf(-w), 1.0) << w;
    }
  }
}

TEST(NoiseCdf, Monotone) {
  const auto d = NoiseDensity::generalized_gaussian(2.5, 0.2);
  double prev = 0.0;
  for (double w = -3.0; w <= 3.0; w += 0.01) {
    const double c = d.cdf(w);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(NoiseDerivative, GaussianExamples) {
  const auto d = NoiseDensity::gaussian(1.0);
  EXPECT_NEAR(d.pdf_derivative(1.0), -0.241970724519143, 1e-14);
  EXPECT_NEAR(d.pdf_derivative(-1.0), 0.241970724519143, 1e-14);
  EXPECT_EQ(d.pdf_derivative(0.0), 0.0);
  EXPECT_EQ(NoiseDensity::generalized_gaussian(1.5, 1.0).pdf_derivative(0.0), 0.0);
}

TEST(NoiseDerivative, LaplacianCuspIsAnError) {
  const auto d = NoiseDensity::laplacian(1.0);
  EXPECT_EQ(error_kind_of([&] { (void)d.pdf_derivative(0.0); }), ErrorKind::kNotDifferentiable);
  EXPECT_LT(d.pdf_derivative(0.5), 0.0);
  EXPECT_GT(d.pdf_derivative(-0.5), 0.0);
  EXPECT_EQ(d.pdf_derivative_ae(0.0), 0.0);
}

TEST(NoiseDerivative, MatchesCentralDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double beta : {1.5, 2.0, 4.0}) {
    const auto d = NoiseDensity::generalized_gaussian(beta, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double w = u(rng);
      const double fd = oracle::central_difference([&](double x) { return d.pdf(x); }, w, 1e-5);
      EXPECT_NEAR(d.pdf_derivative(w), fd, 1e-6 * std::max(std::abs(fd), 1e-3)) << beta << " " << w;
    }
  }
}

TEST(NoiseMoments, OneSidedMean) {
  EXPECT_NEAR(NoiseDensity::gaussian(1.0).normalized_one_sided_mean(), 1.0 / std::sqrt(2.0 * std::numbers::pi),
              1e-14);
  EXPECT_NEAR(NoiseDensity::laplacian(1.0).normalized_one_sided_mean(), 1.0 / (2.0 * std::numbers::sqrt2), 1e-14);
}

TEST(NoiseMoments, OneSidedMeanMatchesQuadrature) {
  for (double beta : {1.0, 1.5, 2.0, 4.0}) {
    const double s2 = 2.0;
    const auto d = NoiseDensity::generalized_gaussian(beta, s2);
    const double ref =
        oracle::simpson([&](double w) { return w * oracle::gg_pdf(w, beta, s2); }, 0.0, 40.0, 40000) / std::sqrt(s2);
    EXPECT_NEAR(d.normalized_one_sided_mean(), ref, 1e-9) << beta;
  }
}

TEST(NoiseMoments, OneSidedMeanBelowHalf) {
  for (double beta : {1.0, 1.2, 2.0, 3.0, 8.0, 50.0}) {
    for (double s2 : {0.01, 1.0, 100.0}) {
      EXPECT_LT(NoiseDensity::generalized_gaussian(beta, s2).normalized_one_sided_mean(), 0.5);
    }
  }
}

TEST(NoiseMoments, FourthMoment) {
  EXPECT_NEAR(NoiseDensity::gaussian(1.0).normalized_fourth_moment(), 3.0, 1e-13);
  EXPECT_NEAR(NoiseDensity::laplacian(1.0).normalized_fourth_moment(), 6.0, 1e-13);
  for (double beta : {1.0, 1.5, 2.0, 4.0}) {
    EXPECT_NEAR(NoiseDensity::generalized_gaussian(beta, 0.1).normalized_fourth_moment(),
                NoiseDensity::generalized_gaussian(beta, 10.0).normalized_fourth_moment(), 1e-12);
    const double ref =
        oracle::simpson([&](double w) { return std::pow(w, 4) * oracle::gg_pdf(w, beta, 1.0); }, -40.0, 40.0, 40000,
                        {0.0});
    EXPECT_NEAR(NoiseDensity::generalized_gaussian(beta, 1.0).normalized_fourth_moment(), ref, 1e-8) << beta;
  }
}

TEST(NoiseMoments, PointMassHasNoMoments) {
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::point_mass().normalized_one_sided_mean(); }), ErrorKind::kNoDensity);
  EXPECT_EQ(error_kind_of([] { (void)NoiseDensity::point_mass().normalized_fourth_moment(); }), ErrorKind::kNoDensity);
}

TEST(NoiseProperties, NormalizedAndCorrectVariance) {
  for (double beta : {1.0, 1.5, 2.0, 4.0}) {
    for (double sigma : {0.05, 1.0, 8.0}) {
      const auto d = NoiseDensity::generalized_gaussian(beta, sigma * sigma);
      const auto f = [&](double w) { return d.pdf(w); };
      // +-10 sigma leaves 7e-7 of Laplacian mass outside, so integrate further out.
      const double mass = oracle::simpson(f, -60 * sigma, 60 * sigma, 60000, {0.0});
      EXPECT_NEAR(mass, 1.0, 1e-8) << beta << " " << sigma;
      const double var =
          oracle::simpson([&](double w) { return w * w * d.pdf(w); }, -60 * sigma, 60 * sigma, 60000, {0.0});
      EXPECT_NEAR(var / (sigma * sigma), 1.0, 1e-6) << beta << " " << sigma;
    }
  }
}

TEST(ThresholdCondition, HoldsForLargeVariance) {
  EXPECT_TRUE(qdesign::check_threshold_optimality_condition(NoiseDensity::gaussian(1.0)).holds);
  EXPECT_TRUE(qdesign::check_threshold_optimality_condition(NoiseDensity::gaussian(4.0)).holds);
}

TEST(ThresholdCondition, FailsWithWitnessForSmallVariance) {
  const auto d = NoiseDensity::gaussian(0.25);
  const auto c = qdesign::check_threshold_optimality_condition(d);
  ASSERT_FALSE(c.holds);
  const auto& w = c.worst;
  EXPECT_GE(w.w, 0.0);
  EXPECT_LE(w.w, 1.0);
  EXPECT_GE(w.z, 0.0);
  EXPECT_LE(w.z, 1.0);
  EXPECT_GT(d.pdf_derivative(w.w - w.z) + d.pdf_derivative(w.w + w.z), 0.0);
  EXPECT_NEAR(w.value, d.pdf_derivative(w.w - w.z) + d.pdf_derivative(w.w + w.z), 1e-15);
}

TEST(ThresholdCondition, MonotoneInVariance) {
  bool seen_true = false;
  for (double s2 : {0.1, 0.25, 0.5, 0.8, 0.9, 0.95, 1.0, 1.5, 4.0, 16.0}) {
    const bool holds = qdesign::check_threshold_optimality_condition(NoiseDensity::gaussian(s2), 1e-2).holds;
    if (seen_true) EXPECT_TRUE(holds) << s2;
    seen_true = seen_true || holds;
  }
  EXPECT_TRUE(seen_true);
}

TEST(ThresholdCondition, NeedsDifferentiableDensity) {
  EXPECT_EQ(error_kind_of([] { (void)qdesign::check_threshold_optimality_condition(NoiseDensity::laplacian(1.0)); }),
            ErrorKind::kNotDifferentiable);
}
