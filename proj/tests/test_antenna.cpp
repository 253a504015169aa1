#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sarsweep/antenna.hpp"

using namespace sarsweep;
using namespace sarsweep::antenna;

namespace {

constexpr double c0 = 299792458.0;
constexpr double f_low = 9551e6;
constexpr double f_high = 9614.5e6;

ArrayGeometry linear(int m, double a) { return {m, 1, a, a}; }

// Term-by-term reference, written independently of the library.
std::complex<double> brute_af(int M, int N, double a, double b, double alpha, double beta, double f,
                              double theta, double phi) {
  const double k = 2.0 * M_PI * f / c0;
  std::complex<double> s = 0.0;
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n) {
      const double ph = m * (k * a * std::sin(theta) * std::cos(phi) + alpha) +
                        n * (k * b * std::sin(theta) * std::sin(phi) + beta);
      s += std::complex<double>(std::cos(ph), std::sin(ph));
    }
  return s;
}

}  // namespace

TEST(ArrayFactor, SingleElementIsOne) {
  ExcitationPlan exc;
  exc.alpha_phase = 0.7;
  exc.beta_phase = -1.1;
  const auto v = array_factor({1, 1, 0.01, 0.02}, exc, 9.6e9, 0.4, 1.3);
  EXPECT_DOUBLE_EQ(v.real(), 1.0);
  EXPECT_DOUBLE_EQ(v.imag(), 0.0);
}

TEST(ArrayFactor, BoresightSumOfHundredElements) {
  const auto v = array_factor(linear(100, 0.015), {}, f_low, 0.0, 0.0);
  EXPECT_NEAR(v.real(), 100.0, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(ArrayFactor, FourTermExplicitSum) {
  ExcitationPlan exc;
  exc.alpha_phase = 0.3;
  const double theta = 10.0 * M_PI / 180.0;
  const double k = 2.0 * M_PI * f_low / c0;
  const double psi = k * 0.015 * std::sin(theta) + 0.3;
  const std::complex<double> expected = 1.0 + std::polar(1.0, psi) + std::polar(1.0, 2 * psi) + std::polar(1.0, 3 * psi);
  const auto v = array_factor(linear(4, 0.015), exc, f_low, theta, 0.0);
  EXPECT_NEAR(std::abs(v - expected), 0.0, 1e-12);
}

TEST(ArrayFactor, PlanarMatchesBruteForce) {
  ExcitationPlan exc;
  exc.alpha_phase = 0.2;
  exc.beta_phase = -0.45;
  const auto v = array_factor({5, 3, 0.014, 0.021}, exc, 9.7e9, 0.13, 0.8);
  const auto ref = brute_af(5, 3, 0.014, 0.021, 0.2, -0.45, 9.7e9, 0.13, 0.8);
  EXPECT_NEAR(std::abs(v - ref), 0.0, 1e-12);
}

TEST(ArrayFactor, RejectsNonFinite) {
  EXPECT_THROW(array_factor(linear(4, 0.015), {}, NAN, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(array_factor(linear(4, 0.015), {}, f_low, INFINITY, 0.0), std::invalid_argument);
  EXPECT_THROW(array_factor(linear(4, 0.015), {}, -1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(ArrayFactor, RejectsMismatchedMatrices) {
  ExcitationPlan exc;
  exc.amplitudes = CoefficientMatrix(3, 1);
  EXPECT_THROW(array_factor(linear(4, 0.015), exc, f_low, 0.0, 0.0), std::invalid_argument);
}

TEST(NormalizedPattern, BoresightIsOne) {
  for (int m : {1, 2, 7, 100, 256}) EXPECT_DOUBLE_EQ(normalized_pattern(linear(m, 0.015), 0.0, f_low, 0.0), 1.0);
}

TEST(NormalizedPattern, TwoElementHalfWaveEndfireNull) {
  const double lambda = c0 / f_low;
  EXPECT_NEAR(normalized_pattern(linear(2, lambda / 2.0), 0.0, f_low, M_PI / 2.0), 0.0, 1e-12);
}

TEST(NormalizedPattern, MatchesSummationOverSweep) {
  for (int i = -2000; i <= 2000; ++i) {
    const double theta = i * (M_PI / 2.0) / 2000.0;
    const double closed = normalized_pattern(linear(100, 0.015), 0.0, f_low, theta);
    const double sum = std::abs(brute_af(100, 1, 0.015, 0.015, 0.0, 0.0, f_low, theta, 0.0)) / 100.0;
    // Relative where the pattern is well above the summation's rounding floor.
    const double tol = 1e-9 * std::max(sum, 1e-4);
    EXPECT_NEAR(closed, sum, tol) << "theta=" << theta;
  }
}

TEST(NormalizedPattern, FuzzBoundedInUnitInterval) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> mdist(1, 256);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = normalized_pattern(linear(mdist(rng), 0.005 + 0.03 * std::abs(u(rng))), 3.0 * u(rng),
                                        8e9 + 3e9 * std::abs(u(rng)), M_PI / 2.0 * u(rng));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(NormalizedPattern, UnityOnlyOnMainOrGratingLobes) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double k = 2.0 * M_PI * f_low / c0;
  for (int i = 0; i < 2000; ++i) {
    const double theta = M_PI / 2.0 * u(rng);
    const double alpha = 2.0 * u(rng);
    const double v = normalized_pattern(linear(16, 0.015), alpha, f_low, theta);
    const double psi = k * 0.015 * std::sin(theta) + alpha;
    const double wrapped = std::remainder(psi, 2.0 * M_PI);
    if (std::abs(wrapped) > 1e-3) EXPECT_LT(v, 1.0 - 1e-9);
  }
}

TEST(NullAngles, FirstNullAtNinePointFiveGhz) {
  const auto nulls = null_angles(linear(100, 0.015), 0.0, f_low, 1, 1);
  ASSERT_EQ(nulls.size(), 1u);
  const double expected = std::asin(c0 / f_low / 1.5);
  EXPECT_NEAR(nulls[0], expected, 1e-15);
  EXPECT_NEAR(nulls[0] * 180.0 / M_PI, 1.199, 1e-3);

  // Cross-check against a dense argmin of the closed-form pattern near the prediction.
  double best = 1.0, best_theta = 0.0;
  for (int i = -5000; i <= 5000; ++i) {
    const double th = expected + i * 1e-8;
    const double v = normalized_pattern(linear(100, 0.015), 0.0, f_low, th);
    if (v < best) {
      best = v;
      best_theta = th;
    }
  }
  EXPECT_NEAR(best_theta, expected, 2e-8);
}

TEST(NullAngles, ExcludesMainLobeAndGratingPeaks) {
  const auto around_zero = null_angles(linear(100, 0.015), 0.0, f_low, 0, 0);
  EXPECT_TRUE(around_zero.empty());
  const auto with_gratings = null_angles(linear(4, 0.1), 0.0, f_low, -12, 12);
  for (double t : with_gratings) EXPECT_LT(normalized_pattern(linear(4, 0.1), 0.0, f_low, t), 1e-6);
  EXPECT_EQ(with_gratings.size(), 24u - 6u);
}

TEST(NullAngles, EmptyWhenNoAdmissibleK) {
  EXPECT_TRUE(null_angles(linear(2, 0.001), 0.0, f_low, 1, 1).empty());
}

TEST(NullAngles, AscendingAndOnPatternZeros) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(u(rng) * 120);
    const auto geom = linear(m, 0.005 + 0.03 * u(rng));
    const double alpha = 4.0 * (u(rng) - 0.5);
    const double f = 8e9 + 4e9 * u(rng);
    const auto nulls = null_angles(geom, alpha, f, -3 * m, 3 * m);
    for (std::size_t i = 0; i < nulls.size(); ++i) {
      if (i > 0) EXPECT_LT(nulls[i - 1], nulls[i]);
      EXPECT_LT(normalized_pattern(geom, alpha, f, nulls[i]), 1e-6);
    }
  }
}

TEST(NullAngles, SpacingScalesWithWavelength) {
  const auto a = null_angles(linear(100, 0.015), 0.0, f_low, 1, 2);
  const auto b = null_angles(linear(100, 0.015), 0.0, f_high, 1, 2);
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  const double ratio = (b[1] - b[0]) / (a[1] - a[0]);
  EXPECT_NEAR(ratio, 9551.0 / 9614.5, 1e-4);
  EXPECT_NEAR(ratio, 0.99340, 2e-5);
}

TEST(NullAngles, SmallAngleSpacingRatioProperty) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 40 + static_cast<int>(u(rng) * 200);
    const auto geom = linear(m, 0.01 + 0.03 * u(rng));
    const double f1 = 8e9 + 4e9 * u(rng);
    const double f2 = 8e9 + 4e9 * u(rng);
    const auto n1 = null_angles(geom, 0.0, f1, 1, m - 1);
    const auto n2 = null_angles(geom, 0.0, f2, 1, m - 1);
    if (n1.size() < 2 || n2.size() < 2 || n1[1] > 5.0 * M_PI / 180.0 || n2[1] > 5.0 * M_PI / 180.0) continue;
    const double ratio = (n1[1] - n1[0]) / (n2[1] - n2[0]);
    EXPECT_NEAR(ratio / (f2 / f1), 1.0, 1e-3);
  }
}

TEST(ElementFactor, IsotropicAndCosine) {
  const auto iso = ElementFactor::isotropic();
  const auto cosine = ElementFactor::cosine_power(2.0);
  for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0}) EXPECT_EQ(iso(t), 1.0);
  EXPECT_NEAR(cosine(0.3), std::pow(std::cos(0.3), 2.0), 1e-15);
  EXPECT_EQ(cosine(M_PI / 2.0 + 0.01), 0.0);
  EXPECT_EQ(cosine(-2.0), 0.0);
  EXPECT_THROW(ElementFactor::cosine_power(-1.0), std::invalid_argument);
}

TEST(CombinedPattern, IsotropicEqualsArrayFactorMagnitude) {
  ExcitationPlan exc;
  exc.alpha_phase = 0.4;
  const auto geom = linear(12, 0.015);
  for (double t : {-0.3, -0.05, 0.0, 0.07, 0.9}) {
    EXPECT_EQ(combined_pattern(ElementFactor::isotropic(), geom, exc, f_low, t, 0.0),
              std::abs(array_factor(geom, exc, f_low, t, 0.0)));
  }
}

TEST(CombinedPattern, CosineNullAtEndfire) {
  EXPECT_NEAR(combined_pattern(ElementFactor::cosine_power(1.0), linear(8, 0.015), {}, f_low, M_PI / 2.0, 0.0), 0.0,
              1e-12);
}

TEST(CombinedPattern, ProductOfIndependentFactors) {
  const double theta = 5.0 * M_PI / 180.0;
  const double ef = std::pow(std::cos(theta), 2.0);
  const double af = std::abs(brute_af(8, 1, 0.015, 0.015, 0.0, 0.0, f_low, theta, 0.0));
  EXPECT_NEAR(combined_pattern(ElementFactor::cosine_power(2.0), linear(8, 0.015), {}, f_low, theta, 0.0), ef * af,
              1e-12);
  EXPECT_NEAR(combined_pattern(ElementFactor::cosine_power(2.0), linear(8, 0.015), {}, f_low, theta, 0.0, true),
              ef * af / 8.0, 1e-12);
}

TEST(SarBeam, BoresightAllUnit) {
  const auto ef = ElementFactor::cosine_power(1.5);
  const auto v = sar_beam_pattern({6, 4, 0.015, 0.02}, {}, ef, f_low, 0.0, 0.0);
  EXPECT_NEAR(v.real(), 24.0, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(SarBeam, ZeroedElementMatchesThreeTermSum) {
  const ArrayGeometry geom{2, 2, 0.015, 0.02};
  ExcitationPlan exc;
  exc.alpha_phase = 0.25;
  exc.beta_phase = -0.6;
  exc.amplitudes = CoefficientMatrix(2, 2);
  exc.error_matrix = CoefficientMatrix(2, 2);
  exc.error_matrix.at(1, 0) = 0.0;
  const double eps = 0.11, az = 0.07;
  const double k = 2.0 * M_PI * f_low / c0;
  auto term = [&](int m, int n) {
    const double ph = m * 0.25 + n * -0.6 + k * std::sin(eps) * std::cos(az) * (n - 0.5) * 0.02 +
                      k * std::cos(eps) * std::sin(az) * (m - 0.5) * 0.015;
    return std::polar(1.0, ph);
  };
  const auto expected = term(0, 0) + term(0, 1) + term(1, 1);
  const auto v = sar_beam_pattern(geom, exc, ElementFactor::isotropic(), f_low, eps, az);
  EXPECT_NEAR(std::abs(v - expected), 0.0, 1e-12);

  // Removing one element subtracts exactly its contribution.
  ExcitationPlan full = exc;
  full.error_matrix = CoefficientMatrix(2, 2);
  const auto vf = sar_beam_pattern(geom, full, ElementFactor::isotropic(), f_low, eps, az);
  EXPECT_NEAR(std::abs((vf - v) - term(1, 0)), 0.0, 1e-12);
}

TEST(SarBeam, ZeroedElementPropertyFuzz) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int M = 1 + static_cast<int>((u(rng) + 1) * 4), N = 1 + static_cast<int>((u(rng) + 1) * 3);
    const ArrayGeometry geom{M, N, 0.015, 0.02};
    ExcitationPlan exc;
    exc.alpha_phase = u(rng);
    exc.beta_phase = u(rng);
    exc.amplitudes = CoefficientMatrix(M, N);
    exc.error_matrix = CoefficientMatrix(M, N);
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N; ++n) exc.amplitudes.at(m, n) = {1.0 + 0.3 * u(rng), 0.3 * u(rng)};
    const int zm = static_cast<int>((u(rng) + 1) / 2 * (M - 1) + 0.5), zn = static_cast<int>((u(rng) + 1) / 2 * (N - 1) + 0.5);
    ExcitationPlan zeroed = exc;
    zeroed.error_matrix.at(zm, zn) = 0.0;
    ExcitationPlan single = exc;
    single.error_matrix = CoefficientMatrix(M, N, 0.0);
    single.error_matrix.at(zm, zn) = 1.0;
    const double eps = 0.3 * u(rng), az = 0.3 * u(rng);
    const auto ef = ElementFactor::cosine_power(1.0);
    const auto diff = sar_beam_pattern(geom, exc, ef, f_low, eps, az) - sar_beam_pattern(geom, zeroed, ef, f_low, eps, az);
    const auto one = sar_beam_pattern(geom, single, ef, f_low, eps, az);
    EXPECT_NEAR(std::abs(diff - one), 0.0, 1e-12);
  }
}

TEST(SarBeam, MatchesCombinedPatternOnPhiZeroCut) {
  // eps = 0, azimuth = theta puts the observation in the x-z plane.
  const ArrayGeometry geom{20, 3, 0.015, 0.02};
  ExcitationPlan exc;
  exc.alpha_phase = 0.35;
  const auto ef = ElementFactor::cosine_power(1.0);
  for (int i = -60; i <= 60; ++i) {
    const double theta = i * 0.02;
    const double ref = combined_pattern(ef, geom, exc, f_low, theta, 0.0);
    const double v = std::abs(sar_beam_pattern(geom, exc, ef, f_low, 0.0, theta));
    EXPECT_NEAR(v, ref, 1e-9 * std::max(ref, 1e-3)) << "theta=" << theta;
  }
}

TEST(SarBeam, RejectsMismatchedMatrix) {
  ExcitationPlan exc;
  exc.error_matrix = CoefficientMatrix(2, 3);
  EXPECT_THROW(sar_beam_pattern({2, 2, 0.015, 0.02}, exc, {}, f_low, 0.0, 0.0), std::invalid_argument);
}

TEST(PatternSample, DbFloorForExactZero) {
  EXPECT_EQ(magnitude_to_db(0.0), -200.0);
  EXPECT_NEAR(magnitude_to_db(0.1), -20.0, 1e-12);
  const auto cut = sample_cut(PatternCutModel(ElementFactor::isotropic(), linear(2, c0 / f_low / 2.0), {}),
                              f_low, {0.0, M_PI / 2.0});
  EXPECT_NEAR(cut[0].magnitude_db, 0.0, 1e-12);
  EXPECT_LT(cut[1].magnitude, 1e-12);
  EXPECT_GE(cut[1].magnitude_db, -200.0);
}

TEST(PatternCutModel, UniformClosedFormMatchesSummationFallback) {
  const auto ef = ElementFactor::cosine_power(1.0);
  ExcitationPlan uniform;
  uniform.alpha_phase = 0.1;
  ExcitationPlan forced = uniform;
  forced.error_matrix = CoefficientMatrix(30, 1);
  forced.error_matrix.at(0, 0) = {1.0, 1e-300};  // not "all ones", forces the summation path
  const PatternCutModel fast(ef, linear(30, 0.015), uniform);
  const PatternCutModel slow(ef, linear(30, 0.015), forced);
  for (int i = -50; i <= 50; ++i) {
    const double t = i * 0.01;
    EXPECT_NEAR(fast(t, f_high), slow(t, f_high), 1e-9 * std::max(slow(t, f_high), 1e-3));
  }
}
