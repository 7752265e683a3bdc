// Tests for kernel LSH: code determinism, collision laws against the series
// and quadrature oracles, Monte Carlo collision rates, and code distances.
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rkl/errors.hpp"
#include "rkl/lsh.hpp"

namespace rkl {
namespace {

constexpr double kPi = 3.141592653589793238462643383279;

TEST(BinaryHash, IdenticalInputsCollideOnEveryBit) {
  const ParticleEnsemble single({0.7}, SupportInterval(0.0, 10.0));
  RandomSource rng(3);
  const BinaryHashFamily family = draw_binary_family(single, 256, 3, rng);
  const std::vector<double> x = {0.4, -1.0, 2.5};
  const HashCode a = binary_hash(family, x);
  const HashCode b = binary_hash(family, x);
  EXPECT_EQ(a.alphabet, 2);
  ASSERT_EQ(a.length(), 256);
  EXPECT_EQ(hamming_distance(a, b), 0);
  for (int s : a.symbols) EXPECT_TRUE(s == 0 || s == 1);
}

TEST(BinaryHash, DeterministicPerSeed) {
  const ParticleEnsemble mixture({0.3, 1.5}, SupportInterval(0.0, 10.0));
  RandomSource rngA(9), rngB(9);
  const BinaryHashFamily fa = draw_binary_family(mixture, 64, 2, rngA);
  const BinaryHashFamily fb = draw_binary_family(mixture, 64, 2, rngB);
  EXPECT_EQ(fa.frequencies, fb.frequencies);
  EXPECT_EQ(fa.phases, fb.phases);
  EXPECT_EQ(fa.thresholds, fb.thresholds);
}

TEST(CollisionCurve, VanishedKernelReachesTheSeriesLimit) {
  // With K(m^2 d^2) = 0 for every m >= 1 the series telescopes exactly to
  // (8/pi^2) * (1/2) = 4/pi^2, even with very few explicit terms.
  const KernelUnderMeasure dead{ParticleEnsemble({5.0}, SupportInterval(0.0, 10.0))};
  const std::vector<double> x = {0.0};
  const std::vector<double> y = {1000.0};  // d^2 = 1e6 kills every kernel term
  EXPECT_NEAR(collision_curve_hK(dead, x, y, 3), 4.0 / (kPi * kPi), 1e-15);
  EXPECT_EQ(collision_curve_hK(dead, x, x, 3), 0.0);  // K(0) = 1 at zero distance
}

TEST(CollisionCurve, SettledTailMatchesMillionTermSum) {
  const KernelUnderMeasure kernel{ParticleEnsemble({0.2, 1.0}, SupportInterval(0.0, 10.0))};
  const std::vector<double> x = {0.0, 0.0};
  const std::vector<double> y = {0.3, 0.0};
  const double d2 = 0.09;

  const int bigT = 1000000;
  double oracle = 0.0;
  for (int m = 1; m <= bigT; ++m) {
    const double md2 = static_cast<double>(m) * m * d2;
    oracle += (1.0 - kernel.valueAtSquaredDistance(md2)) / (4.0 * m * m - 1.0);
  }
  // Beyond bigT the kernel is numerically zero, so the tail sums to exactly
  // 1/(2(2T+1)) by the telescoping identity.
  oracle += 1.0 / (2.0 * (2.0 * bigT + 1.0));
  oracle *= 8.0 / (kPi * kPi);

  const double shortSum = collision_curve_hK(kernel, x, y, 200);
  EXPECT_NEAR(shortSum, oracle, 1e-12);
  // A very short partial sum still lands inside the advertised tail bound.
  EXPECT_LE(std::abs(collision_curve_hK(kernel, x, y, 3) - oracle), hK_tail_bound(3));
  EXPECT_NEAR(hK_tail_bound(3), 8.0 / (kPi * kPi * 5.0), 1e-15);
}

TEST(BinaryHash, HammingRateMatchesCollisionCurve) {
  const ParticleEnsemble single({0.5}, SupportInterval(0.0, 10.0));
  const KernelUnderMeasure kernel{single};
  const std::vector<double> x = {0.0, 0.0};
  const std::vector<double> y = {1.2, 0.0};
  RandomSource rng(31);
  const int bits = 100000;
  const BinaryHashFamily family = draw_binary_family(single, bits, 2, rng);
  const HashCode cx = binary_hash(family, x);
  const HashCode cy = binary_hash(family, y);
  const double rate = static_cast<double>(hamming_distance(cx, cy)) / bits;
  const double expected = collision_curve_hK(kernel, x, y, 50000);
  // Monte Carlo tolerance: ~4.5 standard errors of a Bernoulli(expected) mean.
  const double se = std::sqrt(expected * (1.0 - expected) / bits);
  EXPECT_NEAR(rate, expected, 4.5 * se);
}

TEST(PsiQ, SaturatedKernelAlwaysCollides) {
  EXPECT_EQ(psi_q(1.0, 5, 1e-9), 1.0);
  EXPECT_EQ(psi_q(1.3, 5, 1e-9), 1.0);
}

TEST(PsiQ, LargeAlphabetLimitAtZeroKernel) {
  // Psi_q(0) = 1 - 2/(sqrt(pi) q) + O(e^{-q^2/4}) for large q.
  const int q = 10000;
  EXPECT_NEAR(psi_q(0.0, q, 1e-10), 1.0 - 2.0 / (std::sqrt(kPi) * q), 1e-6);
}

TEST(PsiQ, MatchesDenseTrapezoidQuadrature) {
  const double u = 0.5;
  const int q = 10;
  const double a = 1.0 - u;
  const double norm = 1.0 / std::sqrt(kPi * a);
  const auto integrand = [&](double s) {
    return norm * std::exp(-s * s / (4.0 * a)) * (1.0 - s / q);
  };
  const int n = 1000000;
  const double h = static_cast<double>(q) / n;
  double sum = 0.5 * (integrand(0.0) + integrand(q));
  for (int i = 1; i < n; ++i) sum += integrand(i * h);
  sum *= h;
  EXPECT_NEAR(psi_q(u, q, 1e-10), sum, 1e-8);
}

TEST(PsiQ, MonotoneInKernelValue) {
  double prev = 0.0;
  for (double u : {0.0, 0.2, 0.5, 0.8, 0.95}) {
    const double v = psi_q(u, 4, 1e-9);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1.0);
}

TEST(PsiQ, RejectsBadArguments) {
  EXPECT_THROW(psi_q(0.5, 1, 1e-9), ConfigError);
  EXPECT_THROW(psi_q(-0.1, 4, 1e-9), ConfigError);
  EXPECT_THROW(psi_q(0.5, 4, 0.0), ConfigError);
}

TEST(QaryHash, IdenticalInputsCollideAndSymbolsStayInAlphabet) {
  const ParticleEnsemble single({0.8}, SupportInterval(0.0, 10.0));
  RandomSource bankRng(7);
  const FeatureBank bank = draw_features(single, 256, 2, bankRng);
  RandomSource famRng(8);
  const QaryHashFamily family = draw_qary_family(bank, 6, 128, famRng);
  const std::vector<double> x = {0.3, -0.9};
  const HashCode a = qary_hash(family, x);
  const HashCode b = qary_hash(family, x);
  EXPECT_EQ(a.alphabet, 6);
  ASSERT_EQ(a.length(), 128);
  EXPECT_EQ(lee_distance(a, b, 6), 0);
  for (int s : a.symbols) {
    EXPECT_GE(s, 0);
    EXPECT_LT(s, 6);
  }
}

TEST(QaryHash, SymbolCollisionRateTracksPsiQ) {
  const ParticleEnsemble single({0.5}, SupportInterval(0.0, 10.0));
  const KernelUnderMeasure kernel{single};
  const std::vector<double> x = {0.0, 0.0};
  const std::vector<double> y = {0.6, 0.0};
  RandomSource bankRng(41);
  const FeatureBank bank = draw_features(single, 4096, 2, bankRng);
  RandomSource famRng(42);
  const int q = 5, L = 2000;
  const QaryHashFamily family = draw_qary_family(bank, q, L, famRng);
  const HashCode cx = qary_hash(family, x);
  const HashCode cy = qary_hash(family, y);
  const double rate = 1.0 - static_cast<double>(hamming_distance(cx, cy)) / L;
  const double expected = psi_q(kernel_value(kernel, x, y), q, 1e-9);
  EXPECT_NEAR(rate, expected, 0.04);
}

TEST(LeeDistance, MatchesMinimumOfForwardAndBackwardGaps) {
  HashCode a, b;
  a.symbols = {0, 1, 2, 3};
  b.symbols = {3, 3, 0, 1};
  a.alphabet = b.alphabet = 4;
  // Per symbol: min over the two cyclic directions -> 1 + 2 + 2 + 2.
  EXPECT_EQ(lee_distance(a, b, 4), 7);

  RandomSource rng(19);
  HashCode u, v;
  const int q = 7;
  u.alphabet = v.alphabet = q;
  for (int i = 0; i < 200; ++i) {
    u.symbols.push_back(static_cast<int>(rng.integer(q)));
    v.symbols.push_back(static_cast<int>(rng.integer(q)));
  }
  int alt = 0;
  for (int i = 0; i < 200; ++i) {
    const int gap = std::abs(u.symbols[static_cast<std::size_t>(i)] -
                             v.symbols[static_cast<std::size_t>(i)]);
    alt += std::min(gap, q - gap);
  }
  EXPECT_EQ(lee_distance(u, v, q), alt);
}

TEST(LeeDistance, CoincidesWithHammingForTinyAlphabets) {
  RandomSource rng(23);
  for (int q : {2, 3}) {
    HashCode u, v;
    u.alphabet = v.alphabet = q;
    for (int i = 0; i < 300; ++i) {
      u.symbols.push_back(static_cast<int>(rng.integer(q)));
      v.symbols.push_back(static_cast<int>(rng.integer(q)));
    }
    EXPECT_EQ(lee_distance(u, v, q), hamming_distance(u, v));
  }
}

TEST(Distances, RejectMismatchedOrOutOfRangeCodes) {
  HashCode a, b;
  a.symbols = {0, 1};
  b.symbols = {0};
  EXPECT_THROW(hamming_distance(a, b), ConfigError);
  EXPECT_THROW(lee_distance(a, b, 2), ConfigError);
  b.symbols = {0, 5};
  EXPECT_THROW(lee_distance(a, b, 2), ConfigError);
  EXPECT_THROW(lee_distance(a, b, 1), ConfigError);
}

TEST(Families, RejectBadShapes) {
  const ParticleEnsemble single({1.0}, SupportInterval(0.0, 10.0));
  RandomSource rng(2);
  EXPECT_THROW(draw_binary_family(single, 0, 2, rng), ConfigError);
  EXPECT_THROW(draw_binary_family(single, 4, 0, rng), ConfigError);
  const FeatureBank bank = draw_features(single, 16, 2, rng);
  EXPECT_THROW(draw_qary_family(bank, 1, 4, rng), ConfigError);
  EXPECT_THROW(draw_qary_family(bank, 4, 0, rng), ConfigError);
  const BinaryHashFamily family = draw_binary_family(single, 4, 2, rng);
  EXPECT_THROW(binary_hash(family, {1.0}), ConfigError);
}

}  // namespace
}  // namespace rkl
