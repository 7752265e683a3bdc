// Tests for the random Fourier feature bank: distributional properties of the
// draws, kernel estimation accuracy, determinism, and file round trips.
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "rkl/errors.hpp"
#include "rkl/features.hpp"
#include "rkl/objective.hpp"

namespace rkl {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

TEST(DrawFeatures, ZeroParticleGivesZeroFrequenciesAndConstantKernel) {
  const ParticleEnsemble zero({0.0}, SupportInterval(0.0, 1.0));
  RandomSource rng(3);
  const FeatureBank bank = draw_features(zero, 200, 3, rng);
  EXPECT_EQ(bank.frequencies.cwiseAbs().maxCoeff(), 0.0);
  // With all frequencies zero the map ignores its input entirely.
  const std::vector<double> fx = feature_map(bank, {0.0, 0.0, 0.0});
  const std::vector<double> fy = feature_map(bank, {4.0, -2.0, 9.0});
  for (std::size_t k = 0; k < fx.size(); ++k) EXPECT_EQ(fx[k], fy[k]);
}

TEST(DrawFeatures, FrequencyVarianceMatchesTwiceTheParticle) {
  const double xi = 2.0;
  const ParticleEnsemble single({xi}, SupportInterval(0.0, 10.0));
  RandomSource rng(5);
  const int D = 100000;
  const FeatureBank bank = draw_features(single, D, 1, rng);
  const double mean = bank.frequencies.col(0).mean();
  const double var = (bank.frequencies.col(0).array() - mean).square().sum() / (D - 1);
  const double target = 2.0 * xi;
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(target / D));
  EXPECT_NEAR(var, target, 4.0 * target * std::sqrt(2.0 / D));
}

TEST(DrawFeatures, SourceParticlesComeFromTheEnsemble) {
  const ParticleEnsemble mixture({0.5, 2.0}, SupportInterval(0.0, 10.0));
  RandomSource rng(8);
  const FeatureBank bank = draw_features(mixture, 2000, 2, rng);
  int low = 0, high = 0;
  for (double xi : bank.sourceParticles) {
    if (xi == 0.5) ++low;
    else if (xi == 2.0) ++high;
    else FAIL() << "unexpected source particle " << xi;
  }
  // Uniform choice between the two particles: 1000 +- 4 * sqrt(500).
  EXPECT_NEAR(low, 1000, 4.0 * std::sqrt(500.0));
  EXPECT_EQ(low + high, 2000);
}

TEST(DrawFeatures, SameSeedGivesIdenticalBankAndPrefixesAgree) {
  const ParticleEnsemble mixture({0.3, 1.0, 4.0}, SupportInterval(0.0, 10.0));
  RandomSource rngA(11), rngB(11), rngC(11);
  const FeatureBank big = draw_features(mixture, 50, 3, rngA);
  const FeatureBank again = draw_features(mixture, 50, 3, rngB);
  const FeatureBank small = draw_features(mixture, 30, 3, rngC);
  EXPECT_EQ(big.frequencies, again.frequencies);
  EXPECT_EQ(big.phases, again.phases);
  // Features are keyed by index, so a shorter bank is a prefix of a longer one.
  EXPECT_EQ(small.frequencies, big.frequencies.topRows(30));
  EXPECT_EQ(small.phases, big.phases.head(30));
  for (int k = 0; k < 30; ++k) {
    EXPECT_EQ(small.sourceParticles[static_cast<std::size_t>(k)],
              big.sourceParticles[static_cast<std::size_t>(k)]);
  }
}

TEST(FeatureMap, SelfInnerProductConcentratesAtOne) {
  const ParticleEnsemble single({1.5}, SupportInterval(0.0, 10.0));
  RandomSource rng(9);
  const int D = 100000;
  const FeatureBank bank = draw_features(single, D, 2, rng);
  const std::vector<double> fx = feature_map(bank, {0.7, -0.4});
  EXPECT_NEAR(dot(fx, fx), 1.0, 3.0 / std::sqrt(static_cast<double>(D)));
}

TEST(FeatureMap, EstimatesLogTwoKernelAtUnitDistance) {
  const double xi = std::log(2.0);
  const ParticleEnsemble single({xi}, SupportInterval(0.0, 10.0));
  RandomSource rng(13);
  const FeatureBank bank = draw_features(single, 200000, 2, rng);
  const std::vector<double> fx = feature_map(bank, {0.0, 0.0});
  const std::vector<double> fy = feature_map(bank, {1.0, 0.0});
  EXPECT_NEAR(dot(fx, fy), 0.5, 0.02);
}

TEST(FeatureMap, UnbiasedForMixtureKernelAcrossBanks) {
  const ParticleEnsemble mixture({0.5, 2.0}, SupportInterval(0.0, 10.0));
  const KernelUnderMeasure kernel{mixture};
  const int banks = 50, D = 2000, pairs = 20;
  RandomSource pointRng(17);

  std::vector<std::vector<double>> xs, ys;
  for (int p = 0; p < pairs; ++p) {
    std::vector<double> x(3), y(3);
    for (double& v : x) v = pointRng.uniform(-1.0, 1.0);
    for (double& v : y) v = pointRng.uniform(-1.0, 1.0);
    xs.push_back(x);
    ys.push_back(y);
  }

  std::vector<std::vector<double>> estimates(pairs);
  RandomSource bankRng(23);
  for (int b = 0; b < banks; ++b) {
    const FeatureBank bank = draw_features(mixture, D, 3, bankRng);
    for (int p = 0; p < pairs; ++p) {
      estimates[static_cast<std::size_t>(p)].push_back(
          dot(feature_map(bank, xs[static_cast<std::size_t>(p)]),
              feature_map(bank, ys[static_cast<std::size_t>(p)])));
    }
  }
  for (int p = 0; p < pairs; ++p) {
    const auto& e = estimates[static_cast<std::size_t>(p)];
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= banks;
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    var /= (banks - 1);
    const double truth =
        kernel_value(kernel, xs[static_cast<std::size_t>(p)], ys[static_cast<std::size_t>(p)]);
    EXPECT_NEAR(mean, truth, 4.0 * std::sqrt(var / banks))
        << "pair " << p << " truth " << truth;
  }
}

TEST(FeatureMatrix, RowsMatchFeatureMap) {
  const ParticleEnsemble mixture({0.4, 1.2}, SupportInterval(0.0, 10.0));
  RandomSource rng(29);
  const FeatureBank bank = draw_features(mixture, 64, 2, rng);
  Eigen::MatrixXd X(3, 2);
  X << 0.0, 0.0, 1.0, -0.5, 2.0, 0.25;
  const Eigen::MatrixXd F = feature_matrix(bank, X);
  ASSERT_EQ(F.rows(), 3);
  ASSERT_EQ(F.cols(), 64);
  for (int i = 0; i < 3; ++i) {
    const std::vector<double> row = feature_map(bank, {X(i, 0), X(i, 1)});
    for (int k = 0; k < 64; ++k) EXPECT_NEAR(F(i, k), row[static_cast<std::size_t>(k)], 1e-14);
  }
}

TEST(DatasetMatrix, CopiesFeaturesRowwise) {
  const LabeledDataset data({{1.0, 2.0}, {3.0, 4.0}}, {1, -1});
  const Eigen::MatrixXd X = dataset_matrix(data);
  ASSERT_EQ(X.rows(), 2);
  ASSERT_EQ(X.cols(), 2);
  EXPECT_EQ(X(0, 0), 1.0);
  EXPECT_EQ(X(1, 1), 4.0);
}

TEST(FeatureBankIo, RoundTripIsExact) {
  const ParticleEnsemble mixture({0.25, 3.0}, SupportInterval(0.0, 10.0));
  RandomSource rng(31);
  const FeatureBank bank = draw_features(mixture, 40, 3, rng);
  const std::string path = ::testing::TempDir() + "bank_roundtrip.csv";
  save_feature_bank(bank, path);
  const FeatureBank loaded = load_feature_bank(path);
  EXPECT_EQ(loaded.seed, bank.seed);
  EXPECT_EQ(loaded.frequencies, bank.frequencies);
  EXPECT_EQ(loaded.phases, bank.phases);
  EXPECT_EQ(loaded.sourceParticles, bank.sourceParticles);
}

TEST(FeatureBankIo, MissingAndMalformedFilesAreDataErrors) {
  EXPECT_THROW(load_feature_bank(::testing::TempDir() + "no_such_bank.csv"), DataError);

  const std::string badHeader = ::testing::TempDir() + "bank_bad_header.csv";
  {
    std::ofstream out(badHeader);
    out << "not,a,header\n";
  }
  EXPECT_THROW(load_feature_bank(badHeader), DataError);

  const std::string truncated = ::testing::TempDir() + "bank_truncated.csv";
  {
    std::ofstream out(truncated);
    out << "3,2,77\n0.1,0.2,0.3,0.4\n";
  }
  EXPECT_THROW(load_feature_bank(truncated), DataError);
}

TEST(DrawFeatures, RejectsBadShapes) {
  const ParticleEnsemble single({1.0}, SupportInterval(0.0, 10.0));
  RandomSource rng(1);
  EXPECT_THROW(draw_features(single, 0, 3, rng), ConfigError);
  EXPECT_THROW(draw_features(single, 8, 0, rng), ConfigError);
  const FeatureBank bank = draw_features(single, 8, 3, rng);
  EXPECT_THROW(feature_map(bank, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(feature_matrix(bank, Eigen::MatrixXd::Zero(2, 2)), ConfigError);
}

}  // namespace
}  // namespace rkl
