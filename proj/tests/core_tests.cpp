// Core domain types: deterministic randomness, ensembles, datasets, pair
// sampling, and the synthetic task generator.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rkl/errors.hpp"
#include "rkl/measure.hpp"
#include "rkl/rng.hpp"
#include "rkl/synthetic.hpp"

namespace {

TEST(RandomSource, SameSeedSameSequence) {
  rkl::RandomSource a(42), b(42);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(a.bits(), b.bits());
    EXPECT_EQ(a.uniform(), b.uniform());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(RandomSource, SubstreamIgnoresDrawHistory) {
  rkl::RandomSource a(7);
  rkl::RandomSource early = a.substream(5);
  for (int i = 0; i < 100; ++i) a.uniform();
  rkl::RandomSource late = a.substream(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(early.bits(), late.bits());
}

TEST(RandomSource, ChildStreamsDiffer) {
  rkl::RandomSource a(7);
  rkl::RandomSource c1 = a.child();
  rkl::RandomSource c2 = a.child();
  EXPECT_NE(c1.bits(), c2.bits());
}

TEST(RandomSource, UniformStaysInUnitInterval) {
  rkl::RandomSource a(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(RandomSource, IntegerRespectsBoundAndCoversRange) {
  rkl::RandomSource a(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t v = a.integer(7);
    ASSERT_LT(v, 7u);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) EXPECT_GT(h, 2000);
}

TEST(RandomSource, NormalMoments) {
  rkl::RandomSource a(5);
  double sum = 0.0, sumSq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = a.normal();
    sum += z;
    sumSq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sumSq / n, 1.0, 0.03);
}

TEST(SupportInterval, RejectsInvalidBounds) {
  EXPECT_THROW(rkl::SupportInterval(-1.0, 2.0), rkl::ConfigError);
  EXPECT_THROW(rkl::SupportInterval(2.0, 2.0), rkl::ConfigError);
  EXPECT_THROW(rkl::SupportInterval(3.0, 1.0), rkl::ConfigError);
}

TEST(ParticleEnsemble, RejectsOutOfRangeParticles) {
  EXPECT_THROW(rkl::ParticleEnsemble({-0.5}, rkl::SupportInterval(0.0, 1.0)), rkl::ConfigError);
  EXPECT_THROW(rkl::ParticleEnsemble({}, rkl::SupportInterval(0.0, 1.0)), rkl::ConfigError);
}

TEST(EmpiricalMeasure, SingleParticleCarriesAllMass) {
  rkl::ParticleEnsemble e({2.0}, rkl::SupportInterval(0.0, 10.0));
  const auto w = rkl::empirical_measure_weights(e);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0].first, 2.0);
  EXPECT_DOUBLE_EQ(w[0].second, 1.0);
}

TEST(EmpiricalMeasure, TwoParticlesSplitEvenly) {
  rkl::ParticleEnsemble e({1.0, 3.0}, rkl::SupportInterval(0.0, 10.0));
  const auto w = rkl::empirical_measure_weights(e);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0].first, 1.0);
  EXPECT_DOUBLE_EQ(w[0].second, 0.5);
  EXPECT_DOUBLE_EQ(w[1].first, 3.0);
  EXPECT_DOUBLE_EQ(w[1].second, 0.5);
}

TEST(EmpiricalMeasure, MassesSumToOne) {
  rkl::ParticleEnsemble e(std::vector<double>(5, 4.0), rkl::SupportInterval(0.0, 10.0));
  const auto w = rkl::empirical_measure_weights(e);
  double mass = 0.0;
  for (const auto& p : w) {
    EXPECT_DOUBLE_EQ(p.second, 0.2);
    mass += p.second;
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

rkl::LabeledDataset twoPointData() {
  return rkl::LabeledDataset({{0.0, 0.0}, {3.0, 4.0}}, {+1, -1});
}

TEST(PairSampling, UniformOverIndexPairs) {
  rkl::LabeledDataset data({{0.0}, {1.0}}, {+1, -1});
  rkl::RandomSource rng(9);
  int counts[2][2] = {{0, 0}, {0, 0}};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const rkl::PairSample p = rkl::sample_pair(data, rng);
    const int a = p.firstFeatures[0] > 0.5 ? 1 : 0;
    const int b = p.secondFeatures[0] > 0.5 ? 1 : 0;
    ++counts[a][b];
  }
  // 3 sigma for a Bernoulli(1/4) over 1e5 draws.
  const double tol = 3.0 * std::sqrt(0.25 * 0.75 / draws);
  for (auto& row : counts)
    for (int c : row) EXPECT_NEAR(static_cast<double>(c) / draws, 0.25, tol);
}

TEST(PairSampling, IdenticalFeaturesGiveZeroDistance) {
  rkl::LabeledDataset data({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}, {+1, -1, +1});
  rkl::RandomSource rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(rkl::sample_pair(data, rng).squaredDistance, 0.0);
}

TEST(PairSampling, ThreeFourFiveDistance) {
  const rkl::LabeledDataset data = twoPointData();
  rkl::RandomSource rng(2);
  bool sawCross = false;
  for (int i = 0; i < 200 && !sawCross; ++i) {
    const rkl::PairSample p = rkl::sample_pair(data, rng);
    if (p.firstFeatures != p.secondFeatures) {
      EXPECT_DOUBLE_EQ(p.squaredDistance, 25.0);
      sawCross = true;
    }
  }
  EXPECT_TRUE(sawCross);
}

TEST(PairSampling, NeedsAtLeastTwoRows) {
  rkl::LabeledDataset one({{1.0}}, {+1});
  rkl::RandomSource rng(1);
  EXPECT_THROW(rkl::sample_pair(one, rng), rkl::DataError);
}

TEST(PairSampling, DeterministicSequence) {
  const rkl::LabeledDataset data = twoPointData();
  rkl::RandomSource a(77), b(77);
  for (int i = 0; i < 100; ++i) {
    const rkl::PairSample pa = rkl::sample_pair(data, a);
    const rkl::PairSample pb = rkl::sample_pair(data, b);
    EXPECT_EQ(pa.firstFeatures, pb.firstFeatures);
    EXPECT_EQ(pa.secondFeatures, pb.secondFeatures);
    EXPECT_EQ(pa.firstLabel, pb.firstLabel);
    EXPECT_EQ(pa.secondLabel, pb.secondLabel);
    EXPECT_EQ(pa.squaredDistance, pb.squaredDistance);
  }
}

TEST(DatasetDiameter, SinglePointIsZero) {
  rkl::LabeledDataset one({{1.0, 5.0}}, {+1});
  EXPECT_DOUBLE_EQ(rkl::dataset_diameter(one), 0.0);
}

TEST(DatasetDiameter, ThreeFourFive) { EXPECT_DOUBLE_EQ(rkl::dataset_diameter(twoPointData()), 5.0); }

TEST(DatasetDiameter, MatchesBruteForce) {
  rkl::RandomSource rng(13);
  std::vector<std::vector<double>> pts;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    labels.push_back(i % 2 == 0 ? +1 : -1);
  }
  rkl::LabeledDataset data(pts, labels);
  double best = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      best = std::max(best, std::sqrt(d2));
    }
  EXPECT_DOUBLE_EQ(rkl::dataset_diameter(data), best);
}

TEST(LabeledDataset, ValidatesShapeAndLabels) {
  EXPECT_THROW(rkl::LabeledDataset({{1.0}}, {+1, -1}), rkl::DataError);
  EXPECT_THROW(rkl::LabeledDataset({{1.0}, {2.0, 3.0}}, {+1, -1}), rkl::DataError);
  EXPECT_THROW(rkl::LabeledDataset({{1.0}, {2.0}}, {+1, 0}), rkl::DataError);
}

TEST(SyntheticTask, DeterministicPerSeed) {
  rkl::RandomSource a(4), b(4);
  const rkl::LabeledDataset da = rkl::make_classification(50, 5, 0.5, 1.0, a);
  const rkl::LabeledDataset db = rkl::make_classification(50, 5, 0.5, 1.0, b);
  ASSERT_EQ(da.count(), 50);
  ASSERT_EQ(da.dimension(), 5);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(da.label(i), db.label(i));
    EXPECT_EQ(da.feature(i), db.feature(i));
  }
}

TEST(SyntheticTask, ClassScalesFollowLambda) {
  rkl::RandomSource rng(8);
  const double lambda = 0.6;
  const rkl::LabeledDataset data = rkl::make_classification(4000, 8, lambda, 1.0, rng);
  double posSq = 0.0, negSq = 0.0;
  int pos = 0, neg = 0;
  for (int i = 0; i < data.count(); ++i) {
    double sq = 0.0;
    for (double v : data.feature(i)) sq += v * v;
    if (data.label(i) > 0) {
      posSq += sq;
      ++pos;
    } else {
      negSq += sq;
      ++neg;
    }
  }
  ASSERT_GT(pos, 0);
  ASSERT_GT(neg, 0);
  // Per-coordinate variances are (1 + lambda) and (1 - lambda).
  EXPECT_NEAR(posSq / pos / 8.0, 1.0 + lambda, 0.1);
  EXPECT_NEAR(negSq / neg / 8.0, 1.0 - lambda, 0.1);
}

TEST(SyntheticTask, RejectsBadParameters) {
  rkl::RandomSource rng(1);
  EXPECT_THROW(rkl::make_classification(0, 5, 0.5, 1.0, rng), rkl::ConfigError);
  EXPECT_THROW(rkl::make_classification(10, 0, 0.5, 1.0, rng), rkl::ConfigError);
  EXPECT_THROW(rkl::make_classification(10, 5, 1.0, 1.0, rng), rkl::ConfigError);
  EXPECT_THROW(rkl::make_classification(10, 5, -0.1, 1.0, rng), rkl::ConfigError);
  EXPECT_THROW(rkl::make_classification(10, 5, 0.5, 0.0, rng), rkl::ConfigError);
}

}  // namespace
