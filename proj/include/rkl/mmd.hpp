// Feature-space two-sample testing: unbiased MMD estimates from a shared
// random-feature bank, thresholded tests, and Monte Carlo power estimates.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkl/features.hpp"
#include "rkl/measure.hpp"
#include "rkl/rng.hpp"

namespace rkl {

// Two finite samples assumed to live in the same ambient space.
struct TwoSampleData {
  std::vector<std::vector<double>> samplesV;
  std::vector<std::vector<double>> samplesW;

  TwoSampleData(std::vector<std::vector<double>> v, std::vector<std::vector<double>> w);
};

enum class TestDecision { kRetainNull, kRejectNull };

struct MmdOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  TestDecision decision = TestDecision::kRetainNull;
};

// Unbiased quadratic MMD^2 estimate under the feature-bank kernel
// k(x, y) = <phi(x), phi(y)>; diagonal terms are removed from both
// within-sample averages, so the value may be negative.
double mmd_unbiased(const TwoSampleData& data, const FeatureBank& bank);

// Compares the unbiased statistic against a fixed threshold tau; rejects
// strictly above tau. Negative thresholds are admissible.
MmdOutcome run_test(const TwoSampleData& data, const FeatureBank& bank, double tau);

// Draws `trials` fresh sample pairs from the synthetic scale family: latent
// class V ~ N(0, (1+lambda) I), class W ~ N(0, (1-lambda) I) in dimension
// latentDimension, both pushed through one shared random linear map
// (entries N(0, 1/latentDimension)) into ambientDimension. Returns the
// rejection frequency at each tau in the grid as (tau, power) pairs.
std::vector<std::pair<double, double>> estimate_power(double generatorLambda, int ambientDimension,
                                                      int latentDimension, int countV, int countW,
                                                      int trials, const std::vector<double>& tauGrid,
                                                      const FeatureBank& bank, RandomSource& rng);

// Simulation-based null calibration: generates `trials` statistics with both
// samples drawn from the lambda = 0 model and returns the empirical quantile
// (e.g. 0.95) to use as a test threshold.
double null_threshold(int ambientDimension, int latentDimension, int countV, int countW, int trials,
                      double quantile, const FeatureBank& bank, RandomSource& rng);

}  // namespace rkl
