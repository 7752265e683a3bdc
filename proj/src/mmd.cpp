#include "rkl/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& points) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(points.front().size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return out;
}

struct SyntheticModel {
  double lambda = 0.0;
  Eigen::MatrixXd projection;  // ambient x latent

  std::vector<std::vector<double>> drawClass(int count, double scale, RandomSource& rng) const {
    const auto latent = projection.cols();
    Eigen::MatrixXd Z(count, latent);
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      for (Eigen::Index c = 0; c < latent; ++c) Z(i, c) = scale * rng.normal();
    }
    const Eigen::MatrixXd X = Z * projection.transpose();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out[static_cast<std::size_t>(i)].assign(X.row(i).begin(), X.row(i).end());
    }
    return out;
  }

  TwoSampleData drawPair(int countV, int countW, RandomSource& rng) const {
    auto v = drawClass(countV, std::sqrt(1.0 + lambda), rng);
    auto w = drawClass(countW, std::sqrt(1.0 - lambda), rng);
    return TwoSampleData(std::move(v), std::move(w));
  }
};

SyntheticModel make_model(double lambda, int ambientDimension, int latentDimension,
                          RandomSource& rng) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("generator lambda must lie in [0, 1)");
  if (ambientDimension < 1 || latentDimension < 1) {
    throw ConfigError("projection dimensions must be positive");
  }
  SyntheticModel model;
  model.lambda = lambda;
  model.projection.resize(ambientDimension, latentDimension);
  const double scale = 1.0 / std::sqrt(static_cast<double>(latentDimension));
  for (Eigen::Index i = 0; i < model.projection.rows(); ++i) {
    for (Eigen::Index c = 0; c < model.projection.cols(); ++c) {
      model.projection(i, c) = scale * rng.normal();
    }
  }
  return model;
}

std::vector<double> trial_statistics(const SyntheticModel& model, int countV, int countW,
                                     int trials, const FeatureBank& bank, RandomSource& rng) {
  if (trials < 1) throw ConfigError("power estimation needs trials >= 1");
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    RandomSource trialRng = rng.child();
    stats.push_back(mmd_unbiased(model.drawPair(countV, countW, trialRng), bank));
  }
  return stats;
}

}  // namespace

TwoSampleData::TwoSampleData(std::vector<std::vector<double>> v, std::vector<std::vector<double>> w)
    : samplesV(std::move(v)), samplesW(std::move(w)) {
  if (samplesV.size() < 2 || samplesW.size() < 2) {
    throw DataError("two-sample data needs at least two points per sample");
  }
  const std::size_t dim = samplesV.front().size();
  if (dim == 0) throw DataError("two-sample data has empty points");
  for (const auto& row : samplesV) {
    if (row.size() != dim) throw DataError("two-sample data has inconsistent dimensions");
  }
  for (const auto& row : samplesW) {
    if (row.size() != dim) throw DataError("two-sample data has inconsistent dimensions");
  }
}

double mmd_unbiased(const TwoSampleData& data, const FeatureBank& bank) {
  const Eigen::MatrixXd phiV = feature_matrix(bank, to_matrix(data.samplesV));
  const Eigen::MatrixXd phiW = feature_matrix(bank, to_matrix(data.samplesW));
  const auto m = static_cast<double>(phiV.rows());
  const auto n = static_cast<double>(phiW.rows());
  const Eigen::VectorXd sumV = phiV.colwise().sum();
  const Eigen::VectorXd sumW = phiW.colwise().sum();
  const double withinV = (sumV.squaredNorm() - phiV.rowwise().squaredNorm().sum()) / (m * (m - 1.0));
  const double withinW = (sumW.squaredNorm() - phiW.rowwise().squaredNorm().sum()) / (n * (n - 1.0));
  const double cross = 2.0 / (m * n) * sumV.dot(sumW);
  return withinV + withinW - cross;
}

MmdOutcome run_test(const TwoSampleData& data, const FeatureBank& bank, double tau) {
  MmdOutcome outcome;
  outcome.statistic = mmd_unbiased(data, bank);
  outcome.threshold = tau;
  outcome.decision = outcome.statistic > tau ? TestDecision::kRejectNull : TestDecision::kRetainNull;
  return outcome;
}

std::vector<std::pair<double, double>> estimate_power(double generatorLambda, int ambientDimension,
                                                      int latentDimension, int countV, int countW,
                                                      int trials, const std::vector<double>& tauGrid,
                                                      const FeatureBank& bank, RandomSource& rng) {
  if (bank.dimension() != ambientDimension) {
    throw ConfigError("feature bank dimension does not match the ambient dimension");
  }
  const SyntheticModel model = make_model(generatorLambda, ambientDimension, latentDimension, rng);
  const std::vector<double> stats = trial_statistics(model, countV, countW, trials, bank, rng);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(tauGrid.size());
  for (const double tau : tauGrid) {
    int rejected = 0;
    for (const double s : stats) rejected += s > tau ? 1 : 0;
    curve.emplace_back(tau, static_cast<double>(rejected) / static_cast<double>(trials));
  }
  return curve;
}

double null_threshold(int ambientDimension, int latentDimension, int countV, int countW, int trials,
                      double quantile, const FeatureBank& bank, RandomSource& rng) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw ConfigError("quantile must lie in (0, 1)");
  if (bank.dimension() != ambientDimension) {
    throw ConfigError("feature bank dimension does not match the ambient dimension");
  }
  const SyntheticModel model = make_model(0.0, ambientDimension, latentDimension, rng);
  std::vector<double> stats = trial_statistics(model, countV, countW, trials, bank, rng);
  std::sort(stats.begin(), stats.end());
  const auto idx = static_cast<std::size_t>(
      std::min<double>(std::ceil(quantile * trials) - 1.0, trials - 1.0));
  return stats[idx];
}

}  // namespace rkl
