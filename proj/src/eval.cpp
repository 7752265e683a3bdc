#include "rkl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

void check_svm_inputs(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
  if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw ConfigError("feature rows and label count differ");
  }
  if (features.rows() < 1) throw DataError("svm needs at least one row");
  for (const int y : labels) {
    if (y != 1 && y != -1) throw DataError("svm labels must be +1 or -1");
  }
}

// w_m(theta) = max(0, 1/N + (s_m - theta)/(2 lambda N)); sum decreases in theta.
std::vector<double> water_fill(const std::vector<double>& scores, double lambda, double theta) {
  const auto N = static_cast<double>(scores.size());
  std::vector<double> w(scores.size(), 0.0);
  for (std::size_t m = 0; m < scores.size(); ++m) {
    w[m] = std::max(0.0, 1.0 / N + (scores[m] - theta) / (2.0 * lambda * N));
  }
  return w;
}

std::vector<double> simplex_weights(const std::vector<double>& scores, double lambda) {
  const double lo0 = *std::min_element(scores.begin(), scores.end()) - 2.0 * lambda;
  const double hi0 = *std::max_element(scores.begin(), scores.end()) + 2.0 * lambda;
  double lo = lo0;
  double hi = hi0;
  for (int it = 0; it < 200; ++it) {
    const double theta = 0.5 * (lo + hi);
    double sum = 0.0;
    for (const double w : water_fill(scores, lambda, theta)) sum += w;
    (sum > 1.0 ? lo : hi) = theta;
  }
  return water_fill(scores, lambda, 0.5 * (lo + hi));
}

double chi_square(const std::vector<double>& w) {
  const auto N = static_cast<double>(w.size());
  double s = 0.0;
  for (const double x : w) s += (x - 1.0 / N) * (x - 1.0 / N);
  return N * s;
}

}  // namespace

LinearModel svm_train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      double lambdaSvm, int epochs, RandomSource& rng,
                      std::vector<double>* epochObjectives) {
  check_svm_inputs(features, labels);
  if (features.rows() < 2) throw DataError("svm_train needs at least two rows");
  if (!(lambdaSvm > 0.0)) throw ConfigError("svm_train needs lambda > 0");
  if (epochs < 1) throw ConfigError("svm_train needs epochs >= 1");
  const auto n = features.rows();
  const auto D = features.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd average = Eigen::VectorXd::Zero(D);
  if (epochObjectives != nullptr) epochObjectives->clear();
  long t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    average.setZero();
    for (Eigen::Index step = 0; step < n; ++step) {
      ++t;
      const auto i = static_cast<Eigen::Index>(rng.integer(static_cast<std::uint64_t>(n)));
      const double eta = 1.0 / (lambdaSvm * static_cast<double>(t));
      const double margin = labels[static_cast<std::size_t>(i)] * features.row(i).dot(w);
      w *= 1.0 - eta * lambdaSvm;
      if (margin < 1.0) w += eta * labels[static_cast<std::size_t>(i)] * features.row(i).transpose();
      average += w;
    }
    average /= static_cast<double>(n);
    if (epochObjectives != nullptr) {
      LinearModel probe{average, lambdaSvm};
      epochObjectives->push_back(svm_objective(probe, features, labels));
    }
  }
  LinearModel model;
  model.weights = average;
  model.lambda = lambdaSvm;
  return model;
}

double svm_objective(const LinearModel& model, const Eigen::MatrixXd& features,
                     const std::vector<int>& labels) {
  check_svm_inputs(features, labels);
  const auto n = features.rows();
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = labels[static_cast<std::size_t>(i)] * features.row(i).dot(model.weights);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return hinge / static_cast<double>(n) + 0.5 * model.lambda * model.weights.squaredNorm();
}

double svm_error(const LinearModel& model, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels) {
  check_svm_inputs(features, labels);
  const auto n = features.rows();
  int wrong = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int predicted = features.row(i).dot(model.weights) >= 0.0 ? 1 : -1;
    wrong += predicted != labels[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

std::vector<double> feature_alignment_scores(const FeatureBank& featureBank,
                                             const LabeledDataset& data) {
  if (featureBank.dimension() != data.dimension()) {
    throw ConfigError("feature bank dimension does not match the dataset");
  }
  const auto n = static_cast<Eigen::Index>(data.count());
  const Eigen::MatrixXd X = dataset_matrix(data);
  // Raw sqrt(2) cos features: constant scalings do not move the argmax.
  Eigen::MatrixXd C = (X * featureBank.frequencies.transpose()).rowwise() +
                      featureBank.phases.transpose();
  C = C.array().cos().matrix();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = data.label(static_cast<int>(i));
  const Eigen::VectorXd T = C.transpose() * y;
  const Eigen::VectorXd U = C.array().square().matrix().colwise().sum();
  const double scale = 1.0 / (static_cast<double>(n) * (n - 1.0));
  std::vector<double> scores(static_cast<std::size_t>(featureBank.count()), 0.0);
  for (int m = 0; m < featureBank.count(); ++m) {
    scores[static_cast<std::size_t>(m)] = scale * (T(m) * T(m) - U(m));
  }
  return scores;
}

ImportanceWeights importance_sampling_weights(const FeatureBank& featureBank,
                                              const LabeledDataset& data, double radius) {
  if (data.count() < 2) throw DataError("importance weights need at least two points");
  if (!(radius >= 0.0)) throw ConfigError("chi-square radius must be >= 0");
  const std::vector<double> scores = feature_alignment_scores(featureBank, data);
  const auto N = scores.size();
  ImportanceWeights out;
  out.chiSquareRadius = radius;
  if (radius == 0.0 || N == 1) {
    out.weights.assign(N, 1.0 / static_cast<double>(N));
  } else {
    const double best = *std::max_element(scores.begin(), scores.end());
    std::vector<std::size_t> argmax;
    for (std::size_t m = 0; m < N; ++m) {
      if (scores[m] >= best - 1e-15 * std::max(1.0, std::abs(best))) argmax.push_back(m);
    }
    const double vertexChi = static_cast<double>(N) / static_cast<double>(argmax.size()) - 1.0;
    if (radius >= vertexChi) {
      // Ball contains the unconstrained optimum: split mass over the argmax set.
      out.weights.assign(N, 0.0);
      for (const std::size_t m : argmax) out.weights[m] = 1.0 / static_cast<double>(argmax.size());
    } else {
      // Outer bisection on the chi-square multiplier: chi^2 decreases in lambda.
      double hi = 1.0;
      while (chi_square(simplex_weights(scores, hi)) > radius) hi *= 2.0;
      double lo = hi / 2.0;
      while (chi_square(simplex_weights(scores, lo)) < radius && lo > 1e-300) lo /= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (chi_square(simplex_weights(scores, mid)) > radius ? lo : hi) = mid;
      }
      out.weights = simplex_weights(scores, hi);
    }
  }
  out.chiSquare = chi_square(out.weights);
  for (std::size_t m = 0; m < N; ++m) out.objective += out.weights[m] * scores[m];
  return out;
}

double knn_bandwidth(const LabeledDataset& data, int k) {
  if (k < 1) throw ConfigError("knn_bandwidth needs k >= 1");
  const int n = data.count();
  if (n <= k) throw DataError("knn_bandwidth needs more points than k");
  double total = 0.0;
  std::vector<double> d2(static_cast<std::size_t>(n) - 1, 0.0);
  for (int i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) d2[idx++] = data.squaredDistance(i, j);
    }
    std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
    total += d2[static_cast<std::size_t>(k - 1)];
  }
  return total / n;
}

KMeansLabeling kmeans_label(const std::vector<std::vector<double>>& points, int k,
                            RandomSource& rng, int maxIterations) {
  if (k < 2) throw ConfigError("kmeans_label needs k >= 2");
  if (maxIterations < 1) throw ConfigError("kmeans_label needs maxIterations >= 1");
  if (points.empty()) throw DataError("kmeans_label needs points");
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw DataError("kmeans_label points have inconsistent dimensions");
  }
  std::vector<std::vector<double>> distinct;
  for (const auto& p : points) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  if (static_cast<std::size_t>(k) > distinct.size()) {
    throw DataError("kmeans_label: k exceeds the number of distinct points");
  }

  const auto sqdist = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return s;
  };

  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.push_back(points[rng.integer(n)]);
  std::vector<double> nearest(n, 0.0);
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sqdist(points[i], c));
      nearest[i] = best;
      total += best;
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = rng.integer(n);
    }
    centers.push_back(points[chosen]);
  }

  KMeansLabeling out;
  out.assignments.assign(n, 0);
  for (int iter = 0; iter < maxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bestDist = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sqdist(points[i], centers[static_cast<std::size_t>(c)]);
        if (d < bestDist) {
          bestDist = d;
          best = c;
        }
      }
      if (out.assignments[i] != best) {
        out.assignments[i] = best;
        changed = true;
      }
    }
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(out.assignments[i]);
      counts[c] += 1;
      for (std::size_t col = 0; col < dim; ++col) sums[c][col] += points[i][col];
    }
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      if (counts[cc] == 0) {
        // Reseed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sqdist(points[i], centers[static_cast<std::size_t>(out.assignments[i])]);
          if (d > worst) {
            worst = d;
            far = i;
          }
        }
        centers[cc] = points[far];
        changed = true;
        continue;
      }
      for (std::size_t col = 0; col < dim; ++col) centers[cc][col] = sums[cc][col] / counts[cc];
    }
    if (!changed && iter > 0) break;
  }

  out.centers = centers;
  out.withinClusterSS = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.withinClusterSS += sqdist(points[i], centers[static_cast<std::size_t>(out.assignments[i])]);
  }
  out.positiveCluster = static_cast<int>(rng.integer(static_cast<std::uint64_t>(k)));
  out.labels.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.assignments[i] == out.positiveCluster) out.labels[i] = 1;
  }
  return out;
}

std::pair<double, double> precision_recall(const std::set<int>& retrieved,
                                           const std::set<int>& relevant) {
  std::size_t hits = 0;
  for (const int r : retrieved) hits += relevant.count(r);
  const double precision =
      retrieved.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(retrieved.size());
  const double recall =
      relevant.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(relevant.size());
  return {precision, recall};
}

}  // namespace rkl
