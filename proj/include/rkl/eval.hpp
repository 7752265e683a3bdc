// Downstream evaluation utilities: Pegasos-style linear SVM on random
// features, baseline bandwidth selectors, chi-square-constrained feature
// reweighting, k-means labeling, and retrieval metrics.
#pragma once

#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkl/features.hpp"
#include "rkl/measure.hpp"
#include "rkl/rng.hpp"

namespace rkl {

struct LinearModel {
  Eigen::VectorXd weights;
  double lambda = 1.0;
};

struct ImportanceWeights {
  std::vector<double> weights;   // simplex point over the feature bank
  double chiSquareRadius = 0.0;  // ball the weights were projected into
  double chiSquare = 0.0;        // attained N * sum (w - 1/N)^2
  double objective = 0.0;        // attained alignment score
};

// Stochastic subgradient descent on hinge loss + (lambda/2)||w||^2 with step
// 1/(lambda t); returns the average iterate over the final epoch. Optionally
// records the objective of each epoch's average iterate.
LinearModel svm_train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      double lambdaSvm, int epochs, RandomSource& rng,
                      std::vector<double>* epochObjectives = nullptr);

// Hinge + ridge objective of a model on a dataset.
double svm_objective(const LinearModel& model, const Eigen::MatrixXd& features,
                     const std::vector<int>& labels);

// Fraction of sign mismatches; sign(0) counts as +1.
double svm_error(const LinearModel& model, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels);

// Maximizes the per-feature alignment score linearly in w over the simplex
// intersected with the chi-square ball of the given radius around uniform
// (water-filling via nested bisection).
ImportanceWeights importance_sampling_weights(const FeatureBank& featureBank,
                                              const LabeledDataset& data, double radius);

// Per-feature alignment scores the importance weights maximize against.
std::vector<double> feature_alignment_scores(const FeatureBank& featureBank,
                                             const LabeledDataset& data);

// Mean squared distance to each point's k-th nearest neighbor.
double knn_bandwidth(const LabeledDataset& data, int k);

struct KMeansLabeling {
  std::vector<int> assignments;              // cluster index per point
  std::vector<int> labels;                   // +1 for one random cluster, -1 otherwise
  std::vector<std::vector<double>> centers;  // final cluster centers
  double withinClusterSS = 0.0;
  int positiveCluster = 0;
};

// Lloyd iterations from k-means++ seeding until an assignment fixpoint or
// maxIterations, then one-vs-all labels for a uniformly chosen cluster.
KMeansLabeling kmeans_label(const std::vector<std::vector<double>>& points, int k,
                            RandomSource& rng, int maxIterations);

// (precision, recall) with the empty-set conventions precision(∅ retrieved)=1
// and recall(∅ relevant)=1.
std::pair<double, double> precision_recall(const std::set<int>& retrieved,
                                           const std::set<int>& relevant);

}  // namespace rkl
