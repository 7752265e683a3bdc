// Core domain types: support interval, particle ensembles (empirical measures
// on the kernel scale axis), labeled datasets, and uniform pair sampling.
#pragma once

#include <utility>
#include <vector>

#include "rkl/rng.hpp"

namespace rkl {

// Compact interval [lower, upper] with 0 <= lower < upper that hosts every particle.
struct SupportInterval {
  double lower = 0.0;
  double upper = 1.0;

  SupportInterval() = default;
  SupportInterval(double lo, double hi);

  double length() const { return upper - lower; }
  bool contains(double x) const { return x >= lower && x <= upper; }
  bool operator==(const SupportInterval& o) const { return lower == o.lower && upper == o.upper; }
};

// N particles inside a support interval; the empirical measure puts mass 1/N on each.
class ParticleEnsemble {
 public:
  ParticleEnsemble(std::vector<double> particles, SupportInterval support);

  int size() const { return static_cast<int>(particles_.size()); }
  const std::vector<double>& particles() const { return particles_; }
  double particle(int k) const { return particles_[static_cast<std::size_t>(k)]; }
  const SupportInterval& support() const { return support_; }

 private:
  std::vector<double> particles_;
  SupportInterval support_;
};

// (location, mass) pairs of the empirical measure: mass is exactly 1/N everywhere.
std::vector<std::pair<double, double>> empirical_measure_weights(const ParticleEnsemble& ensemble);

// Dense feature vectors with labels in {-1, +1}.
class LabeledDataset {
 public:
  LabeledDataset(std::vector<std::vector<double>> features, std::vector<int> labels);

  int count() const { return static_cast<int>(labels_.size()); }
  int dimension() const { return dimension_; }
  const std::vector<double>& feature(int i) const { return features_[static_cast<std::size_t>(i)]; }
  int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<double>>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  double squaredDistance(int i, int j) const;

 private:
  std::vector<std::vector<double>> features_;
  std::vector<int> labels_;
  int dimension_ = 0;
};

// One uniformly sampled (with replacement) pair of dataset rows.
struct PairSample {
  std::vector<double> firstFeatures;
  int firstLabel = 0;
  std::vector<double> secondFeatures;
  int secondLabel = 0;
  double squaredDistance = 0.0;
};

// Two independent uniform indices; identical indices are allowed and give distance 0.
PairSample sample_pair(const LabeledDataset& data, RandomSource& rng);

// Maximum pairwise Euclidean distance (0 for a single point).
double dataset_diameter(const LabeledDataset& data);

}  // namespace rkl
