#include "rkl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

SupportInterval::SupportInterval(double lo, double hi) : lower(lo), upper(hi) {
  if (!(lo >= 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw ConfigError("support interval requires 0 <= lower < upper < inf, got [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

ParticleEnsemble::ParticleEnsemble(std::vector<double> particles, SupportInterval support)
    : particles_(std::move(particles)), support_(support) {
  if (particles_.empty()) throw ConfigError("particle ensemble must hold at least one particle");
  for (double xi : particles_) {
    if (!std::isfinite(xi) || !support_.contains(xi)) {
      throw ConfigError("particle " + std::to_string(xi) + " outside support [" +
                        std::to_string(support_.lower) + ", " + std::to_string(support_.upper) + "]");
    }
  }
}

std::vector<std::pair<double, double>> empirical_measure_weights(const ParticleEnsemble& ensemble) {
  const double mass = 1.0 / ensemble.size();
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(ensemble.size()));
  for (double xi : ensemble.particles()) out.emplace_back(xi, mass);
  return out;
}

LabeledDataset::LabeledDataset(std::vector<std::vector<double>> features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.size() != labels_.size()) {
    throw DataError("feature rows and labels differ in length");
  }
  if (features_.empty()) throw DataError("dataset is empty");
  dimension_ = static_cast<int>(features_.front().size());
  if (dimension_ == 0) throw DataError("dataset rows have no features");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (static_cast<int>(features_[i].size()) != dimension_) {
      throw DataError("row " + std::to_string(i) + " has " + std::to_string(features_[i].size()) +
                      " features, expected " + std::to_string(dimension_));
    }
    for (double v : features_[i]) {
      if (!std::isfinite(v)) throw DataError("row " + std::to_string(i) + " has a non-finite feature");
    }
    if (labels_[i] != 1 && labels_[i] != -1) {
      throw DataError("row " + std::to_string(i) + " has label " + std::to_string(labels_[i]) +
                      ", expected -1 or +1");
    }
  }
}

double LabeledDataset::squaredDistance(int i, int j) const {
  const auto& a = feature(i);
  const auto& b = feature(j);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

PairSample sample_pair(const LabeledDataset& data, RandomSource& rng) {
  if (data.count() < 2) throw DataError("pair sampling needs at least two rows");
  const auto i = static_cast<int>(rng.integer(static_cast<std::uint64_t>(data.count())));
  const auto j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(data.count())));
  PairSample p;
  p.firstFeatures = data.feature(i);
  p.firstLabel = data.label(i);
  p.secondFeatures = data.feature(j);
  p.secondLabel = data.label(j);
  p.squaredDistance = data.squaredDistance(i, j);
  return p;
}

double dataset_diameter(const LabeledDataset& data) {
  double best = 0.0;
  for (int i = 0; i < data.count(); ++i) {
    for (int j = i + 1; j < data.count(); ++j) {
      best = std::max(best, data.squaredDistance(i, j));
    }
  }
  return std::sqrt(best);
}

}  // namespace rkl
