// Random Fourier features for the kernel of a particle ensemble: frequencies
// are drawn from the Gaussian scale mixture N(0, 2*xi*I) with xi a uniformly
// chosen particle, so dot products of feature maps estimate the kernel.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rkl/measure.hpp"

namespace rkl {

struct FeatureBank {
  Eigen::MatrixXd frequencies;          // D x d, row k = omega_k
  Eigen::VectorXd phases;               // D, each in [-pi, pi]
  std::vector<double> sourceParticles;  // particle value used for each feature
  std::uint64_t seed = 0;               // stream the bank was drawn from

  int count() const { return static_cast<int>(frequencies.rows()); }
  int dimension() const { return static_cast<int>(frequencies.cols()); }
};

// Draw D features for data dimension d. Each feature uses its own indexed
// substream, so the bank is identical whether features are drawn in any order.
FeatureBank draw_features(const ParticleEnsemble& ensemble, int count, int dimension,
                          RandomSource& rng);

// Entry k = sqrt(2/D) * cos(<omega_k, x> + b_k).
std::vector<double> feature_map(const FeatureBank& bank, const std::vector<double>& x);

// Rows = mapped inputs; X is n x d.
Eigen::MatrixXd feature_matrix(const FeatureBank& bank, const Eigen::MatrixXd& X);

Eigen::MatrixXd dataset_matrix(const LabeledDataset& data);

// CSV layout: one header line "D,d,seed", then one row per feature:
// omega coordinates, phase, source particle.
void save_feature_bank(const FeatureBank& bank, const std::string& path);
FeatureBank load_feature_bank(const std::string& path);

}  // namespace rkl
