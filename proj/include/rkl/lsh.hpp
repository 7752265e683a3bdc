// Kernel-driven locality-sensitive hashing: binary codes from thresholded
// random cosines, q-ary codes from Gaussian projections of the feature map,
// plus the theoretical collision curves h_K (series) and Psi_q (quadrature).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rkl/features.hpp"
#include "rkl/measure.hpp"
#include "rkl/objective.hpp"

namespace rkl {

struct HashCode {
  std::vector<int> symbols;
  int alphabet = 2;

  int length() const { return static_cast<int>(symbols.size()); }
};

// Per bit: threshold t in [-1,1], phase b in [-pi,pi], frequency omega from
// the kernel's spectral law. Bit = 1 iff t + cos(<omega,x> + b) >= 0.
struct BinaryHashFamily {
  Eigen::MatrixXd frequencies;  // bits x d
  Eigen::VectorXd phases;
  Eigen::VectorXd thresholds;

  int bits() const { return static_cast<int>(frequencies.rows()); }
  int dimension() const { return static_cast<int>(frequencies.cols()); }
};

BinaryHashFamily draw_binary_family(const ParticleEnsemble& ensemble, int bits, int dimension,
                                    RandomSource& rng);

HashCode binary_hash(const BinaryHashFamily& family, const std::vector<double>& x);

// Series h_K(x - y) = (8/pi^2) sum_{m>=1} (1 - K(m x, m y)) / (4 m^2 - 1):
// the expected normalized Hamming distance between binary codes. `terms`
// counts series terms (the m = 0 term vanishes since K(0) = 1).
double collision_curve_hK(const KernelUnderMeasure& kernel, const std::vector<double>& x,
                          const std::vector<double>& y, int terms);

// Upper bound on the truncation error of collision_curve_hK after `terms` terms.
double hK_tail_bound(int terms);

// Per symbol: standard normal weights over the bank's features and an offset
// t in [0, q]. Symbol = ceil((<w, phi(x)> + t)/q) mod q, where phi is the
// scaled cosine feature map, so <w, phi(x) - phi(y)> is Gaussian with
// variance |phi(x) - phi(y)|^2 ~= 2(1 - K(x,y)) -- exactly the variance the
// collision law Psi_q is stated for.
struct QaryHashFamily {
  int alphabet = 2;
  FeatureBank featureBank;
  Eigen::MatrixXd weights;  // codeLength x bankSize
  Eigen::VectorXd offsets;  // each in [0, alphabet]

  int codeLength() const { return static_cast<int>(weights.rows()); }
};

QaryHashFamily draw_qary_family(const FeatureBank& bank, int alphabet, int codeLength,
                                RandomSource& rng);

HashCode qary_hash(const QaryHashFamily& family, const std::vector<double>& x);

// Collision probability of one q-ary symbol as a function of the kernel value
// u: Psi_q(u) = integral_0^q (pi(1-u))^{-1/2} exp(-s^2/(4(1-u))) (1 - s/q) ds,
// evaluated by adaptive Simpson quadrature. Returns 1 at u >= 1 by continuity.
double psi_q(double u, int q, double quadratureTolerance);

int hamming_distance(const HashCode& a, const HashCode& b);

// Cyclic symbol distance sum_i min{(a-b) mod q, (b-a) mod q}.
int lee_distance(const HashCode& a, const HashCode& b, int q);

}  // namespace rkl
