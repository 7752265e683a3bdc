// Kernel evaluation under the empirical measure, kernel-target alignment, the
// regularized empirical risk, and its full-batch / per-pair gradients.
#pragma once

#include <vector>

#include "rkl/measure.hpp"
#include "rkl/sinkhorn.hpp"

namespace rkl {

// Radial kernel induced by an ensemble: K(x,y) = (1/N) sum_k exp(-xi_k * |x-y|^2).
struct KernelUnderMeasure {
  ParticleEnsemble ensemble;

  // Kernel as a function of the squared distance alone.
  double valueAtSquaredDistance(double squaredDistance) const;
};

double kernel_value(const KernelUnderMeasure& kernel, const std::vector<double>& x,
                    const std::vector<double>& y);

struct ObjectiveConfig {
  double gamma = 1.0;     // target-kernel scale in the squared loss
  double lagrangeH = 0.0; // trust-region multiplier h
  double epsilon = 0.05;  // entropic regularization for the transport term

  void validate() const;
};

// (2/(n(n-1))) sum_{i<j} y_i y_j K(x_i, x_j), in [-1, 1].
double alignment(const KernelUnderMeasure& kernel, const LabeledDataset& data);

// (2/(n(n-1) gamma)) sum_{i<j} (gamma y_i y_j - K(x_i,x_j))^2.
double regularized_risk(const KernelUnderMeasure& kernel, const LabeledDataset& data,
                        const ObjectiveConfig& cfg);

// Loss of a single sampled pair: (1/gamma)(gamma y y~ - K)^2.
double pair_loss(const ParticleEnsemble& ensemble, const PairSample& pair, double gamma);

// Full surrogate risk + (h/2) * sharp divergence, used by finite-difference checks.
double surrogate_value(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                       const ObjectiveConfig& cfg, const ParticleEnsemble& reference,
                       double sinkhornTolerance = kSinkhornDefaultTolerance);

// Exact derivative of pair_loss plus (h/2) times the transport gradient; the
// transport plan is solved internally when lagrangeH > 0.
std::vector<double> stochastic_gradient(const ParticleEnsemble& ensemble, const PairSample& pair,
                                        const ObjectiveConfig& cfg,
                                        const ParticleEnsemble& reference);

// Gradient of regularized_risk + (h/2) * divergence with respect to each particle.
std::vector<double> full_gradient(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                                  const ObjectiveConfig& cfg, const ParticleEnsemble& reference);

// Gradient of the risk term alone (no transport part).
std::vector<double> risk_gradient(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                                  double gamma);

// Gradient of alignment with respect to each particle (ascent direction reporting).
std::vector<double> alignment_gradient(const ParticleEnsemble& ensemble,
                                       const LabeledDataset& data);

}  // namespace rkl
