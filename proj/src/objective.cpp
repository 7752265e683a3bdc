#include "rkl/objective.hpp"

#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ConfigError("kernel arguments differ in dimension: " + std::to_string(x.size()) +
                      " vs " + std::to_string(y.size()));
  }
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - y[c];
    s += d * d;
  }
  return s;
}

void require_pairs(const LabeledDataset& data) {
  if (data.count() < 2) throw DataError("pairwise objective needs at least two rows");
}

}  // namespace

double KernelUnderMeasure::valueAtSquaredDistance(double squaredDistance) const {
  double s = 0.0;
  for (double xi : ensemble.particles()) s += std::exp(-xi * squaredDistance);
  return s / ensemble.size();
}

double kernel_value(const KernelUnderMeasure& kernel, const std::vector<double>& x,
                    const std::vector<double>& y) {
  return kernel.valueAtSquaredDistance(squared_distance(x, y));
}

void ObjectiveConfig::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("objective gamma must be > 0");
  if (!(lagrangeH >= 0.0)) throw ConfigError("objective lagrangeH must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("objective epsilon must be > 0");
}

double alignment(const KernelUnderMeasure& kernel, const LabeledDataset& data) {
  require_pairs(data);
  const int n = data.count();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      s += data.label(i) * data.label(j) * kernel.valueAtSquaredDistance(data.squaredDistance(i, j));
    }
  }
  return 2.0 * s / (static_cast<double>(n) * (n - 1));
}

double regularized_risk(const KernelUnderMeasure& kernel, const LabeledDataset& data,
                        const ObjectiveConfig& cfg) {
  require_pairs(data);
  cfg.validate();
  const int n = data.count();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = cfg.gamma * data.label(i) * data.label(j) -
                       kernel.valueAtSquaredDistance(data.squaredDistance(i, j));
      s += r * r;
    }
  }
  return 2.0 * s / (static_cast<double>(n) * (n - 1) * cfg.gamma);
}

double pair_loss(const ParticleEnsemble& ensemble, const PairSample& pair, double gamma) {
  const KernelUnderMeasure kernel{ensemble};
  const double r = gamma * pair.firstLabel * pair.secondLabel -
                   kernel.valueAtSquaredDistance(pair.squaredDistance);
  return r * r / gamma;
}

double surrogate_value(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                       const ObjectiveConfig& cfg, const ParticleEnsemble& reference,
                       double sinkhornTolerance) {
  double v = regularized_risk(KernelUnderMeasure{ensemble}, data, cfg);
  if (cfg.lagrangeH > 0.0) {
    v += 0.5 * cfg.lagrangeH *
         sinkhorn_divergence(ensemble, reference, cfg.epsilon, sinkhornTolerance).value;
  }
  return v;
}

std::vector<double> stochastic_gradient(const ParticleEnsemble& ensemble, const PairSample& pair,
                                        const ObjectiveConfig& cfg,
                                        const ParticleEnsemble& reference) {
  cfg.validate();
  const int N = ensemble.size();
  const KernelUnderMeasure kernel{ensemble};
  const double d2 = pair.squaredDistance;
  const double resid = cfg.gamma * pair.firstLabel * pair.secondLabel -
                       kernel.valueAtSquaredDistance(d2);
  // d/dxi_k of (1/gamma)(gamma y y~ - Kbar)^2 with Kbar = (1/N) sum exp(-xi d2).
  std::vector<double> grad(static_cast<std::size_t>(N));
  const double scale = 2.0 * resid * d2 / (cfg.gamma * N);
  for (int k = 0; k < N; ++k) {
    grad[static_cast<std::size_t>(k)] = scale * std::exp(-ensemble.particle(k) * d2);
  }
  if (cfg.lagrangeH > 0.0) {
    const TransportPlan plan = sinkhorn_plan(ensemble, reference, cfg.epsilon);
    const std::vector<double> tg = sinkhorn_gradient(ensemble, reference, plan);
    for (int k = 0; k < N; ++k) {
      grad[static_cast<std::size_t>(k)] += 0.5 * cfg.lagrangeH * tg[static_cast<std::size_t>(k)];
    }
  }
  return grad;
}

std::vector<double> risk_gradient(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                                  double gamma) {
  require_pairs(data);
  const int N = ensemble.size();
  const int n = data.count();
  const KernelUnderMeasure kernel{ensemble};
  std::vector<double> grad(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d2 = data.squaredDistance(i, j);
      const double resid =
          gamma * data.label(i) * data.label(j) - kernel.valueAtSquaredDistance(d2);
      const double w = resid * d2;
      for (int k = 0; k < N; ++k) {
        grad[static_cast<std::size_t>(k)] += w * std::exp(-ensemble.particle(k) * d2);
      }
    }
  }
  const double scale = 4.0 / (static_cast<double>(n) * (n - 1) * gamma * N);
  for (double& g : grad) g *= scale;
  return grad;
}

std::vector<double> full_gradient(const ParticleEnsemble& ensemble, const LabeledDataset& data,
                                  const ObjectiveConfig& cfg, const ParticleEnsemble& reference) {
  cfg.validate();
  std::vector<double> grad = risk_gradient(ensemble, data, cfg.gamma);
  if (cfg.lagrangeH > 0.0) {
    const TransportPlan plan = sinkhorn_plan(ensemble, reference, cfg.epsilon);
    const std::vector<double> tg = sinkhorn_gradient(ensemble, reference, plan);
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += 0.5 * cfg.lagrangeH * tg[k];
  }
  return grad;
}

std::vector<double> alignment_gradient(const ParticleEnsemble& ensemble,
                                       const LabeledDataset& data) {
  require_pairs(data);
  const int N = ensemble.size();
  const int n = data.count();
  std::vector<double> grad(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d2 = data.squaredDistance(i, j);
      const double w = data.label(i) * data.label(j) * d2;
      for (int k = 0; k < N; ++k) {
        grad[static_cast<std::size_t>(k)] -= w * std::exp(-ensemble.particle(k) * d2);
      }
    }
  }
  const double scale = 2.0 / (static_cast<double>(n) * (n - 1) * N);
  for (double& g : grad) g *= scale;
  return grad;
}

}  // namespace rkl
