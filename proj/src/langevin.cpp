#include "rkl/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rkl/errors.hpp"
#include "rkl/sinkhorn.hpp"

namespace rkl {

namespace {

constexpr double kMultiplierCap = 1e12;

double clamp(double x, const SupportInterval& s) { return std::min(std::max(x, s.lower), s.upper); }

// Shared body for single steps and chains. The transport gradient (h > 0) is
// supplied by the caller so chains can warm-start the solve.
void apply_update(std::vector<double>& xi, const PairSample& pair, double h,
                  const LangevinConfig& cfg, const std::vector<double>* transportGrad,
                  const std::vector<double>& noise, double eta, const SupportInterval& support,
                  std::vector<double>& expBuffer) {
  const int N = static_cast<int>(xi.size());
  const double d2 = pair.squaredDistance;
  double kbar = 0.0;
  for (int k = 0; k < N; ++k) {
    expBuffer[static_cast<std::size_t>(k)] = std::exp(-xi[static_cast<std::size_t>(k)] * d2);
    kbar += expBuffer[static_cast<std::size_t>(k)];
  }
  kbar /= N;
  const double resid = cfg.gamma * pair.firstLabel * pair.secondLabel - kbar;
  const double scale = 2.0 * resid * d2 / (cfg.gamma * N);
  const double noiseScale = std::sqrt(2.0 * eta / cfg.inverseTemperature);
  for (int k = 0; k < N; ++k) {
    double grad = scale * expBuffer[static_cast<std::size_t>(k)];
    if (transportGrad != nullptr) grad += 0.5 * h * (*transportGrad)[static_cast<std::size_t>(k)];
    xi[static_cast<std::size_t>(k)] = clamp(
        xi[static_cast<std::size_t>(k)] - eta * grad + noiseScale * noise[static_cast<std::size_t>(k)],
        support);
  }
}

}  // namespace

void LangevinConfig::validate() const {
  // eta = 0 is allowed so the degenerate fixed-point case (no update at all)
  // stays expressible; train() still terminates because the initial ensemble
  // is feasible whenever nothing moves.
  if (!(stepSize >= 0.0)) throw ConfigError("langevin stepSize must be >= 0");
  if (!(inverseTemperature > 0.0)) throw ConfigError("langevin inverseTemperature must be > 0");
  if (totalSteps < 1) throw ConfigError("langevin totalSteps must be >= 1");
  if (!(gamma > 0.0)) throw ConfigError("langevin gamma must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("langevin epsilon must be > 0");
  if (!(radius > 0.0)) throw ConfigError("langevin radius must be > 0");
  if (!(bisectionTolerance > 0.0)) throw ConfigError("langevin bisectionTolerance must be > 0");
  if (snapshotInterval < 0) throw ConfigError("langevin snapshotInterval must be >= 0");
}

ParticleEnsemble project(const std::vector<double>& candidate, const SupportInterval& support) {
  std::vector<double> out(candidate.size());
  for (std::size_t k = 0; k < candidate.size(); ++k) out[k] = clamp(candidate[k], support);
  return ParticleEnsemble(std::move(out), support);
}

ParticleEnsemble langevin_step(const ParticleEnsemble& ensemble, double h,
                               const LangevinConfig& cfg, const LabeledDataset& data,
                               const ParticleEnsemble& reference, RandomSource& rng) {
  cfg.validate();
  const PairSample pair = sample_pair(data, rng);
  std::vector<double> noise(static_cast<std::size_t>(ensemble.size()));
  for (double& z : noise) z = rng.normal();

  std::vector<double> transportGrad;
  const std::vector<double>* tg = nullptr;
  if (h > 0.0) {
    const TransportPlan plan = sinkhorn_plan(ensemble, reference, cfg.epsilon);
    transportGrad = sinkhorn_gradient(ensemble, reference, plan);
    tg = &transportGrad;
  }
  std::vector<double> xi = ensemble.particles();
  std::vector<double> buffer(xi.size());
  apply_update(xi, pair, h, cfg, tg, noise, cfg.stepSize, ensemble.support(), buffer);
  return ParticleEnsemble(std::move(xi), ensemble.support());
}

ParticleEnsemble run_chain(const ParticleEnsemble& start, double h, const LangevinConfig& cfg,
                           const LabeledDataset& data, const ParticleEnsemble& reference,
                           RandomSource& rng, std::vector<ParticleEnsemble>* trajectory) {
  cfg.validate();
  const SupportInterval support = start.support();
  std::vector<double> xi = start.particles();
  std::vector<double> noise(xi.size());
  std::vector<double> buffer(xi.size());
  SinkhornSolver solver(cfg.epsilon);

  for (int m = 0; m < cfg.totalSteps; ++m) {
    RandomSource stepRng = rng.child();
    const PairSample pair = sample_pair(data, stepRng);
    for (double& z : noise) z = stepRng.normal();

    std::vector<double> transportGrad;
    const std::vector<double>* tg = nullptr;
    if (h > 0.0) {
      ParticleEnsemble current(xi, support);
      const TransportPlan& plan = solver.solve(current, reference);
      transportGrad = sinkhorn_gradient(current, reference, plan);
      tg = &transportGrad;
    }
    const double eta = cfg.decayStepSize ? cfg.stepSize / std::sqrt(static_cast<double>(m + 1))
                                         : cfg.stepSize;
    apply_update(xi, pair, h, cfg, tg, noise, eta, support, buffer);
    if (trajectory != nullptr && cfg.snapshotInterval > 0 && (m + 1) % cfg.snapshotInterval == 0) {
      trajectory->emplace_back(xi, support);
    }
  }
  return ParticleEnsemble(std::move(xi), support);
}

ParticleEnsemble uniform_reference(int count, const SupportInterval& support, RandomSource& rng) {
  if (count < 1) throw ConfigError("reference ensemble needs at least one particle");
  std::vector<double> xi(static_cast<std::size_t>(count));
  for (double& x : xi) x = rng.uniform(support.lower, support.upper);
  return ParticleEnsemble(std::move(xi), support);
}

TrainResult train(const LangevinConfig& cfg, const LabeledDataset& data,
                  const ParticleEnsemble& reference) {
  cfg.validate();
  RandomSource root(cfg.seed);

  const auto constraint_of = [&](const ParticleEnsemble& e) {
    return std::sqrt(sinkhorn_divergence(e, reference, cfg.epsilon).value);
  };
  const auto run_trial = [&](const ParticleEnsemble& from, double h,
                             std::vector<ParticleEnsemble>* traj) {
    RandomSource trialRng = root.child();
    return run_chain(from, h, cfg, data, reference, trialRng, traj);
  };

  TrainResult result{reference, 0.0, 0.0, 0.0, 0.0, {}, {}, std::nullopt};
  std::vector<ParticleEnsemble>* traj = cfg.snapshotInterval > 0 ? &result.trajectory : nullptr;

  // Phase 1: double h until a full trial lands inside the ball. The ensemble
  // keeps evolving across failed trials.
  double hLow = 0.0;
  double hHigh = 0.0;
  double hTry = 1.0;
  ParticleEnsemble current = reference;
  bool feasibleFound = false;
  while (!feasibleFound) {
    if (hTry > kMultiplierCap) {
      throw NumericError("trust-region radius " + std::to_string(cfg.radius) +
                         " unattainable: multiplier exceeded " + std::to_string(kMultiplierCap));
    }
    current = run_trial(current, hTry, traj);
    const double w = constraint_of(current);
    const bool feasible = w <= cfg.radius;
    result.history.push_back(
        {1, hTry, hLow, feasible ? hTry : std::numeric_limits<double>::infinity(), w, feasible});
    if (feasible) {
      hHigh = hTry;
      feasibleFound = true;
      result.ensemble = current;
      result.constraintValue = w;
    } else {
      hTry *= 2.0;
    }
  }
  result.phaseOneEnsemble = current;

  // Phase 2: bisect on h, restarting every trial from the phase-1 terminal
  // state so trials are comparable across multipliers. When every trial is
  // feasible h_l stays at 0 and the relative-width guard can never fire; the
  // multiplier is then driven to 0 and we stop once it drops below the
  // bisection tolerance (the constraint is slack, optimal multiplier 0).
  const ParticleEnsemble entry = current;
  double hSel = hTry;
  while (hHigh - hLow >= cfg.bisectionTolerance * hSel) {
    if (hLow == 0.0 && hHigh < cfg.bisectionTolerance) break;
    hSel = 0.5 * (hHigh + hLow);
    const ParticleEnsemble trial = run_trial(entry, hSel, traj);
    const double w = constraint_of(trial);
    const bool feasible = w <= cfg.radius;
    if (feasible) {
      hHigh = hSel;
      result.ensemble = trial;
      result.constraintValue = w;
    } else {
      hLow = hSel;
    }
    result.history.push_back({2, hSel, hLow, hHigh, w, feasible});
  }

  result.multiplier = hSel;
  result.bracketLow = hLow;
  result.bracketHigh = hHigh;
  return result;
}

}  // namespace rkl
