// Projected particle Langevin dynamics and the two-phase bisection loop that
// enforces the transport-ball constraint through the multiplier h.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rkl/measure.hpp"
#include "rkl/objective.hpp"

namespace rkl {

struct LangevinConfig {
  double stepSize = 1e-3;          // eta
  double inverseTemperature = 1e3; // beta
  int totalSteps = 200;            // Langevin updates per feasibility trial
  double gamma = 1.0;              // risk regularization
  double epsilon = 0.05;           // entropic regularization of the constraint
  double radius = 1.0;             // trust-region radius R (on W, not W^2)
  double bisectionTolerance = 0.05;
  std::uint64_t seed = 0;
  int snapshotInterval = 0;        // 0 disables trajectory snapshots
  bool decayStepSize = false;      // optional eta/sqrt(m) schedule, off by default

  void validate() const;
};

// One bisection trial: the multiplier tried, the bracket after the update,
// the measured constraint value, and which phase issued it.
struct BisectionRecord {
  int phase = 0;
  double multiplier = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double constraint = 0.0;
  bool feasible = false;
};

struct TrainResult {
  ParticleEnsemble ensemble;          // terminal ensemble of the last feasible trial
  double multiplier = 0.0;            // final h_s
  double bracketLow = 0.0;            // h_l
  double bracketHigh = 0.0;           // h_u
  double constraintValue = 0.0;       // W at the returned ensemble
  std::vector<ParticleEnsemble> trajectory;  // snapshots, when enabled
  std::vector<BisectionRecord> history;
  std::optional<ParticleEnsemble> phaseOneEnsemble;  // state accepted at the end of phase 1
};

// Coordinatewise clamp onto the support hyper-cube; idempotent.
ParticleEnsemble project(const std::vector<double>& candidate, const SupportInterval& support);

// One update: sample a pair, draw isotropic noise, take the noisy gradient
// step, project. Draws consume `rng` directly.
ParticleEnsemble langevin_step(const ParticleEnsemble& ensemble, double h,
                               const LangevinConfig& cfg, const LabeledDataset& data,
                               const ParticleEnsemble& reference, RandomSource& rng);

// cfg.totalSteps updates from `start` at fixed multiplier h. Each step uses a
// child stream forked from `rng`, and the transport solve (h > 0) is
// warm-started across steps. Snapshots are appended when cfg.snapshotInterval > 0.
ParticleEnsemble run_chain(const ParticleEnsemble& start, double h, const LangevinConfig& cfg,
                           const LabeledDataset& data, const ParticleEnsemble& reference,
                           RandomSource& rng, std::vector<ParticleEnsemble>* trajectory = nullptr);

// Two-phase search for the smallest multiplier that keeps the trained ensemble
// inside the radius-R transport ball around the reference:
//   phase 1 doubles h until a trial lands inside the ball (continuing from the
//   evolving ensemble), phase 2 bisects, restarting every trial from the
//   phase-1 terminal state. Each trial runs cfg.totalSteps updates on its own
//   deterministic child stream, so any trial can be replayed as a plain chain.
// Throws NumericError once h exceeds 1e12 (radius unattainable).
TrainResult train(const LangevinConfig& cfg, const LabeledDataset& data,
                  const ParticleEnsemble& reference);

// Convenience: N independent uniform draws on the support (default reference).
ParticleEnsemble uniform_reference(int count, const SupportInterval& support, RandomSource& rng);

}  // namespace rkl
