// Finite-volume solver for the one-dimensional mean-field dynamics of the
// particle law: drift assembly from labeled data, a conservative
// Chang-Cooper step with zero-flux boundaries, the Gibbs-Boltzmann
// fixed point, and particle-vs-density comparison.
#pragma once

#include <vector>

#include "rkl/measure.hpp"
#include "rkl/rng.hpp"

namespace rkl {

// Cell-averaged probability density on a uniform grid over the support.
struct DensityGrid {
  int binCount = 0;
  SupportInterval support{0.0, 1.0};
  std::vector<double> density;
  double time = 0.0;

  double cellWidth() const { return support.length() / binCount; }
  double cellCenter(int k) const { return support.lower + (k + 0.5) * cellWidth(); }
  // Checks binCount >= 8, nonnegative entries, and unit mass within 1e-9.
  void validate() const;

  static DensityGrid uniform(const SupportInterval& support, int binCount);
};

// Potential slope dJ/dxi evaluated at every cell center.
struct DriftField {
  std::vector<double> values;
};

// Pairwise squared distances and label products of a dataset, with the
// all-pairs averaging weight 2/(n(n-1)).
struct PairDistanceSummary {
  std::vector<double> squaredDistances;
  std::vector<double> labelProducts;
  double pairWeight = 0.0;

  static PairDistanceSummary from(const LabeledDataset& data);
};

// Caches the grid-geometry tables needed to evaluate the drift and the
// potential in O(M^2) per call instead of O(M^2 * pairs). Exploits the fact
// that sums of two cell centers take only 2M-1 distinct values.
class MeanFieldModel {
 public:
  MeanFieldModel(const LabeledDataset& data, const SupportInterval& support, int binCount,
                 double gamma);

  // dJ/dxi at each cell center given the current density:
  //   +E[y y' d^2 e^{-xi d^2}] - (1/gamma) * sum_l E[d^2 e^{-(xi+xi_l) d^2}] p_l * dxi
  DriftField drift(const DensityGrid& grid) const;

  // J itself at each cell center:
  //   -E[y y' e^{-xi d^2}] + (1/gamma) * sum_l E[e^{-(xi+xi_l) d^2}] p_l * dxi
  std::vector<double> potential(const DensityGrid& grid) const;

  double gamma() const { return gamma_; }
  int binCount() const { return binCount_; }
  const SupportInterval& support() const { return support_; }

 private:
  SupportInterval support_;
  int binCount_ = 0;
  double gamma_ = 1.0;
  std::vector<double> labelDriftAtCenter_;
  std::vector<double> labelPotentialAtCenter_;
  std::vector<double> pairDriftAtSum_;
  std::vector<double> pairPotentialAtSum_;
};

// One-shot variants that build the model tables on the fly.
DriftField drift(const DensityGrid& grid, const LabeledDataset& data, double gamma);
std::vector<double> mean_field_potential(const DensityGrid& grid, const LabeledDataset& data,
                                         double gamma);

// Largest stable explicit step: 0.9 * min(beta dxi^2 / 2, dxi / max|drift|).
double max_stable_dt(const DensityGrid& grid, const DriftField& drift, double beta);

struct StepDiagnostics {
  double clippedMass = 0.0;  // total negative mass removed this step
  bool flagged = false;      // clip exceeded 1e-10 and forced renormalization
};

// One conservative finite-volume step of
//   dp/dt = d/dxi (p dJ/dxi) + (1/beta) d^2 p / dxi^2
// in flux form with zero total flux at both boundary faces. The face flux
// uses Chang-Cooper weights so the discrete Gibbs profile is stationary
// exactly. Steps above the stability bound are rejected.
DensityGrid step_pde(const DensityGrid& grid, const DriftField& drift, double beta, double dt,
                     StepDiagnostics* diagnostics = nullptr);

struct GibbsResult {
  DensityGrid grid;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Damped fixed-point iteration p <- (1-damping) p + damping exp(-beta J)/Z,
// stopping when the sup-norm change drops to the tolerance. Non-convergence
// is reported through the result, not thrown.
GibbsResult gibbs_fixed_point(const LabeledDataset& data, double beta, double gamma,
                              const DensityGrid& initial, double damping, int maxIterations,
                              double tolerance);

struct DensityComparison {
  double l1Distance = 0.0;
  DensityGrid histogram;
};

// Bins the particles on the grid (supports must match) and returns the L1
// distance between the normalized histogram and the density.
DensityComparison compare_particles_to_density(const ParticleEnsemble& ensemble,
                                               const DensityGrid& grid);

// Draws particles exactly from the piecewise-constant grid density:
// multinomial over bins, uniform within the chosen bin.
ParticleEnsemble sample_from_density(const DensityGrid& grid, int count, RandomSource& rng);

}  // namespace rkl
