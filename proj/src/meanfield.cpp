#include "rkl/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kClipFlagThreshold = 1e-10;

// Chang-Cooper face weight w(z) = 1/z - 1/(e^z - 1); series for tiny z.
double face_weight(double z) {
  if (std::abs(z) < 1e-5) return 0.5 - z / 12.0;
  return 1.0 / z - 1.0 / std::expm1(z);
}

void check_drift(const DensityGrid& grid, const DriftField& drift) {
  if (static_cast<int>(drift.values.size()) != grid.binCount) {
    throw ConfigError("drift field size does not match the grid");
  }
  for (const double v : drift.values) {
    if (!std::isfinite(v)) throw ConfigError("drift field has non-finite entries");
  }
}

}  // namespace

void DensityGrid::validate() const {
  if (binCount < 8) throw ConfigError("density grid needs at least 8 bins");
  if (static_cast<int>(density.size()) != binCount) {
    throw ConfigError("density grid size does not match binCount");
  }
  if (!(time >= 0.0)) throw ConfigError("density grid time must be >= 0");
  double mass = 0.0;
  for (const double p : density) {
    if (!(p >= 0.0)) throw ConfigError("density grid has negative entries");
    mass += p;
  }
  mass *= cellWidth();
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw ConfigError("density grid mass deviates from 1 by more than 1e-9");
  }
}

DensityGrid DensityGrid::uniform(const SupportInterval& support, int binCount) {
  DensityGrid grid;
  grid.binCount = binCount;
  grid.support = support;
  grid.density.assign(static_cast<std::size_t>(binCount), 1.0 / support.length());
  grid.time = 0.0;
  grid.validate();
  return grid;
}

PairDistanceSummary PairDistanceSummary::from(const LabeledDataset& data) {
  const int n = data.count();
  if (n < 2) throw DataError("pair summary needs at least two points");
  PairDistanceSummary summary;
  const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  summary.squaredDistances.reserve(pairs);
  summary.labelProducts.reserve(pairs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      summary.squaredDistances.push_back(data.squaredDistance(i, j));
      summary.labelProducts.push_back(data.label(i) * data.label(j));
    }
  }
  summary.pairWeight = 2.0 / (static_cast<double>(n) * (n - 1));
  return summary;
}

MeanFieldModel::MeanFieldModel(const LabeledDataset& data, const SupportInterval& support,
                               int binCount, double gamma)
    : support_(support), binCount_(binCount), gamma_(gamma) {
  if (binCount < 8) throw ConfigError("mean-field model needs at least 8 bins");
  if (!(gamma > 0.0)) throw ConfigError("mean-field model needs gamma > 0");
  const PairDistanceSummary summary = PairDistanceSummary::from(data);
  const int M = binCount;
  const double width = support.length() / M;
  labelDriftAtCenter_.assign(static_cast<std::size_t>(M), 0.0);
  labelPotentialAtCenter_.assign(static_cast<std::size_t>(M), 0.0);
  pairDriftAtSum_.assign(static_cast<std::size_t>(2 * M - 1), 0.0);
  pairPotentialAtSum_.assign(static_cast<std::size_t>(2 * M - 1), 0.0);
  const double w = summary.pairWeight;
  for (std::size_t p = 0; p < summary.squaredDistances.size(); ++p) {
    const double d2 = summary.squaredDistances[p];
    const double yy = summary.labelProducts[p];
    for (int k = 0; k < M; ++k) {
      const double center = support.lower + (k + 0.5) * width;
      const double e = std::exp(-center * d2);
      labelDriftAtCenter_[static_cast<std::size_t>(k)] += w * yy * d2 * e;
      labelPotentialAtCenter_[static_cast<std::size_t>(k)] += w * yy * e;
    }
    for (int s = 0; s < 2 * M - 1; ++s) {
      // Center sum c_k + c_l with k + l = s.
      const double sum = 2.0 * support.lower + (s + 1.0) * width;
      const double e = std::exp(-sum * d2);
      pairDriftAtSum_[static_cast<std::size_t>(s)] += w * d2 * e;
      pairPotentialAtSum_[static_cast<std::size_t>(s)] += w * e;
    }
  }
}

DriftField MeanFieldModel::drift(const DensityGrid& grid) const {
  grid.validate();
  if (grid.binCount != binCount_ || !(grid.support == support_)) {
    throw ConfigError("grid does not match the mean-field model geometry");
  }
  const int M = binCount_;
  const double width = grid.cellWidth();
  DriftField field;
  field.values.assign(static_cast<std::size_t>(M), 0.0);
  for (int k = 0; k < M; ++k) {
    double interaction = 0.0;
    for (int l = 0; l < M; ++l) {
      interaction += pairDriftAtSum_[static_cast<std::size_t>(k + l)] *
                     grid.density[static_cast<std::size_t>(l)];
    }
    field.values[static_cast<std::size_t>(k)] =
        labelDriftAtCenter_[static_cast<std::size_t>(k)] - interaction * width / gamma_;
  }
  return field;
}

std::vector<double> MeanFieldModel::potential(const DensityGrid& grid) const {
  grid.validate();
  if (grid.binCount != binCount_ || !(grid.support == support_)) {
    throw ConfigError("grid does not match the mean-field model geometry");
  }
  const int M = binCount_;
  const double width = grid.cellWidth();
  std::vector<double> values(static_cast<std::size_t>(M), 0.0);
  for (int k = 0; k < M; ++k) {
    double interaction = 0.0;
    for (int l = 0; l < M; ++l) {
      interaction += pairPotentialAtSum_[static_cast<std::size_t>(k + l)] *
                     grid.density[static_cast<std::size_t>(l)];
    }
    values[static_cast<std::size_t>(k)] =
        -labelPotentialAtCenter_[static_cast<std::size_t>(k)] + interaction * width / gamma_;
  }
  return values;
}

DriftField drift(const DensityGrid& grid, const LabeledDataset& data, double gamma) {
  return MeanFieldModel(data, grid.support, grid.binCount, gamma).drift(grid);
}

std::vector<double> mean_field_potential(const DensityGrid& grid, const LabeledDataset& data,
                                         double gamma) {
  return MeanFieldModel(data, grid.support, grid.binCount, gamma).potential(grid);
}

double max_stable_dt(const DensityGrid& grid, const DriftField& drift, double beta) {
  check_drift(grid, drift);
  if (!(beta > 0.0)) throw ConfigError("stability bound needs beta > 0");
  const double width = grid.cellWidth();
  double maxDrift = 0.0;
  for (const double v : drift.values) maxDrift = std::max(maxDrift, std::abs(v));
  double bound = beta * width * width / 2.0;
  if (maxDrift > 0.0) bound = std::min(bound, width / maxDrift);
  return 0.9 * bound;
}

DensityGrid step_pde(const DensityGrid& grid, const DriftField& drift, double beta, double dt,
                     StepDiagnostics* diagnostics) {
  grid.validate();
  check_drift(grid, drift);
  if (!(beta > 0.0)) throw ConfigError("step_pde needs beta > 0");
  if (!(dt > 0.0)) throw ConfigError("step_pde needs dt > 0");
  if (dt > max_stable_dt(grid, drift, beta)) {
    throw ConfigError("step_pde: dt exceeds the stability bound");
  }
  const int M = grid.binCount;
  const double width = grid.cellWidth();
  const auto& p = grid.density;
  const auto& v = drift.values;
  // Interior face f sits between cells f-1 and f; boundary fluxes vanish.
  std::vector<double> flux(static_cast<std::size_t>(M) + 1, 0.0);
  for (int f = 1; f < M; ++f) {
    const double vf = 0.5 * (v[static_cast<std::size_t>(f - 1)] + v[static_cast<std::size_t>(f)]);
    const double z = beta * width * vf;
    const double w = face_weight(z);
    const double left = p[static_cast<std::size_t>(f - 1)];
    const double right = p[static_cast<std::size_t>(f)];
    flux[static_cast<std::size_t>(f)] =
        vf * (w * left + (1.0 - w) * right) + (right - left) / (beta * width);
  }
  DensityGrid out = grid;
  out.time = grid.time + dt;
  double clipped = 0.0;
  for (int k = 0; k < M; ++k) {
    double value = p[static_cast<std::size_t>(k)] +
                   dt / width * (flux[static_cast<std::size_t>(k) + 1] - flux[static_cast<std::size_t>(k)]);
    if (value < 0.0) {
      clipped -= value * width;
      value = 0.0;
    }
    out.density[static_cast<std::size_t>(k)] = value;
  }
  if (clipped > 0.0) {
    double mass = 0.0;
    for (const double q : out.density) mass += q;
    mass *= width;
    if (!(mass > 0.0)) throw NumericError("step_pde clipped away all mass");
    for (double& q : out.density) q /= mass;
  }
  if (diagnostics != nullptr) {
    diagnostics->clippedMass = clipped;
    diagnostics->flagged = clipped > kClipFlagThreshold;
  }
  return out;
}

GibbsResult gibbs_fixed_point(const LabeledDataset& data, double beta, double gamma,
                              const DensityGrid& initial, double damping, int maxIterations,
                              double tolerance) {
  initial.validate();
  if (!(beta >= 0.0)) throw ConfigError("gibbs_fixed_point needs beta >= 0");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (maxIterations < 1) throw ConfigError("gibbs_fixed_point needs maxIterations >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("gibbs_fixed_point needs tolerance > 0");
  const MeanFieldModel model(data, initial.support, initial.binCount, gamma);
  const int M = initial.binCount;
  const double width = initial.cellWidth();
  GibbsResult result;
  result.grid = initial;
  for (int it = 0; it < maxIterations; ++it) {
    const std::vector<double> J = model.potential(result.grid);
    const double shift = *std::min_element(J.begin(), J.end());
    std::vector<double> gibbs(static_cast<std::size_t>(M), 0.0);
    double Z = 0.0;
    for (int k = 0; k < M; ++k) {
      gibbs[static_cast<std::size_t>(k)] = std::exp(-beta * (J[static_cast<std::size_t>(k)] - shift));
      Z += gibbs[static_cast<std::size_t>(k)];
    }
    Z *= width;
    double residual = 0.0;
    for (int k = 0; k < M; ++k) {
      const double target = gibbs[static_cast<std::size_t>(k)] / Z;
      const double old = result.grid.density[static_cast<std::size_t>(k)];
      const double next = (1.0 - damping) * old + damping * target;
      residual = std::max(residual, std::abs(next - old));
      result.grid.density[static_cast<std::size_t>(k)] = next;
    }
    result.iterations = it + 1;
    result.residual = residual;
    if (residual <= tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

DensityComparison compare_particles_to_density(const ParticleEnsemble& ensemble,
                                               const DensityGrid& grid) {
  grid.validate();
  if (!(ensemble.support() == grid.support)) {
    throw ConfigError("particle support does not match the grid support");
  }
  const int M = grid.binCount;
  const double width = grid.cellWidth();
  DensityComparison out;
  out.histogram = grid;
  out.histogram.density.assign(static_cast<std::size_t>(M), 0.0);
  const int N = ensemble.size();
  for (int i = 0; i < N; ++i) {
    auto bin = static_cast<int>((ensemble.particle(i) - grid.support.lower) / width);
    bin = std::clamp(bin, 0, M - 1);
    out.histogram.density[static_cast<std::size_t>(bin)] += 1.0;
  }
  for (double& h : out.histogram.density) h /= N * width;
  double l1 = 0.0;
  for (int k = 0; k < M; ++k) {
    l1 += std::abs(out.histogram.density[static_cast<std::size_t>(k)] -
                   grid.density[static_cast<std::size_t>(k)]) *
          width;
  }
  out.l1Distance = l1;
  return out;
}

ParticleEnsemble sample_from_density(const DensityGrid& grid, int count, RandomSource& rng) {
  grid.validate();
  if (count < 1) throw ConfigError("sample_from_density needs count >= 1");
  const int M = grid.binCount;
  const double width = grid.cellWidth();
  std::vector<double> cumulative(static_cast<std::size_t>(M), 0.0);
  double acc = 0.0;
  for (int k = 0; k < M; ++k) {
    acc += grid.density[static_cast<std::size_t>(k)] * width;
    cumulative[static_cast<std::size_t>(k)] = acc;
  }
  std::vector<double> particles(static_cast<std::size_t>(count), 0.0);
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto bin = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), static_cast<std::size_t>(M - 1));
    const double lo = grid.support.lower + static_cast<double>(bin) * width;
    particles[static_cast<std::size_t>(i)] =
        std::min(lo + rng.uniform() * width, grid.support.upper);
  }
  return ParticleEnsemble(std::move(particles), grid.support);
}

}  // namespace rkl
