#include "rkl/cli_run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "rkl/errors.hpp"
#include "rkl/eval.hpp"
#include "rkl/features.hpp"
#include "rkl/io.hpp"
#include "rkl/langevin.hpp"
#include "rkl/lsh.hpp"
#include "rkl/meanfield.hpp"
#include "rkl/measure.hpp"
#include "rkl/mmd.hpp"
#include "rkl/objective.hpp"
#include "rkl/rng.hpp"
#include "rkl/synthetic.hpp"

namespace rkl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json data_defaults() { return json{{"path", ""}, {"format", "csv"}}; }

json synth_defaults() {
  return json{{"count", 200}, {"dimension", 10}, {"lambda", 0.5}, {"scale", 0.31622776601683794}};
}

json support_defaults() { return json{{"lower", 0.0}, {"upper", 10.0}}; }

std::string type_name(const json& value) {
  if (value.is_object()) return "object";
  if (value.is_array()) return "array";
  if (value.is_string()) return "string";
  if (value.is_boolean()) return "bool";
  if (value.is_number()) return "number";
  return "null";
}

SupportInterval support_from(const json& cfg) {
  return SupportInterval(cfg.at("support").at("lower").get<double>(),
                         cfg.at("support").at("upper").get<double>());
}

LabeledDataset load_data(const json& cfg, RandomSource dataRng) {
  const std::string path = cfg.at("data").at("path").get<std::string>();
  if (!path.empty()) {
    return ingest(path, parse_format(cfg.at("data").at("format").get<std::string>()));
  }
  const json& s = cfg.at("synth");
  return make_classification(s.at("count").get<int>(), s.at("dimension").get<int>(),
                             s.at("lambda").get<double>(), s.at("scale").get<double>(), dataRng);
}

ParticleEnsemble load_particles(const json& particlesCfg, const SupportInterval& support,
                                RandomSource rng) {
  const std::string path = particlesCfg.at("path").get<std::string>();
  if (!path.empty()) return ParticleEnsemble(read_particles_csv(path), support);
  return uniform_reference(particlesCfg.at("count").get<int>(), support, rng);
}

std::string artifact_path(const std::string& outDir, const std::string& name) {
  return (fs::path(outDir) / name).string();
}

std::ofstream open_artifact(const std::string& outDir, const std::string& name, json& artifacts) {
  const std::string path = artifact_path(outDir, name);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << std::setprecision(17);
  artifacts.push_back(path);
  return out;
}

void write_codes_csv(std::ofstream& out, const std::vector<HashCode>& codes) {
  if (codes.empty()) return;
  out << "index";
  for (std::size_t c = 0; c < codes.front().symbols.size(); ++c) out << ",c" << c;
  out << "\n";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << i;
    for (const int s : codes[i].symbols) out << "," << s;
    out << "\n";
  }
}

struct CodeSet {
  LabeledDataset data;
  std::vector<HashCode> codes;
  bool binary = true;
  int maxDistance = 0;
  int alphabet = 2;
};

CodeSet build_codes(const json& cfg, RandomSource& root) {
  CodeSet out{load_data(cfg, root.substream(1)), {}, true, 0, 2};
  const SupportInterval support = support_from(cfg);
  const ParticleEnsemble ensemble = load_particles(cfg.at("particles"), support, root.substream(2));
  RandomSource familyRng = root.substream(3);
  const std::string mode = cfg.at("mode").get<std::string>();
  out.codes.reserve(static_cast<std::size_t>(out.data.count()));
  if (mode == "binary") {
    const BinaryHashFamily family =
        draw_binary_family(ensemble, cfg.at("bits").get<int>(), out.data.dimension(), familyRng);
    for (int i = 0; i < out.data.count(); ++i) out.codes.push_back(binary_hash(family, out.data.feature(i)));
    out.maxDistance = family.bits();
  } else if (mode == "qary") {
    RandomSource bankRng = root.substream(4);
    const FeatureBank bank =
        draw_features(ensemble, cfg.at("bankCount").get<int>(), out.data.dimension(), bankRng);
    const QaryHashFamily family = draw_qary_family(bank, cfg.at("alphabet").get<int>(),
                                                   cfg.at("codeLength").get<int>(), familyRng);
    for (int i = 0; i < out.data.count(); ++i) out.codes.push_back(qary_hash(family, out.data.feature(i)));
    out.binary = false;
    out.alphabet = family.alphabet;
    out.maxDistance = family.codeLength() * (family.alphabet / 2);
  } else {
    throw ConfigError("lsh mode must be 'binary' or 'qary'");
  }
  return out;
}

void run_train_kernel(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const LabeledDataset data = load_data(cfg, root.substream(1));
  const SupportInterval support = support_from(cfg);
  RandomSource referenceRng = root.substream(2);
  const ParticleEnsemble reference =
      uniform_reference(cfg.at("particles").get<int>(), support, referenceRng);

  LangevinConfig lc;
  lc.stepSize = cfg.at("eta").get<double>();
  lc.inverseTemperature = cfg.at("beta").get<double>();
  lc.totalSteps = cfg.at("steps").get<int>();
  lc.gamma = cfg.at("gamma").get<double>();
  lc.epsilon = cfg.at("epsilon").get<double>();
  lc.radius = cfg.at("radius").get<double>();
  lc.bisectionTolerance = cfg.at("bisectionTolerance").get<double>();
  lc.snapshotInterval = cfg.at("snapshotInterval").get<int>();
  lc.decayStepSize = cfg.at("decayStepSize").get<bool>();
  lc.seed = cfg.at("seed").get<std::uint64_t>();
  lc.validate();

  std::cerr << "[train-kernel] n=" << data.count() << " N=" << reference.size()
            << " R=" << lc.radius << "\n";
  const TrainResult result = train(lc, data, reference);

  write_particles_csv(result.ensemble, artifact_path(outDir, "particles.csv"));
  artifacts.push_back(artifact_path(outDir, "particles.csv"));
  write_particles_csv(reference, artifact_path(outDir, "reference.csv"));
  artifacts.push_back(artifact_path(outDir, "reference.csv"));
  {
    std::ofstream history = open_artifact(outDir, "history.csv", artifacts);
    history << "phase,multiplier,lower,upper,constraint,feasible\n";
    for (const BisectionRecord& r : result.history) {
      history << r.phase << "," << r.multiplier << "," << r.lower << "," << r.upper << ","
              << r.constraint << "," << (r.feasible ? 1 : 0) << "\n";
    }
  }
  if (!result.trajectory.empty()) {
    std::ofstream traj = open_artifact(outDir, "trajectory.csv", artifacts);
    traj << "snapshot,index,value\n";
    for (std::size_t s = 0; s < result.trajectory.size(); ++s) {
      for (int k = 0; k < result.trajectory[s].size(); ++k) {
        traj << s << "," << k << "," << result.trajectory[s].particle(k) << "\n";
      }
    }
  }

  const KernelUnderMeasure trained{result.ensemble};
  const KernelUnderMeasure initial{reference};
  ObjectiveConfig oc;
  oc.gamma = lc.gamma;
  oc.lagrangeH = 0.0;
  oc.epsilon = lc.epsilon;
  metrics["multiplier"] = result.multiplier;
  metrics["bracketLow"] = result.bracketLow;
  metrics["bracketHigh"] = result.bracketHigh;
  metrics["constraint"] = result.constraintValue;
  metrics["alignmentInitial"] = alignment(initial, data);
  metrics["alignmentTrained"] = alignment(trained, data);
  metrics["riskTrained"] = regularized_risk(trained, data, oc);
  metrics["trials"] = result.history.size();
}

void run_features(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const LabeledDataset data = load_data(cfg, root.substream(1));
  const SupportInterval support = support_from(cfg);
  const ParticleEnsemble ensemble = load_particles(cfg.at("particles"), support, root.substream(2));
  RandomSource bankRng = root.substream(3);
  const FeatureBank bank = draw_features(ensemble, cfg.at("count").get<int>(), data.dimension(), bankRng);
  save_feature_bank(bank, artifact_path(outDir, "bank.csv"));
  artifacts.push_back(artifact_path(outDir, "bank.csv"));

  const Eigen::MatrixXd mapped = feature_matrix(bank, dataset_matrix(data));
  std::ofstream out = open_artifact(outDir, "mapped.csv", artifacts);
  out << "label";
  for (int c = 0; c < bank.count(); ++c) out << ",phi" << c;
  out << "\n";
  for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
    out << data.label(static_cast<int>(i));
    for (Eigen::Index c = 0; c < mapped.cols(); ++c) out << "," << mapped(i, c);
    out << "\n";
  }
  metrics["featureCount"] = bank.count();
  metrics["dimension"] = bank.dimension();
  metrics["rows"] = data.count();
}

void run_lsh_build(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const CodeSet set = build_codes(cfg, root);
  std::ofstream out = open_artifact(outDir, "codes.csv", artifacts);
  write_codes_csv(out, set.codes);
  metrics["rows"] = set.codes.size();
  metrics["codeLength"] = set.codes.empty() ? 0 : static_cast<int>(set.codes.front().symbols.size());
  metrics["alphabet"] = set.alphabet;
}

void run_lsh_query(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const CodeSet set = build_codes(cfg, root);
  const int n = set.data.count();
  const int queries = std::min(cfg.at("queries").get<int>(), n);
  const int neighborhood = std::min(cfg.at("neighborhood").get<int>(), n - 1);
  if (neighborhood < 1) throw DataError("lsh-query needs at least two data points");

  std::vector<std::set<int>> relevant(static_cast<std::size_t>(queries));
  for (int q = 0; q < queries; ++q) {
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
      if (j != q) ranked.emplace_back(set.data.squaredDistance(q, j), j);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + neighborhood, ranked.end());
    for (int r = 0; r < neighborhood; ++r) relevant[static_cast<std::size_t>(q)].insert(ranked[static_cast<std::size_t>(r)].second);
  }

  std::ofstream out = open_artifact(outDir, "pr.csv", artifacts);
  out << "threshold,precision,recall\n";
  double fullRecallThreshold = -1.0;
  for (int t = 0; t <= set.maxDistance; ++t) {
    double precision = 0.0;
    double recall = 0.0;
    for (int q = 0; q < queries; ++q) {
      std::set<int> retrieved;
      for (int j = 0; j < n; ++j) {
        if (j == q) continue;
        const int d = set.binary ? hamming_distance(set.codes[static_cast<std::size_t>(q)],
                                                    set.codes[static_cast<std::size_t>(j)])
                                 : lee_distance(set.codes[static_cast<std::size_t>(q)],
                                                set.codes[static_cast<std::size_t>(j)], set.alphabet);
        if (d <= t) retrieved.insert(j);
      }
      const auto [p, r] = precision_recall(retrieved, relevant[static_cast<std::size_t>(q)]);
      precision += p;
      recall += r;
    }
    precision /= queries;
    recall /= queries;
    out << t << "," << precision << "," << recall << "\n";
    if (recall >= 1.0 && fullRecallThreshold < 0.0) fullRecallThreshold = t;
  }
  metrics["queries"] = queries;
  metrics["neighborhood"] = neighborhood;
  metrics["fullRecallThreshold"] = fullRecallThreshold;
}

void run_mmd_test(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const SupportInterval support = support_from(cfg);
  const json& bankCfg = cfg.at("bankParticles");
  const std::string particlesPath = bankCfg.at("path").get<std::string>();
  std::vector<double> particles;
  if (particlesPath.empty()) {
    particles.push_back(bankCfg.at("bandwidth").get<double>());
  } else {
    particles = read_particles_csv(particlesPath);
  }
  const ParticleEnsemble ensemble(std::move(particles), support);
  const int ambient = cfg.at("ambientDimension").get<int>();
  RandomSource bankRng = root.substream(2);
  const FeatureBank bank = draw_features(ensemble, cfg.at("featureCount").get<int>(), ambient, bankRng);

  const auto tauGrid = cfg.at("tauGrid").get<std::vector<double>>();
  RandomSource powerRng = root.substream(3);
  const auto curve = estimate_power(cfg.at("lambda").get<double>(), ambient,
                                    cfg.at("latentDimension").get<int>(), cfg.at("countV").get<int>(),
                                    cfg.at("countW").get<int>(), cfg.at("trials").get<int>(), tauGrid,
                                    bank, powerRng);

  std::ofstream out = open_artifact(outDir, "power.csv", artifacts);
  out << "tau,power\n";
  double largestFullPower = -std::numeric_limits<double>::infinity();
  double maxPower = 0.0;
  for (const auto& [tau, power] : curve) {
    out << tau << "," << power << "\n";
    maxPower = std::max(maxPower, power);
    if (power >= 1.0) largestFullPower = std::max(largestFullPower, tau);
  }
  metrics["maxPower"] = maxPower;
  if (std::isfinite(largestFullPower)) {
    metrics["largestTauWithFullPower"] = largestFullPower;
  } else {
    metrics["largestTauWithFullPower"] = nullptr;
  }
}

void run_pde_simulate(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const LabeledDataset data = load_data(cfg, root.substream(1));
  const SupportInterval support = support_from(cfg);
  const int bins = cfg.at("bins").get<int>();
  const double beta = cfg.at("beta").get<double>();
  const double gamma = cfg.at("gamma").get<double>();
  const double horizon = cfg.at("horizon").get<double>();
  const double userDt = cfg.at("dt").get<double>();
  const double driftScale = cfg.at("driftScale").get<double>();
  const int snapshotEvery = cfg.at("snapshotEvery").get<int>();
  if (!(horizon > 0.0)) throw ConfigError("pde-simulate needs horizon > 0");
  if (!(driftScale > 0.0)) throw ConfigError("pde-simulate needs driftScale > 0");

  const MeanFieldModel model(data, support, bins, gamma);
  DensityGrid grid = DensityGrid::uniform(support, bins);

  std::ofstream density = open_artifact(outDir, "density.csv", artifacts);
  density << "time,bin,density\n";
  const auto snapshot = [&]() {
    for (int k = 0; k < bins; ++k) {
      density << grid.time << "," << k << "," << grid.density[static_cast<std::size_t>(k)] << "\n";
    }
  };
  snapshot();

  long steps = 0;
  double maxClip = 0.0;
  StepDiagnostics diag;
  while (grid.time < horizon - 1e-12) {
    DriftField field = model.drift(grid);
    if (driftScale != 1.0) {
      for (double& v : field.values) v *= driftScale;
    }
    double dt = max_stable_dt(grid, field, beta);
    if (userDt > 0.0) dt = std::min(dt, userDt);
    dt = std::min(dt, horizon - grid.time);
    grid = step_pde(grid, field, beta, dt, &diag);
    maxClip = std::max(maxClip, diag.clippedMass);
    ++steps;
    if (snapshotEvery > 0 && steps % snapshotEvery == 0) snapshot();
    if (steps > 50'000'000L) throw NumericError("pde-simulate exceeded the step budget");
  }
  snapshot();
  write_histogram_csv(grid, artifact_path(outDir, "final_density.csv"));
  artifacts.push_back(artifact_path(outDir, "final_density.csv"));
  metrics["steps"] = steps;
  metrics["finalTime"] = grid.time;
  metrics["maxClippedMass"] = maxClip;

  const json& gibbsCfg = cfg.at("gibbs");
  if (gibbsCfg.at("enabled").get<bool>()) {
    const GibbsResult fixedPoint = gibbs_fixed_point(
        data, beta * driftScale, gamma, DensityGrid::uniform(support, bins),
        gibbsCfg.at("damping").get<double>(), gibbsCfg.at("maxIterations").get<int>(),
        gibbsCfg.at("tolerance").get<double>());
    write_histogram_csv(fixedPoint.grid, artifact_path(outDir, "gibbs.csv"));
    artifacts.push_back(artifact_path(outDir, "gibbs.csv"));
    double l1 = 0.0;
    for (int k = 0; k < bins; ++k) {
      l1 += std::abs(grid.density[static_cast<std::size_t>(k)] -
                     fixedPoint.grid.density[static_cast<std::size_t>(k)]) *
            grid.cellWidth();
    }
    metrics["gibbsConverged"] = fixedPoint.converged;
    metrics["gibbsIterations"] = fixedPoint.iterations;
    metrics["gibbsResidual"] = fixedPoint.residual;
    metrics["l1ToGibbs"] = l1;
  }

  const std::string particlesPath = cfg.at("particles").at("path").get<std::string>();
  if (!particlesPath.empty()) {
    const ParticleEnsemble ensemble(read_particles_csv(particlesPath), support);
    const DensityComparison cmp = compare_particles_to_density(ensemble, grid);
    write_histogram_csv(cmp.histogram, artifact_path(outDir, "particle_histogram.csv"));
    artifacts.push_back(artifact_path(outDir, "particle_histogram.csv"));
    metrics["l1ToParticles"] = cmp.l1Distance;
  }
}

LabeledDataset subset(const LabeledDataset& data, const std::vector<int>& indices) {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(indices.size());
  labels.reserve(indices.size());
  for (const int i : indices) {
    features.push_back(data.feature(i));
    labels.push_back(data.label(i));
  }
  return LabeledDataset(std::move(features), std::move(labels));
}

void run_svm(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  const auto started = std::chrono::steady_clock::now();
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const LabeledDataset full = load_data(cfg, root.substream(1));
  const SupportInterval support = support_from(cfg);

  // Train/test split: explicit test file wins over the fraction split.
  const std::string testPath = cfg.at("test").at("path").get<std::string>();
  LabeledDataset train = full;
  LabeledDataset test = full;
  if (!testPath.empty()) {
    test = ingest(testPath, parse_format(cfg.at("data").at("format").get<std::string>()));
  } else {
    const double fraction = cfg.at("test").at("fraction").get<double>();
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
    std::vector<int> indices(static_cast<std::size_t>(full.count()));
    for (int i = 0; i < full.count(); ++i) indices[static_cast<std::size_t>(i)] = i;
    RandomSource splitRng = root.substream(2);
    for (int i = full.count() - 1; i > 0; --i) {
      const auto j = static_cast<int>(splitRng.integer(static_cast<std::uint64_t>(i) + 1));
      std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    int testCount = static_cast<int>(std::lround(fraction * full.count()));
    testCount = std::clamp(testCount, 1, full.count() - 2);
    const std::vector<int> testIdx(indices.begin(), indices.begin() + testCount);
    const std::vector<int> trainIdx(indices.begin() + testCount, indices.end());
    train = subset(full, trainIdx);
    test = subset(full, testIdx);
  }

  // Kernel scale source: a particle file, the unit bandwidth, or the kNN rule.
  const json& kernelCfg = cfg.at("kernel");
  const std::string mode = kernelCfg.at("mode").get<std::string>();
  std::vector<double> particles;
  if (mode == "particles") {
    particles = read_particles_csv(kernelCfg.at("particlesPath").get<std::string>());
  } else if (mode == "unit") {
    particles.push_back(1.0);
  } else if (mode == "knn") {
    const double sigma2 = knn_bandwidth(train, kernelCfg.at("k").get<int>());
    particles.push_back(1.0 / sigma2);
  } else {
    throw ConfigError("kernel mode must be 'particles', 'unit', or 'knn'");
  }
  for (double& xi : particles) {
    if (!support.contains(xi)) {
      std::cerr << "[svm] clamping scale " << xi << " into the support\n";
      xi = std::clamp(xi, support.lower, support.upper);
    }
  }
  const ParticleEnsemble ensemble(std::move(particles), support);

  RandomSource bankRng = root.substream(3);
  const FeatureBank bank =
      draw_features(ensemble, cfg.at("featureCount").get<int>(), full.dimension(), bankRng);
  Eigen::MatrixXd trainF = feature_matrix(bank, dataset_matrix(train));
  Eigen::MatrixXd testF = feature_matrix(bank, dataset_matrix(test));
  if (cfg.at("bias").get<bool>()) {
    trainF.conservativeResize(Eigen::NoChange, trainF.cols() + 1);
    trainF.col(trainF.cols() - 1).setOnes();
    testF.conservativeResize(Eigen::NoChange, testF.cols() + 1);
    testF.col(testF.cols() - 1).setOnes();
  }

  RandomSource svmRng = root.substream(4);
  std::vector<double> epochObjectives;
  const LinearModel model = svm_train(trainF, train.labels(), cfg.at("lambda").get<double>(),
                                      cfg.at("epochs").get<int>(), svmRng, &epochObjectives);
  const double trainError = svm_error(model, trainF, train.labels());
  const double testError = svm_error(model, testF, test.labels());

  {
    std::ofstream weights = open_artifact(outDir, "weights.csv", artifacts);
    weights << "index,weight\n";
    for (Eigen::Index i = 0; i < model.weights.size(); ++i) weights << i << "," << model.weights(i) << "\n";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  {
    std::ofstream table = open_artifact(outDir, "errors.csv", artifacts);
    table << "method,N,trainErr,testErr,seconds\n";
    table << mode << "," << bank.count() << "," << trainError << "," << testError << "," << seconds
          << "\n";
  }
  metrics["trainError"] = trainError;
  metrics["testError"] = testError;
  metrics["epochObjectives"] = epochObjectives;
  metrics["trainRows"] = train.count();
  metrics["testRows"] = test.count();
}

void run_kmeans_label(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  const LabeledDataset data = load_data(cfg, root.substream(1));
  RandomSource clusterRng = root.substream(2);
  const KMeansLabeling result = kmeans_label(data.features(), cfg.at("k").get<int>(), clusterRng,
                                             cfg.at("maxIterations").get<int>());
  std::ofstream out = open_artifact(outDir, "labels.csv", artifacts);
  out << "index,cluster,label\n";
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    out << i << "," << result.assignments[i] << "," << result.labels[i] << "\n";
  }
  metrics["withinClusterSS"] = result.withinClusterSS;
  metrics["positiveCluster"] = result.positiveCluster;
  json sizes = json::array();
  for (int c = 0; c < cfg.at("k").get<int>(); ++c) {
    sizes.push_back(std::count(result.assignments.begin(), result.assignments.end(), c));
  }
  metrics["clusterSizes"] = sizes;
}

void run_synth_data(const json& cfg, const std::string& outDir, json& metrics, json& artifacts) {
  RandomSource root(cfg.at("seed").get<std::uint64_t>());
  RandomSource dataRng = root.substream(1);
  const LabeledDataset data =
      make_classification(cfg.at("count").get<int>(), cfg.at("dimension").get<int>(),
                          cfg.at("lambda").get<double>(), cfg.at("scale").get<double>(), dataRng);
  const std::string path = artifact_path(outDir, cfg.at("file").get<std::string>());
  write_labeled_csv(data, path);
  artifacts.push_back(path);
  int positives = 0;
  for (int i = 0; i < data.count(); ++i) positives += data.label(i) == 1 ? 1 : 0;
  metrics["rows"] = data.count();
  metrics["dimension"] = data.dimension();
  metrics["positives"] = positives;
}

}  // namespace

json default_config(const std::string& command) {
  json cfg{{"seed", 1}, {"out", "out"}};
  if (command == "train-kernel") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["support"] = support_defaults();
    cfg["particles"] = 100;
    cfg["eta"] = 1e-3;
    cfg["beta"] = 1000.0;
    cfg["steps"] = 300;
    cfg["gamma"] = 1.0;
    cfg["epsilon"] = 0.05;
    cfg["radius"] = 1.0;
    cfg["bisectionTolerance"] = 0.05;
    cfg["snapshotInterval"] = 0;
    cfg["decayStepSize"] = false;
  } else if (command == "features") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["support"] = support_defaults();
    cfg["particles"] = json{{"path", ""}, {"count", 100}};
    cfg["count"] = 500;
  } else if (command == "lsh-build" || command == "lsh-query") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["support"] = support_defaults();
    cfg["particles"] = json{{"path", ""}, {"count", 100}};
    cfg["mode"] = "binary";
    cfg["bits"] = 64;
    cfg["alphabet"] = 4;
    cfg["codeLength"] = 32;
    cfg["bankCount"] = 256;
    if (command == "lsh-query") {
      cfg["queries"] = 10;
      cfg["neighborhood"] = 50;
    }
  } else if (command == "mmd-test") {
    cfg["lambda"] = 0.5;
    cfg["ambientDimension"] = 20;
    cfg["latentDimension"] = 10;
    cfg["countV"] = 50;
    cfg["countW"] = 50;
    cfg["trials"] = 100;
    cfg["tauGrid"] = json::array({0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2});
    cfg["featureCount"] = 2000;
    cfg["support"] = support_defaults();
    cfg["bankParticles"] = json{{"path", ""}, {"bandwidth", 1.0}};
  } else if (command == "pde-simulate") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["support"] = support_defaults();
    cfg["bins"] = 50;
    cfg["beta"] = 20.0;
    cfg["gamma"] = 1e4;
    cfg["dt"] = 0.0;
    cfg["horizon"] = 1.0;
    cfg["snapshotEvery"] = 0;
    cfg["driftScale"] = 1.0;
    cfg["gibbs"] = json{{"enabled", false}, {"damping", 0.5}, {"maxIterations", 500}, {"tolerance", 1e-10}};
    cfg["particles"] = json{{"path", ""}};
  } else if (command == "svm") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["support"] = support_defaults();
    cfg["test"] = json{{"path", ""}, {"fraction", 0.3}};
    cfg["kernel"] = json{{"mode", "unit"}, {"particlesPath", ""}, {"k", 3}};
    cfg["featureCount"] = 500;
    cfg["lambda"] = 1e-3;
    cfg["epochs"] = 5;
    cfg["bias"] = true;
  } else if (command == "kmeans-label") {
    cfg["data"] = data_defaults();
    cfg["synth"] = synth_defaults();
    cfg["k"] = 2;
    cfg["maxIterations"] = 100;
  } else if (command == "synth-data") {
    cfg["count"] = 200;
    cfg["dimension"] = 10;
    cfg["lambda"] = 0.5;
    cfg["scale"] = 0.31622776601683794;
    cfg["file"] = "synth.csv";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return cfg;
}

void validate_config(const json& user, const json& defaults, const std::string& prefix) {
  if (!user.is_object()) {
    throw ConfigError("config section '" + (prefix.empty() ? "<root>" : prefix) +
                      "' must be a JSON object");
  }
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    const json& ref = defaults.at(key);
    if (ref.is_object()) {
      validate_config(value, ref, path);
    } else if (ref.is_array()) {
      if (!value.is_array()) throw ConfigError("config key '" + path + "' must be an array");
    } else if (ref.is_string()) {
      if (!value.is_string()) throw ConfigError("config key '" + path + "' must be a string");
    } else if (ref.is_boolean()) {
      if (!value.is_boolean()) throw ConfigError("config key '" + path + "' must be a bool");
    } else if (ref.is_number()) {
      if (!value.is_number()) throw ConfigError("config key '" + path + "' must be a number");
    } else if (type_name(value) != type_name(ref)) {
      throw ConfigError("config key '" + path + "' has the wrong type");
    }
  }
}

json merge_config(json defaults, const json& user) {
  for (const auto& [key, value] : user.items()) {
    if (defaults.contains(key) && defaults.at(key).is_object() && value.is_object()) {
      defaults[key] = merge_config(defaults.at(key), value);
    } else {
      defaults[key] = value;
    }
  }
  return defaults;
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &config;
  std::stringstream stream(key);
  std::vector<std::string> tokens;
  std::string token;
  while (std::getline(stream, token, '.')) tokens.push_back(token);
  if (tokens.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (!node->contains(tokens[i]) || !(*node)[tokens[i]].is_object()) {
      throw ConfigError("unknown config section '" + tokens[i] + "' in override '" + key + "'");
    }
    node = &(*node)[tokens[i]];
  }
  const std::string& leaf = tokens.back();
  if (!node->contains(leaf)) throw ConfigError("unknown config key '" + key + "'");
  json& target = (*node)[leaf];
  if (target.is_object()) throw ConfigError("cannot override object key '" + key + "'");

  json parsed = json::parse(raw, nullptr, false);
  if (parsed.is_discarded() || parsed.is_object()) parsed = raw;  // keep as string
  if (target.is_number() && !parsed.is_number()) {
    throw ConfigError("override '" + key + "' must be a number");
  }
  if (target.is_boolean() && !parsed.is_boolean()) {
    throw ConfigError("override '" + key + "' must be a bool");
  }
  if (target.is_string() && !parsed.is_string()) parsed = raw;
  if (target.is_array() && !parsed.is_array()) {
    throw ConfigError("override '" + key + "' must be a JSON array");
  }
  target = parsed;
}

std::string config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char c : dump) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

json run_command(const std::string& command, const json& config) {
  const json defaults = default_config(command);
  validate_config(config, defaults);
  const json cfg = merge_config(defaults, config);

  const std::string outDir = cfg.at("out").get<std::string>();
  fs::create_directories(outDir);

  json metrics = json::object();
  json artifacts = json::array();
  const auto started = std::chrono::steady_clock::now();
  if (command == "train-kernel") {
    run_train_kernel(cfg, outDir, metrics, artifacts);
  } else if (command == "features") {
    run_features(cfg, outDir, metrics, artifacts);
  } else if (command == "lsh-build") {
    run_lsh_build(cfg, outDir, metrics, artifacts);
  } else if (command == "lsh-query") {
    run_lsh_query(cfg, outDir, metrics, artifacts);
  } else if (command == "mmd-test") {
    run_mmd_test(cfg, outDir, metrics, artifacts);
  } else if (command == "pde-simulate") {
    run_pde_simulate(cfg, outDir, metrics, artifacts);
  } else if (command == "svm") {
    run_svm(cfg, outDir, metrics, artifacts);
  } else if (command == "kmeans-label") {
    run_kmeans_label(cfg, outDir, metrics, artifacts);
  } else if (command == "synth-data") {
    run_synth_data(cfg, outDir, metrics, artifacts);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json summary{{"command", command},  {"config", cfg},       {"configHash", config_hash(cfg)},
               {"seed", cfg.at("seed")}, {"wallSeconds", wall}, {"metrics", metrics},
               {"artifacts", artifacts}};
  const std::string summaryPath = (fs::path(outDir) / "summary.json").string();
  std::ofstream out(summaryPath);
  if (!out) throw DataError("cannot write " + summaryPath);
  out << summary.dump(2) << "\n";
  return summary;
}

}  // namespace rkl
