#include "rkl/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

FeatureBank draw_features(const ParticleEnsemble& ensemble, int count, int dimension,
                          RandomSource& rng) {
  if (count < 1 || dimension < 1) throw ConfigError("feature bank needs count >= 1 and dimension >= 1");
  FeatureBank bank;
  // Fork once so repeated calls on the same source give fresh banks, then key
  // every feature on its index for order-independent draws.
  RandomSource base = rng.child();
  bank.seed = base.seed();
  bank.frequencies.resize(count, dimension);
  bank.phases.resize(count);
  bank.sourceParticles.resize(static_cast<std::size_t>(count));
  const int N = ensemble.size();
  for (int k = 0; k < count; ++k) {
    RandomSource sub = base.substream(static_cast<std::uint64_t>(k));
    const double xi = ensemble.particle(static_cast<int>(sub.integer(static_cast<std::uint64_t>(N))));
    const double sigma = std::sqrt(2.0 * xi);
    for (int c = 0; c < dimension; ++c) bank.frequencies(k, c) = sigma * sub.normal();
    bank.phases(k) = sub.uniform(-kPi, kPi);
    bank.sourceParticles[static_cast<std::size_t>(k)] = xi;
  }
  return bank;
}

std::vector<double> feature_map(const FeatureBank& bank, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != bank.dimension()) {
    throw ConfigError("feature_map: input dimension " + std::to_string(x.size()) +
                      " does not match bank dimension " + std::to_string(bank.dimension()));
  }
  const double scale = std::sqrt(2.0 / bank.count());
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd arg = bank.frequencies * xv + bank.phases;
  std::vector<double> out(static_cast<std::size_t>(bank.count()));
  for (int k = 0; k < bank.count(); ++k) out[static_cast<std::size_t>(k)] = scale * std::cos(arg(k));
  return out;
}

Eigen::MatrixXd feature_matrix(const FeatureBank& bank, const Eigen::MatrixXd& X) {
  if (X.cols() != bank.dimension()) {
    throw ConfigError("feature_matrix: input dimension does not match bank dimension");
  }
  const double scale = std::sqrt(2.0 / bank.count());
  Eigen::MatrixXd arg = X * bank.frequencies.transpose();
  arg.rowwise() += bank.phases.transpose();
  return scale * arg.array().cos().matrix();
}

Eigen::MatrixXd dataset_matrix(const LabeledDataset& data) {
  Eigen::MatrixXd X(data.count(), data.dimension());
  for (int i = 0; i < data.count(); ++i) {
    for (int c = 0; c < data.dimension(); ++c) X(i, c) = data.feature(i)[static_cast<std::size_t>(c)];
  }
  return X;
}

void save_feature_bank(const FeatureBank& bank, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write feature bank to " + path);
  out.precision(17);
  out << bank.count() << "," << bank.dimension() << "," << bank.seed << "\n";
  for (int k = 0; k < bank.count(); ++k) {
    for (int c = 0; c < bank.dimension(); ++c) out << bank.frequencies(k, c) << ",";
    out << bank.phases(k) << "," << bank.sourceParticles[static_cast<std::size_t>(k)] << "\n";
  }
}

FeatureBank load_feature_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read feature bank from " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature bank file is empty: " + path);
  FeatureBank bank;
  int D = 0;
  int d = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> D >> comma >> d >> comma >> bank.seed) || D < 1 || d < 1) {
      throw DataError("malformed feature bank header in " + path);
    }
  }
  bank.frequencies.resize(D, d);
  bank.phases.resize(D);
  bank.sourceParticles.resize(static_cast<std::size_t>(D));
  for (int k = 0; k < D; ++k) {
    if (!std::getline(in, line)) throw DataError("feature bank truncated at row " + std::to_string(k));
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < d; ++c) {
      if (!std::getline(row, cell, ',')) throw DataError("feature bank row too short");
      bank.frequencies(k, c) = std::stod(cell);
    }
    if (!std::getline(row, cell, ',')) throw DataError("feature bank row missing phase");
    bank.phases(k) = std::stod(cell);
    if (!std::getline(row, cell, ',')) throw DataError("feature bank row missing particle");
    bank.sourceParticles[static_cast<std::size_t>(k)] = std::stod(cell);
  }
  return bank;
}

}  // namespace rkl
