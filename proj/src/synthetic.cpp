#include "rkl/synthetic.hpp"

#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

LabeledDataset make_classification(int count, int dimension, double lambda, double scale,
                                   RandomSource& rng) {
  if (count < 1 || dimension < 1) throw ConfigError("synthetic task needs count, dimension >= 1");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("synthetic lambda must lie in [0, 1)");
  if (!(scale > 0.0)) throw ConfigError("synthetic scale must be > 0");
  std::vector<std::vector<double>> features(static_cast<std::size_t>(count));
  std::vector<int> labels(static_cast<std::size_t>(count), 0);
  for (int i = 0; i < count; ++i) {
    const int y = rng.uniform() < 0.5 ? 1 : -1;
    const double classScale = scale * std::sqrt(1.0 + y * lambda);
    std::vector<double> x(static_cast<std::size_t>(dimension), 0.0);
    for (int c = 0; c < dimension; ++c) x[static_cast<std::size_t>(c)] = classScale * rng.normal();
    labels[static_cast<std::size_t>(i)] = y;
    features[static_cast<std::size_t>(i)] = std::move(x);
  }
  return LabeledDataset(std::move(features), std::move(labels));
}

}  // namespace rkl
