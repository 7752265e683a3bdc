// Synthetic benchmark generator: balanced labels with class-dependent
// isotropic scale, x = scale * sqrt(1 + y*lambda) * z, z ~ N(0, I_d).
#pragma once

#include "rkl/measure.hpp"
#include "rkl/rng.hpp"

namespace rkl {

LabeledDataset make_classification(int count, int dimension, double lambda, double scale,
                                   RandomSource& rng);

}  // namespace rkl
