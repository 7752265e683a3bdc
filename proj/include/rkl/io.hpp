// Dataset ingestion (CSV and libsvm) and CSV artifact writers.
#pragma once

#include <string>

#include "rkl/meanfield.hpp"
#include "rkl/measure.hpp"

namespace rkl {

enum class DataFormat { kCsv, kLibsvm };

// CSV: label in the first column, features after; a non-numeric first line is
// skipped as a header with a warning on stderr. libsvm: "label idx:val ..."
// with 1-based indices expanded to a dense matrix. Labels in {0,1} are
// remapped to {-1,+1} with a warning. Malformed rows report the line number.
LabeledDataset ingest(const std::string& path, DataFormat format);

DataFormat parse_format(const std::string& name);

// label,f0,f1,... with a header row.
void write_labeled_csv(const LabeledDataset& data, const std::string& path);

// index,value rows.
void write_particles_csv(const ParticleEnsemble& ensemble, const std::string& path);

// Reads the value column of an index,value file back.
std::vector<double> read_particles_csv(const std::string& path);

// binLeft,binRight,density rows.
void write_histogram_csv(const DensityGrid& grid, const std::string& path);

}  // namespace rkl
