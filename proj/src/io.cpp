#include "rkl/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

bool parse_double(const std::string& token, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(token, &pos);
    while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
    return pos == token.size() && std::isfinite(*out);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(line);
  std::string token;
  while (std::getline(stream, token, sep)) out.push_back(token);
  return out;
}

bool blank(const std::string& line) {
  for (const char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Accepts label sets {-1,+1} as-is and {0,1} with a remap warning.
std::vector<int> normalize_labels(const std::vector<double>& raw, const std::string& path) {
  bool sawZero = false;
  bool sawMinus = false;
  for (const double v : raw) {
    if (v == 0.0) {
      sawZero = true;
    } else if (v == -1.0) {
      sawMinus = true;
    } else if (v != 1.0) {
      throw DataError(path + ": labels must be in {-1,+1} or {0,1}");
    }
  }
  if (sawZero && sawMinus) throw DataError(path + ": labels mix {0,1} and {-1,+1} conventions");
  std::vector<int> labels;
  labels.reserve(raw.size());
  if (sawZero) {
    std::cerr << "[ingest] " << path << ": remapping labels {0,1} -> {-1,+1}\n";
    for (const double v : raw) labels.push_back(v == 0.0 ? -1 : 1);
  } else {
    for (const double v : raw) labels.push_back(v < 0.0 ? -1 : 1);
  }
  return labels;
}

LabeledDataset ingest_csv(std::istream& in, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::vector<double> rawLabels;
  std::string line;
  int lineNumber = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineNumber;
    if (blank(line)) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (first) {
      first = false;
      double probe = 0.0;
      if (!parse_double(fields.front(), &probe)) {
        std::cerr << "[ingest] " << path << ": skipping header line 1\n";
        continue;
      }
    }
    if (fields.size() < 2) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": need label plus features");
    }
    std::vector<double> row(fields.size() - 1, 0.0);
    double label = 0.0;
    if (!parse_double(fields[0], &label)) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": malformed label");
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (!parse_double(fields[c], &row[c - 1])) {
        throw DataError(path + " line " + std::to_string(lineNumber) + ": malformed field " +
                        std::to_string(c));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": expected " +
                      std::to_string(rows.front().size()) + " features, got " +
                      std::to_string(row.size()));
    }
    rawLabels.push_back(label);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return LabeledDataset(std::move(rows), normalize_labels(rawLabels, path));
}

LabeledDataset ingest_libsvm(std::istream& in, const std::string& path) {
  std::vector<std::vector<std::pair<int, double>>> sparse;
  std::vector<double> rawLabels;
  std::string line;
  int lineNumber = 0;
  int maxIndex = 0;
  while (std::getline(in, line)) {
    ++lineNumber;
    if (blank(line) || line.front() == '#') continue;
    std::stringstream stream(line);
    std::string token;
    if (!(stream >> token)) continue;
    double label = 0.0;
    if (!parse_double(token, &label)) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": malformed label");
    }
    std::vector<std::pair<int, double>> entries;
    while (stream >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos) {
        throw DataError(path + " line " + std::to_string(lineNumber) + ": expected idx:value, got '" +
                        token + "'");
      }
      double indexValue = 0.0;
      double value = 0.0;
      if (!parse_double(token.substr(0, colon), &indexValue) || indexValue < 1.0 ||
          indexValue != std::floor(indexValue)) {
        throw DataError(path + " line " + std::to_string(lineNumber) + ": bad feature index in '" +
                        token + "'");
      }
      if (!parse_double(token.substr(colon + 1), &value)) {
        throw DataError(path + " line " + std::to_string(lineNumber) + ": bad feature value in '" +
                        token + "'");
      }
      const int index = static_cast<int>(indexValue);
      maxIndex = std::max(maxIndex, index);
      entries.emplace_back(index, value);
    }
    rawLabels.push_back(label);
    sparse.push_back(std::move(entries));
  }
  if (sparse.empty()) throw DataError(path + ": no data rows");
  if (maxIndex == 0) throw DataError(path + ": no features present");
  std::vector<std::vector<double>> rows(sparse.size(),
                                        std::vector<double>(static_cast<std::size_t>(maxIndex), 0.0));
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    for (const auto& [index, value] : sparse[i]) {
      rows[i][static_cast<std::size_t>(index - 1)] = value;
    }
  }
  return LabeledDataset(std::move(rows), normalize_labels(rawLabels, path));
}

}  // namespace

LabeledDataset ingest(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return format == DataFormat::kCsv ? ingest_csv(in, path) : ingest_libsvm(in, path);
}

DataFormat parse_format(const std::string& name) {
  if (name == "csv") return DataFormat::kCsv;
  if (name == "libsvm") return DataFormat::kLibsvm;
  throw ConfigError("unknown data format '" + name + "' (expected csv or libsvm)");
}

void write_labeled_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << std::setprecision(17);
  out << "label";
  for (int c = 0; c < data.dimension(); ++c) out << ",f" << c;
  out << "\n";
  for (int i = 0; i < data.count(); ++i) {
    out << data.label(i);
    for (const double v : data.feature(i)) out << "," << v;
    out << "\n";
  }
}

void write_particles_csv(const ParticleEnsemble& ensemble, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << std::setprecision(17);
  out << "index,value\n";
  for (int k = 0; k < ensemble.size(); ++k) out << k << "," << ensemble.particle(k) << "\n";
}

std::vector<double> read_particles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<double> values;
  std::string line;
  int lineNumber = 0;
  while (std::getline(in, line)) {
    ++lineNumber;
    if (blank(line)) continue;
    const std::vector<std::string> fields = split(line, ',');
    double probe = 0.0;
    if (lineNumber == 1 && !parse_double(fields.front(), &probe)) continue;  // header
    if (fields.size() != 2) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": expected index,value");
    }
    double value = 0.0;
    if (!parse_double(fields[1], &value)) {
      throw DataError(path + " line " + std::to_string(lineNumber) + ": malformed value");
    }
    values.push_back(value);
  }
  if (values.empty()) throw DataError(path + ": no particles");
  return values;
}

void write_histogram_csv(const DensityGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << std::setprecision(17);
  out << "binLeft,binRight,density\n";
  for (int k = 0; k < grid.binCount; ++k) {
    const double left = grid.support.lower + k * grid.cellWidth();
    out << left << "," << left + grid.cellWidth() << "," << grid.density[static_cast<std::size_t>(k)]
        << "\n";
  }
}

}  // namespace rkl
