// Dataset ingestion (CSV / libsvm), tabular writers, and round trips.
#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rkl/errors.hpp"
#include "rkl/io.hpp"
#include "rkl/meanfield.hpp"
#include "rkl/measure.hpp"
#include "rkl/rng.hpp"

namespace {

std::string tempPath(const std::string& name) { return ::testing::TempDir() + name; }

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  ASSERT_TRUE(out.good());
}

TEST(Csv, TwoRowRoundTrip) {
  rkl::LabeledDataset data({{1.5, -2.0}, {0.0, 4.25}}, {+1, -1});
  const std::string path = tempPath("roundtrip.csv");
  rkl::write_labeled_csv(data, path);
  const rkl::LabeledDataset back = rkl::ingest(path, rkl::DataFormat::kCsv);
  ASSERT_EQ(back.count(), 2);
  ASSERT_EQ(back.dimension(), 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back.label(i), data.label(i));
    EXPECT_EQ(back.feature(i), data.feature(i));
  }
}

TEST(Csv, HeaderRowSkipped) {
  const std::string path = tempPath("header.csv");
  writeFile(path, "label,f0,f1\n1,0.5,1.5\n-1,2.5,3.5\n");
  const rkl::LabeledDataset data = rkl::ingest(path, rkl::DataFormat::kCsv);
  ASSERT_EQ(data.count(), 2);
  EXPECT_EQ(data.label(0), +1);
  EXPECT_DOUBLE_EQ(data.feature(1)[1], 3.5);
}

TEST(Csv, ZeroOneLabelsRemapped) {
  const std::string path = tempPath("zeroone.csv");
  writeFile(path, "0,1.0\n1,2.0\n0,3.0\n");
  const rkl::LabeledDataset data = rkl::ingest(path, rkl::DataFormat::kCsv);
  EXPECT_EQ(data.label(0), -1);
  EXPECT_EQ(data.label(1), +1);
  EXPECT_EQ(data.label(2), -1);
}

TEST(Csv, MixedLabelConventionsRejected) {
  const std::string path = tempPath("mixed.csv");
  writeFile(path, "0,1.0\n-1,2.0\n");
  EXPECT_THROW(rkl::ingest(path, rkl::DataFormat::kCsv), rkl::DataError);
}

TEST(Csv, MalformedRowReportsLineNumber) {
  const std::string path = tempPath("malformed.csv");
  writeFile(path, "1,0.5\n-1,0.25\n1,zzz\n");
  try {
    rkl::ingest(path, rkl::DataFormat::kCsv);
    FAIL() << "expected DataError";
  } catch (const rkl::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, InconsistentWidthRejected) {
  const std::string path = tempPath("width.csv");
  writeFile(path, "1,0.5,1.0\n-1,0.25\n");
  EXPECT_THROW(rkl::ingest(path, rkl::DataFormat::kCsv), rkl::DataError);
}

TEST(Csv, MissingFileIsDataError) {
  EXPECT_THROW(rkl::ingest(tempPath("nope_does_not_exist.csv"), rkl::DataFormat::kCsv),
               rkl::DataError);
}

TEST(Libsvm, SparseRowExpandsToDenseZeros) {
  const std::string path = tempPath("sparse.libsvm");
  writeFile(path, "+1 2:0.5 4:1.25\n-1 1:1.0\n# trailing comment\n");
  const rkl::LabeledDataset data = rkl::ingest(path, rkl::DataFormat::kLibsvm);
  ASSERT_EQ(data.count(), 2);
  ASSERT_EQ(data.dimension(), 4);
  EXPECT_EQ(data.feature(0), (std::vector<double>{0.0, 0.5, 0.0, 1.25}));
  EXPECT_EQ(data.feature(1), (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(data.label(0), +1);
  EXPECT_EQ(data.label(1), -1);
}

TEST(Libsvm, MalformedIndexRejected) {
  const std::string path = tempPath("badidx.libsvm");
  writeFile(path, "+1 0:0.5\n");
  EXPECT_THROW(rkl::ingest(path, rkl::DataFormat::kLibsvm), rkl::DataError);
}

// Independent minimal CSV parser: the ingest path must agree with it on
// counts and checksums over a 1000-row random file.
TEST(Csv, ChecksumsMatchIndependentParser) {
  const std::string path = tempPath("big.csv");
  rkl::RandomSource rng(21);
  std::ostringstream file;
  const int rows = 1000, cols = 6;
  for (int i = 0; i < rows; ++i) {
    file << (rng.uniform() < 0.5 ? "-1" : "1");
    for (int c = 0; c < cols; ++c) file << ',' << (rng.uniform() * 10.0 - 5.0);
    file << '\n';
  }
  writeFile(path, file.str());

  long labelSum = 0;
  double featureSum = 0.0, featureAbsSum = 0.0;
  int parsedRows = 0;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string cell;
      bool first = true;
      while (std::getline(ls, cell, ',')) {
        if (first) {
          labelSum += std::stol(cell);
          first = false;
        } else {
          const double v = std::stod(cell);
          featureSum += v;
          featureAbsSum += std::abs(v);
        }
      }
      ++parsedRows;
    }
  }

  const rkl::LabeledDataset data = rkl::ingest(path, rkl::DataFormat::kCsv);
  ASSERT_EQ(data.count(), parsedRows);
  ASSERT_EQ(data.dimension(), cols);
  long gotLabels = 0;
  double gotSum = 0.0, gotAbs = 0.0;
  for (int i = 0; i < data.count(); ++i) {
    gotLabels += data.label(i);
    for (double v : data.feature(i)) {
      gotSum += v;
      gotAbs += std::abs(v);
    }
  }
  EXPECT_EQ(gotLabels, labelSum);
  EXPECT_NEAR(gotSum, featureSum, 1e-9);
  EXPECT_NEAR(gotAbs, featureAbsSum, 1e-9);
}

TEST(Particles, CsvRoundTrip) {
  rkl::ParticleEnsemble e({0.25, 3.5, 9.75}, rkl::SupportInterval(0.0, 10.0));
  const std::string path = tempPath("particles.csv");
  rkl::write_particles_csv(e, path);
  const std::vector<double> back = rkl::read_particles_csv(path);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_DOUBLE_EQ(back[0], 0.25);
  EXPECT_DOUBLE_EQ(back[1], 3.5);
  EXPECT_DOUBLE_EQ(back[2], 9.75);
}

TEST(Histogram, FileHasHeaderAndBinEdges) {
  rkl::DensityGrid grid = rkl::DensityGrid::uniform(rkl::SupportInterval(0.0, 2.0), 8);
  const std::string path = tempPath("hist.csv");
  rkl::write_histogram_csv(grid, path);
  std::ifstream in(path);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "binLeft,binRight,density");
  int rows = 0;
  double firstLeft = -1.0, lastRight = -1.0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string a, b, c;
    ASSERT_TRUE(std::getline(ls, a, ',') && std::getline(ls, b, ',') && std::getline(ls, c, ','));
    if (rows == 0) firstLeft = std::stod(a);
    lastRight = std::stod(b);
    EXPECT_DOUBLE_EQ(std::stod(c), 0.5);
    ++rows;
  }
  EXPECT_EQ(rows, 8);
  EXPECT_DOUBLE_EQ(firstLeft, 0.0);
  EXPECT_DOUBLE_EQ(lastRight, 2.0);
}

TEST(Formats, ParseNames) {
  EXPECT_EQ(rkl::parse_format("csv"), rkl::DataFormat::kCsv);
  EXPECT_EQ(rkl::parse_format("libsvm"), rkl::DataFormat::kLibsvm);
  EXPECT_THROW(rkl::parse_format("tsv"), rkl::ConfigError);
}

}  // namespace
