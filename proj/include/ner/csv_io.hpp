#pragma once

#include "ner/dataset.hpp"
#include "ner/group_ner.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace ner {

// Malformed or inconsistent input data (as opposed to bad configuration).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvLayout {
  // false: one row per sample, one column per feature plus the target column.
  // true: one row per feature plus a final target row; samples run along columns.
  bool transposed = false;
};

// Reads a regression dataset. The header is optional; with a header the
// target is the column (row, when transposed) named "response", without one
// it is the last column (row).
Dataset read_dataset_csv(std::istream& in, const CsvLayout& layout = {});
Dataset read_dataset_csv(const std::string& path, const CsvLayout& layout = {});

// Same, with an integer "label" target.
LabeledDataset read_labeled_csv(std::istream& in, const CsvLayout& layout = {});
LabeledDataset read_labeled_csv(const std::string& path, const CsvLayout& layout = {});

// Header f1..fL,response; values with 17 significant digits so the file
// reads back bit-exactly.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_labeled_csv(std::ostream& out, const LabeledDataset& data);

// Plain matrix, one row per line, 17 significant digits. Optional header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& header = {});

// Shortest round-trip text for a double ("%.17g").
std::string format_double(double value);

}  // namespace ner
