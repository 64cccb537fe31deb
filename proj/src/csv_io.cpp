#include "ner/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace ner {

namespace {

using Table = std::vector<std::vector<std::string>>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.emplace_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    table.push_back(std::move(row));
  }
  if (table.empty()) throw DataError("CSV input is empty");
  return table;
}

Table transpose(const Table& table) {
  const std::size_t cols = table.front().size();
  for (std::size_t r = 0; r < table.size(); ++r)
    if (table[r].size() != cols)
      throw DataError("CSV row " + std::to_string(r + 1) + " has " +
                      std::to_string(table[r].size()) + " fields, expected " +
                      std::to_string(cols));
  Table out(cols, std::vector<std::string>(table.size()));
  for (std::size_t r = 0; r < table.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c][r] = table[r][c];
  return out;
}

bool parse_double(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_header(const std::vector<std::string>& row) {
  double ignored = 0;
  for (const auto& cell : row)
    if (!parse_double(cell, ignored)) return true;
  return false;
}

// Rows are samples after this point; returns the feature block and the target column.
struct Parsed {
  Eigen::MatrixXd design;
  std::vector<double> target;
};

Parsed parse(std::istream& in, const CsvLayout& layout, const std::string& target_name) {
  Table table = read_table(in);
  if (layout.transposed) table = transpose(table);

  const bool header = is_header(table.front());
  std::size_t target = table.front().size() - 1;
  if (header) {
    std::size_t found = table.front().size();
    for (std::size_t c = 0; c < table.front().size(); ++c)
      if (table.front()[c] == target_name) found = c;
    if (found == table.front().size())
      throw DataError("missing '" + target_name + "' column in CSV header");
    target = found;
  }
  const std::size_t first = header ? 1 : 0;
  const std::size_t width = table.front().size();
  if (width < 2) throw DataError("CSV needs at least one feature and the '" + target_name + "' column");
  if (table.size() <= first) throw DataError("CSV has no data rows");

  Parsed parsed;
  parsed.design.resize(static_cast<Eigen::Index>(table.size() - first),
                       static_cast<Eigen::Index>(width - 1));
  for (std::size_t r = first; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != width)
      throw DataError("CSV " + std::string(layout.transposed ? "column " : "row ") +
                      std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(width));
    std::size_t col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0;
      if (!parse_double(row[c], v) || !std::isfinite(v))
        throw DataError("CSV entry '" + row[c] + "' at record " + std::to_string(r + 1) +
                        ", field " + std::to_string(c + 1) + " is not a finite number");
      if (c == target)
        parsed.target.push_back(v);
      else
        parsed.design(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(col++)) = v;
    }
  }
  return parsed;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Dataset read_dataset_csv(std::istream& in, const CsvLayout& layout) {
  Parsed p = parse(in, layout, "response");
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(p.target.data(),
                                                  static_cast<Eigen::Index>(p.target.size()));
  try {
    return Dataset::from_design(std::move(p.design), std::move(y));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

Dataset read_dataset_csv(const std::string& path, const CsvLayout& layout) {
  auto in = open(path);
  return read_dataset_csv(in, layout);
}

LabeledDataset read_labeled_csv(std::istream& in, const CsvLayout& layout) {
  Parsed p = parse(in, layout, "label");
  std::vector<int> labels;
  for (double v : p.target) {
    if (v != std::floor(v) || v < 1 || v > 1e9)
      throw DataError("label " + format_double(v) + " is not a positive integer");
    labels.push_back(static_cast<int>(v));
  }
  try {
    return LabeledDataset::from_design(std::move(p.design), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

LabeledDataset read_labeled_csv(const std::string& path, const CsvLayout& layout) {
  auto in = open(path);
  return read_labeled_csv(in, layout);
}

namespace {

void write_rows(std::ostream& out, const Eigen::MatrixXd& design, const std::string& target_name,
                const auto& target_at) {
  for (Eigen::Index j = 0; j < design.cols(); ++j) out << 'f' << (j + 1) << ',';
  out << target_name << '\n';
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    for (Eigen::Index j = 0; j < design.cols(); ++j) out << format_double(design(i, j)) << ',';
    out << target_at(i) << '\n';
  }
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  write_rows(out, data.design(), "response",
             [&](Eigen::Index i) { return format_double(data.responses()(i)); });
}

void write_labeled_csv(std::ostream& out, const LabeledDataset& data) {
  write_rows(out, data.design(), "label", [&](Eigen::Index i) {
    return std::to_string(data.labels()[static_cast<std::size_t>(i)]);
  });
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& header) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  if (!header.empty()) out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      out << (j ? "," : "") << format_double(matrix(i, j));
    out << '\n';
  }
}

}  // namespace ner
