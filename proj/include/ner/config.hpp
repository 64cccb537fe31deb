#pragma once

#include "ner/group_ner.hpp"
#include "ner/linreg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ner {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSection {
  std::optional<std::string> file;
  bool transposed = false;
};

struct SnerSection {
  RegressionConfig regression;
  // Unset: cross-validated over c_prime_grid.
  std::optional<double> c_prime;
  std::vector<double> c_prime_grid = default_cprime_grid();
};

struct ExperimentSection {
  std::string preset = "custom";
  std::optional<std::size_t> n;
  std::optional<std::size_t> L;
  std::optional<std::size_t> K;
  std::optional<double> snr_db;
  std::vector<double> snr_grid;
  std::vector<std::size_t> n_grid;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::size_t k_max = 20;
  std::vector<std::string> methods;
  std::optional<double> c_prime;
};

// Sections [data], [sner], [groupner], [experiment] with "key = value" lines
// and '#' comments. Lists are comma separated. Unknown sections and keys,
// duplicates and unparsable values raise ConfigError.
struct RunConfig {
  DataSection data;
  SnerSection sner;
  GroupNerConfig groupner;
  // [groupner] depth was given explicitly.
  bool groupner_depth_set = false;
  ExperimentSection experiment;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Value parsers shared with the command line; what names the setting in errors.
double parse_real(const std::string& text, const std::string& what);
std::uint64_t parse_unsigned(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

}  // namespace ner
