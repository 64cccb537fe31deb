#include "ner/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string_view>

namespace ner {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return items;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
  return static_cast<std::size_t>(parse_unsigned(text, what));
}

std::size_t parse_positive(const std::string& text, const std::string& what) {
  const std::size_t v = parse_size(text, what);
  if (v == 0) throw ConfigError(what + " must be positive");
  return v;
}

double parse_positive_real(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  if (!(v > 0)) throw ConfigError(what + " must be positive, got '" + text + "'");
  return v;
}

double parse_fraction(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  if (!(v >= 0 && v < 1)) throw ConfigError(what + " must lie in [0, 1), got '" + text + "'");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string& value, const std::string& what)>;
using SectionTable = std::map<std::string, Setter>;

const std::map<std::string, SectionTable>& schema() {
  static const std::map<std::string, SectionTable> table = {
      {"data",
       {{"file", [](RunConfig& c, const std::string& v, const std::string&) { c.data.file = v; }},
        {"transposed", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.data.transposed = parse_bool(v, w);
         }}}},
      {"sner",
       {{"c_prime", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.c_prime = parse_positive_real(v, w);
         }},
        {"c_prime_grid", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.c_prime_grid = parse_real_list(v, w);
           for (double g : c.sner.c_prime_grid)
             if (!(g > 0)) throw ConfigError(w + " entries must be positive");
         }},
        {"k_max", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.regression.k_max = parse_positive(v, w);
         }},
        {"prune_fraction", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.regression.prune_fraction = parse_fraction(v, w);
         }},
        {"cv_folds", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.regression.cv_folds = parse_size(v, w);
           if (c.sner.regression.cv_folds < 2) throw ConfigError(w + " must be at least 2");
         }},
        {"normalize", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.regression.normalize = parse_bool(v, w);
         }},
        {"seed", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.sner.regression.seed = parse_unsigned(v, w);
         }}}},
      {"groupner",
       {{"group_size", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.group_size = parse_positive(v, w);
         }},
        {"depth", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.depth = parse_positive(v, w);
           c.groupner_depth_set = true;
         }},
        {"tau", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.tau = parse_positive_real(v, w);
         }},
        {"c_grid", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.c_grid = parse_real_list(v, w);
           for (double g : c.groupner.c_grid)
             if (!(g > 0)) throw ConfigError(w + " entries must be positive");
         }},
        {"validation_fraction", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.validation_fraction = parse_fraction(v, w);
           if (c.groupner.validation_fraction == 0) throw ConfigError(w + " must be positive");
         }},
        {"prune_fraction", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.prune_fraction = parse_fraction(v, w);
         }},
        {"seed", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.groupner.seed = parse_unsigned(v, w);
         }}}},
      {"experiment",
       {{"preset", [](RunConfig& c, const std::string& v, const std::string&) { c.experiment.preset = v; }},
        {"n", [](RunConfig& c, const std::string& v, const std::string& w) { c.experiment.n = parse_positive(v, w); }},
        {"L", [](RunConfig& c, const std::string& v, const std::string& w) { c.experiment.L = parse_positive(v, w); }},
        {"K", [](RunConfig& c, const std::string& v, const std::string& w) { c.experiment.K = parse_positive(v, w); }},
        {"snr_db", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.snr_db = parse_real(v, w);
         }},
        {"snr_grid", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.snr_grid = parse_real_list(v, w);
         }},
        {"n_grid", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.n_grid.clear();
           for (const auto& item : split_list(v)) c.experiment.n_grid.push_back(parse_positive(item, w));
         }},
        {"trials", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.trials = parse_positive(v, w);
         }},
        {"seed", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.seed = parse_unsigned(v, w);
         }},
        {"threads", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.threads = parse_positive(v, w);
         }},
        {"k_max", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.k_max = parse_positive(v, w);
         }},
        {"methods", [](RunConfig& c, const std::string& v, const std::string&) {
           c.experiment.methods = split_list(v);
         }},
        {"c_prime", [](RunConfig& c, const std::string& v, const std::string& w) {
           c.experiment.c_prime = parse_positive_real(v, w);
         }}}},
  };
  return table;
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  std::string_view s(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(what + ": '" + text + "' is not a finite number");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(what + ": '" + text + "' is not a nonnegative integer");
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(what + ": '" + text + "' is not a boolean (true/false)");
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string what = section + "." + key;
    const auto& table = schema().at(section);
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + what + "'");
    if (!seen.insert(what).second) throw ConfigError(where + ": duplicate key '" + what + "'");
    it->second(config, value, what);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace ner
