// Command-line front end: select, benchmark, verify, feature-select.
// Exit codes: 0 success, 1 failed verification or internal error,
// 2 usage or configuration error, 3 data error.

#include "ner/config.hpp"
#include "ner/csv_io.hpp"
#include "ner/experiments.hpp"
#include "ner/group_ner.hpp"
#include "ner/json_export.hpp"
#include "ner/linreg.hpp"
#include "ner/log.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

// Usage problems detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

std::size_t default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

ner::RunConfig load(const std::string& path) {
  return path.empty() ? ner::RunConfig{} : ner::load_config(path);
}

struct SelectArgs {
  std::string data, config, json;
  bool transposed = false;
  std::optional<double> c_prime;
  std::optional<std::size_t> k_max, cv_folds;
  std::optional<double> prune_fraction;
  std::optional<std::uint64_t> seed;
  bool no_normalize = false;
};

int run_select(const SelectArgs& a) {
  ner::RunConfig cfg = load(a.config);
  ner::RegressionConfig rc = cfg.sner.regression;
  if (a.k_max) rc.k_max = *a.k_max;
  if (a.cv_folds) rc.cv_folds = *a.cv_folds;
  if (a.prune_fraction) rc.prune_fraction = *a.prune_fraction;
  if (a.seed) rc.seed = *a.seed;
  if (a.no_normalize) rc.normalize = false;
  std::optional<double> c_prime = a.c_prime ? a.c_prime : cfg.sner.c_prime;
  if (c_prime) rc.c_prime = *c_prime;
  try {
    rc.validate();
  } catch (const std::invalid_argument& e) {
    throw ner::ConfigError(e.what());
  }
  const std::string path = !a.data.empty() ? a.data : cfg.data.file.value_or("");
  if (path.empty()) throw UsageError("no dataset: pass --data or set [data] file");

  const ner::Dataset data =
      ner::read_dataset_csv(path, ner::CsvLayout{a.transposed || cfg.data.transposed});
  const ner::RegressionResult result =
      c_prime ? ner::sner_regression(data, rc)
              : ner::sner_regression_cv(data, cfg.sner.c_prime_grid, rc);
  write_output(a.json, ner::to_json(result).dump(2) + "\n");
  return 0;
}

struct BenchmarkArgs {
  std::string preset, config, out, json, methods;
  std::optional<std::size_t> trials, threads, n, L, K, k_max;
  std::optional<double> snr_db, c_prime;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

std::vector<ner::SyntheticSpec> benchmark_grid(const std::string& preset,
                                               const ner::ExperimentSection& e) {
  std::vector<ner::SyntheticSpec> grid;
  if (preset == "fig3") {
    for (double snr : {-2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0}) grid.push_back({60, 205, 5, snr, 0});
  } else if (preset == "fig4") {
    for (std::size_t n : {40, 50, 60, 80, 100}) {
      const auto L = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.3)));
      grid.push_back({n, L, 5, 6.0, 0});
    }
  } else if (preset == "custom") {
    if (!e.K || (!e.n && e.n_grid.empty()) || (!e.L && e.n_grid.empty()))
      throw UsageError("custom preset needs n, L and K (flags or [experiment] section)");
    std::vector<std::size_t> ns = e.n_grid.empty() ? std::vector<std::size_t>{*e.n} : e.n_grid;
    std::vector<double> snrs = e.snr_grid.empty() ? std::vector<double>{e.snr_db.value_or(6.0)} : e.snr_grid;
    for (std::size_t n : ns)
      for (double snr : snrs) {
        const std::size_t L = e.L ? *e.L
                                  : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.3)));
        grid.push_back({n, L, *e.K, snr, 0});
      }
  } else {
    throw UsageError("unknown preset '" + preset + "' (expected fig3, fig4 or custom)");
  }
  return grid;
}

int run_benchmark(const BenchmarkArgs& a) {
  ner::RunConfig cfg = load(a.config);
  ner::ExperimentSection& e = cfg.experiment;
  if (a.n) e.n = *a.n;
  if (a.L) e.L = *a.L;
  if (a.K) e.K = *a.K;
  if (a.snr_db) {
    e.snr_db = *a.snr_db;
    e.snr_grid.clear();
  }
  if (a.k_max) e.k_max = *a.k_max;
  if (a.c_prime) e.c_prime = *a.c_prime;
  if (!a.methods.empty()) {
    e.methods.clear();
    std::stringstream ss(a.methods);
    for (std::string m; std::getline(ss, m, ',');) e.methods.push_back(m);
  }
  const std::string preset = !a.preset.empty() ? a.preset : e.preset;
  const std::size_t trials = a.trials.value_or(e.trials.value_or(0));
  if (trials == 0) throw UsageError("--trials must be a positive integer");
  if (!a.seed) throw UsageError("--seed is required");

  std::vector<ner::Method> methods;
  try {
    for (const auto& m : e.methods) methods.push_back(ner::parse_method(m));
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  if (methods.empty()) methods = ner::all_methods();

  ner::DetectionOptions options;
  options.k_max = e.k_max;
  options.cprime_grid = cfg.sner.c_prime_grid;
  options.cv_folds = cfg.sner.regression.cv_folds;
  options.prune_fraction = cfg.sner.regression.prune_fraction;
  if (e.c_prime) {
    options.cross_validate = false;
    options.c_prime = *e.c_prime;
  }
  options.threads = a.threads.value_or(e.threads.value_or(default_threads()));
  options.timing = a.timing;

  std::vector<ner::DetectionReport> reports;
  for (ner::SyntheticSpec spec : benchmark_grid(preset, e)) {
    spec.seed = *a.seed;
    try {
      spec.validate();
    } catch (const std::invalid_argument& err) {
      throw UsageError(err.what());
    }
    reports.push_back(ner::detection_experiment(spec, methods, trials, options));
    if (ner::log::warnings_enabled())
      std::cerr << "benchmark " << preset << ": n=" << spec.n << " L=" << spec.L << " K=" << spec.K
              << " snr_db=" << spec.snr_db << " done\n";
  }
  std::ostringstream csv;
  ner::write_report_csv(csv, reports);
  write_output(a.out, csv.str());
  if (!a.json.empty()) {
    std::ostringstream js;
    ner::write_report_json(js, reports);
    write_output(a.json, js.str());
  }
  return 0;
}

struct VerifyArgs {
  std::string suite;
  std::optional<std::size_t> trials, threads;
  std::optional<std::uint64_t> seed;
};

int run_verify(const VerifyArgs& a) {
  ner::Suite suite;
  try {
    suite = ner::parse_suite(a.suite);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  if (!a.seed) throw UsageError("--seed is required");
  const std::size_t trials = a.trials.value_or(ner::default_trials(suite));
  if (trials == 0) throw UsageError("--trials must be a positive integer");
  const ner::VerificationRecord record =
      ner::verification_suite(suite, trials, *a.seed, a.threads.value_or(default_threads()));
  ner::print_record(std::cout, record);
  return record.passed() ? 0 : kExitFail;
}

struct FeatureArgs {
  std::string data, config, out, weights, c_grid;
  bool transposed = false;
  std::optional<std::size_t> group_size, depth;
  std::optional<double> tau, validation_fraction;
  std::optional<std::uint64_t> seed;
};

int run_feature_select(const FeatureArgs& a) {
  ner::RunConfig cfg = load(a.config);
  ner::GroupNerConfig gc = cfg.groupner;
  if (a.group_size) gc.group_size = *a.group_size;
  if (a.tau) gc.tau = *a.tau;
  if (a.seed) gc.seed = *a.seed;
  if (a.validation_fraction) gc.validation_fraction = *a.validation_fraction;
  if (!a.c_grid.empty()) {
    gc.c_grid = ner::parse_real_list(a.c_grid, "--c-grid");
    for (double c : gc.c_grid)
      if (!(c > 0)) throw UsageError("--c-grid entries must be positive");
  }
  if (gc.tau && !(*gc.tau > 0)) throw UsageError("--tau must be positive");
  if (!(gc.validation_fraction > 0 && gc.validation_fraction < 1))
    throw UsageError("--validation-fraction must lie in (0, 1)");
  if (gc.group_size == 0) throw UsageError("--group-size must be positive");
  const std::string path = !a.data.empty() ? a.data : cfg.data.file.value_or("");
  if (path.empty()) throw UsageError("no dataset: pass --data or set [data] file");

  const ner::LabeledDataset data =
      ner::read_labeled_csv(path, ner::CsvLayout{a.transposed || cfg.data.transposed});
  const std::size_t L = data.feature_count();
  // Without an explicit depth every complete group of the sorted pool is used.
  if (a.depth)
    gc.depth = *a.depth;
  else if (!cfg.groupner_depth_set)
    gc.depth = std::max<std::size_t>(1, L / gc.group_size);
  if (gc.depth == 0) throw UsageError("--depth must be positive");
  if (gc.group_size * gc.depth > L)
    throw UsageError("group size " + std::to_string(gc.group_size) + " times depth " +
                     std::to_string(gc.depth) + " exceeds the " + std::to_string(L) +
                     " available features");

  const ner::GroupNerResult result = ner::run_group_ner(data, gc);
  write_output(a.out, ner::to_json(result, gc).dump(2) + "\n");
  if (!a.weights.empty()) {
    std::vector<std::string> header{"feature"};
    for (std::size_t j = 1; j <= data.class_count(); ++j) header.push_back("class" + std::to_string(j));
    Eigen::MatrixXd table(result.model.weights.rows(), result.model.weights.cols() + 1);
    const auto idx = result.selected.one_based();
    for (Eigen::Index r = 0; r < table.rows(); ++r) table(r, 0) = static_cast<double>(idx[static_cast<std::size_t>(r)]);
    table.rightCols(result.model.weights.cols()) = result.model.weights;
    std::ostringstream csv;
    ner::write_matrix_csv(csv, table, header);
    write_output(a.weights, csv.str());
  }
  if (!a.out.empty() && a.out != "-")
    std::cout << "selected " << result.selected.size() << " of " << L
              << " features, chosen c = " << result.chosen_c
              << ", validation accuracy = " << result.validation_accuracy << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NER / S-NER nested model selection toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress warnings and progress lines on stderr");

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Sparse regression support selection with S-NER");
  select->add_option("--data", sel.data, "Dataset CSV (feature columns plus a 'response' column)");
  select->add_option("--config", sel.config, "INI config file ([data], [sner] sections)");
  select->add_option("--json", sel.json, "Write the selection JSON here (default: stdout)");
  select->add_flag("--transposed", sel.transposed, "CSV has one row per feature and a final 'response' row");
  select->add_option("--c-prime", sel.c_prime, "Threshold scale c' (default: cross-validated)");
  select->add_option("--k-max", sel.k_max, "Maximum number of expansions");
  select->add_option("--cv-folds", sel.cv_folds, "Folds for cross-validating c'");
  select->add_option("--prune-fraction", sel.prune_fraction, "Relative coefficient pruning threshold in [0, 1)");
  select->add_option("--seed", sel.seed, "Seed for the cross-validation folds");
  select->add_flag("--no-normalize", sel.no_normalize, "Do not scale responses to unit standard deviation");

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo exact-support detection benchmark");
  benchmark->add_option("--preset", bench.preset, "fig3, fig4 or custom");
  benchmark->add_option("--trials", bench.trials, "Trials per grid point");
  benchmark->add_option("--seed", bench.seed, "Master seed (required)");
  benchmark->add_option("--out", bench.out, "CSV report path (default: stdout)");
  benchmark->add_option("--json", bench.json, "Also write the JSON report here");
  benchmark->add_option("--config", bench.config, "INI config file ([experiment], [sner] sections)");
  benchmark->add_option("--threads", bench.threads, "Worker threads (default: all cores)");
  benchmark->add_option("--n", bench.n, "Samples (custom preset)");
  benchmark->add_option("--L", bench.L, "Features (custom preset)");
  benchmark->add_option("--K", bench.K, "Support size (custom preset)");
  benchmark->add_option("--snr-db", bench.snr_db, "SNR in dB (custom preset)");
  benchmark->add_option("--k-max", bench.k_max, "Maximum model order for S-NER and the sorters");
  benchmark->add_option("--c-prime", bench.c_prime, "Fixed S-NER c' instead of per-trial cross-validation");
  benchmark->add_option("--methods", bench.methods,
                        "Comma-separated subset of sner,aided_omp,aided_lars,omp_aic,omp_bic");
  benchmark->add_flag("--timing", bench.timing, "Fill the seconds column with wall-clock time");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Statistical verification suites");
  verify->add_option("--suite", ver.suite, "thm3, thm4, thm5, thm6 or dist")->required();
  verify->add_option("--trials", ver.trials, "Monte Carlo trials (default depends on the suite)");
  verify->add_option("--seed", ver.seed, "Master seed (required)");
  verify->add_option("--threads", ver.threads, "Worker threads (default: all cores)");

  FeatureArgs feat;
  auto* feature = app.add_subcommand("feature-select", "Group NER feature selection for classification");
  feature->add_option("--data", feat.data, "Labeled CSV (feature columns plus an integer 'label' column)");
  feature->add_option("--config", feat.config, "INI config file ([data], [groupner] sections)");
  feature->add_option("--out", feat.out, "Write the result JSON here (default: stdout)");
  feature->add_option("--weights", feat.weights, "Write the final ridge weights as CSV here");
  feature->add_flag("--transposed", feat.transposed, "CSV has one row per feature and a final 'label' row");
  feature->add_option("--group-size", feat.group_size, "Features per group (default 10)");
  feature->add_option("--depth", feat.depth, "Number of groups in the chain (default: all complete groups)");
  feature->add_option("--tau", feat.tau, "Ridge penalty (default: chosen on the validation split)");
  feature->add_option("--c-grid", feat.c_grid, "Comma-separated threshold scales (default 10^-1 .. 10^3)");
  feature->add_option("--validation-fraction", feat.validation_fraction, "Held-out fraction (default 0.2)");
  feature->add_option("--seed", feat.seed, "Seed for the stratified split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  ner::log::set_warnings_enabled(!quiet);

  try {
    if (*select) return run_select(sel);
    if (*benchmark) return run_benchmark(bench);
    if (*verify) return run_verify(ver);
    if (*feature) return run_feature_select(feat);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ner::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ner::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
