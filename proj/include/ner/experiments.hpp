#pragma once

#include "ner/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ner {

struct SyntheticSpec {
  std::size_t n = 60;
  std::size_t L = 205;
  std::size_t K = 5;
  double snr_db = 6.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// sigma^2 = ||X theta||^2 / (n 10^(snr_db / 10)) for a design X (n x L).
double sigma_from_snr(const Eigen::MatrixXd& design, const Eigen::VectorXd& theta_star,
                      double snr_db);

struct SyntheticData {
  Dataset data;
  IndexSet support;  // ascending
  Eigen::VectorXd theta_star;
  double sigma2 = 0.0;
};

// One stream, CounterRng::stream(seed, 0), consumed in this order: the L x n
// feature entries (feature-major), the support, the K signs, the n noise draws.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

enum class Method { sner, aided_omp, aided_lars, omp_aic, omp_bic };
std::string to_string(Method method);
// Throws std::invalid_argument for an unknown name.
Method parse_method(const std::string& name);
std::vector<Method> all_methods();

struct DetectionOptions {
  std::size_t k_max = 20;
  // S-NER threshold scale; cross-validated per trial over cprime_grid when unset.
  std::vector<double> cprime_grid;
  double c_prime = 0.0;
  bool cross_validate = true;
  std::size_t cv_folds = 5;
  double prune_fraction = 0.1;
  std::size_t threads = 1;
  // Record wall-clock seconds per method. Off by default so reports are
  // byte-reproducible.
  bool timing = false;
};

struct MethodOutcome {
  Method method = Method::sner;
  std::size_t trials = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;
  double frequency = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double seconds = 0.0;
};

struct DetectionReport {
  SyntheticSpec spec;  // spec.seed is the master seed
  std::size_t trials = 0;
  std::vector<MethodOutcome> outcomes;
};

// Seed of trial t: the key of CounterRng::stream(master, t).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

// Runs fn(i) for i in [0, count) on up to threads workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Exact-support detection frequency of each method over independent trials.
// Every method sees the same dataset within a trial; failures count as misses.
DetectionReport detection_experiment(const SyntheticSpec& spec, const std::vector<Method>& methods,
                                     std::size_t trials, const DetectionOptions& options);

void write_report_csv(std::ostream& out, const std::vector<DetectionReport>& reports);
void write_report_json(std::ostream& out, const std::vector<DetectionReport>& reports);

struct Check {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  // Pass band: for "ge" checks observed >= expected - tolerance, for "near"
  // checks |observed - expected| <= tolerance, for "le" observed <= expected + tolerance.
  double tolerance = 0.0;
  std::string relation = "near";
  bool pass = false;
};

struct VerificationRecord {
  std::string suite;
  std::size_t trials = 0;
  std::vector<Check> checks;

  bool passed() const;
};

enum class Suite { thm3, thm4, thm5, thm6, dist };
std::string to_string(Suite suite);
Suite parse_suite(const std::string& name);
std::size_t default_trials(Suite suite);

VerificationRecord verification_suite(Suite suite, std::size_t trials, std::uint64_t seed,
                                 std::size_t threads = 1);

void print_record(std::ostream& out, const VerificationRecord& record);

}  // namespace ner
