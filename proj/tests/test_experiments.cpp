#include "ner/experiments.hpp"
#include "ner/random.hpp"
#include "ner/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace ner;

TEST_CASE("sigma_from_snr") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::Vector2d theta(1, 1);
  CHECK(sigma_from_snr(x, theta, 0.0) == doctest::Approx(1.0));
  CHECK(sigma_from_snr(x, theta, 10.0) == doctest::Approx(0.1));
  CHECK(sigma_from_snr(x, theta, -10.0) == doctest::Approx(10.0));
}

TEST_CASE("generate_synthetic") {
  const SyntheticSpec spec{60, 205, 5, 6.0, 17};
  const SyntheticData a = generate_synthetic(spec);
  const SyntheticData b = generate_synthetic(spec);
  CHECK(a.data.design() == b.data.design());
  CHECK(a.data.responses() == b.data.responses());
  CHECK(a.support == b.support);
  CHECK(a.support.size() == 5);
  CHECK(a.support.sorted() == a.support.indices());

  const Eigen::VectorXd signal = a.data.design() * a.theta_star;
  CHECK(10 * std::log10(signal.squaredNorm() / (60 * a.sigma2)) == doctest::Approx(6.0).epsilon(1e-12));
  for (Eigen::Index j = 0; j < a.theta_star.size(); ++j) {
    if (a.support.contains(static_cast<std::size_t>(j)))
      CHECK(std::abs(a.theta_star(j)) == 1.0);
    else
      CHECK(a.theta_star(j) == 0.0);
  }
  CHECK(generate_synthetic({60, 205, 5, 6.0, 18}).data.responses() != a.data.responses());

  const SyntheticData full = generate_synthetic({20, 6, 6, 0.0, 1});
  CHECK(full.support == IndexSet{0, 1, 2, 3, 4, 5});

  CHECK_THROWS(SyntheticSpec({10, 5, 6, 0.0, 1}).validate());
  CHECK_THROWS(SyntheticSpec({10, 5, 0, 0.0, 1}).validate());
}

TEST_CASE("method names") {
  for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("lasso"), std::invalid_argument);
}

TEST_CASE("trial seeds") {
  CHECK(trial_seed(7, 0) == CounterRng::stream(7, 0).key());
  CHECK(trial_seed(7, 1) != trial_seed(7, 0));
  CHECK(trial_seed(8, 0) != trial_seed(7, 0));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> visits(1000, 0);
  parallel_for(visits.size(), 4, [&](std::size_t i) { visits[i] += 1; });
  for (int v : visits) CHECK(v == 1);
}

TEST_CASE("detection_experiment") {
  const SyntheticSpec spec{40, 60, 3, 10.0, 5};
  DetectionOptions options;
  options.cross_validate = false;
  options.c_prime = 1.0;

  SUBCASE("reports are identical across thread counts") {
    const auto one = detection_experiment(spec, all_methods(), 12, options);
    options.threads = 4;
    const auto four = detection_experiment(spec, all_methods(), 12, options);
    std::ostringstream a, b;
    write_report_csv(a, {one});
    write_report_csv(b, {four});
    CHECK(a.str() == b.str());
    std::ostringstream ja, jb;
    write_report_json(ja, {one});
    write_report_json(jb, {four});
    CHECK(ja.str() == jb.str());
  }
  SUBCASE("single trial") {
    const auto r = detection_experiment(spec, {Method::aided_omp}, 1, options);
    REQUIRE(r.outcomes.size() == 1);
    CHECK(r.outcomes[0].trials == 1);
    CHECK(r.outcomes[0].hits <= 1);
    CHECK(r.outcomes[0].ci_low <= r.outcomes[0].frequency);
    CHECK(r.outcomes[0].frequency <= r.outcomes[0].ci_high);
    CHECK(r.outcomes[0].seconds == 0.0);
  }
  SUBCASE("csv layout") {
    const auto r = detection_experiment(spec, {Method::sner, Method::omp_bic}, 3, options);
    std::ostringstream out;
    write_report_csv(out, {r});
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "method,n,L,K,snr_db,trials,hits,frequency,ci_low,ci_high,seconds");
    std::getline(lines, row);
    CHECK(row.rfind("sner,40,60,3,10,3,", 0) == 0);
  }
  SUBCASE("easy setting is detected") {
    const auto r = detection_experiment({40, 20, 2, 20.0, 9}, {Method::sner, Method::aided_omp}, 20, options);
    for (const auto& o : r.outcomes) CHECK(o.frequency >= 0.9);
  }
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto [lo0, hi0] = wilson_interval(0, 20);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  const auto [lo1, hi1] = wilson_interval(20, 20);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);

  // Coverage of the nominal 95% interval over simulated binomial counts.
  CounterRng rng = CounterRng::stream(2024, 1);
  constexpr double p = 0.3;
  std::size_t covered = 0;
  constexpr std::size_t reps = 4000;
  for (std::size_t r = 0; r < reps; ++r) {
    std::size_t hits = 0;
    for (int t = 0; t < 100; ++t) hits += rng.uniform() < p ? 1 : 0;
    const auto [l, h] = wilson_interval(hits, 100);
    if (l <= p && p <= h) ++covered;
  }
  CHECK(double(covered) / reps == doctest::Approx(0.95).epsilon(0.02));
}

TEST_CASE("KS helpers") {
  CHECK(ks_critical_value(100, 0.05) == doctest::Approx(std::sqrt(-std::log(0.025) / 2) / 10));
  CHECK(ks_statistic({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  CHECK(ks_statistic({0.25, 0.75}, [](double x) { return x; }) == doctest::Approx(0.25));
}

TEST_CASE("verification suites at small trial counts") {
  for (Suite s : {Suite::thm3, Suite::thm4, Suite::thm5, Suite::dist}) {
    CHECK(parse_suite(to_string(s)) == s);
    const VerificationRecord r = verification_suite(s, s == Suite::dist ? 20000 : 300, 1);
    CHECK(!r.checks.empty());
    std::ostringstream out;
    print_record(out, r);
    CHECK(out.str().find(to_string(s)) != std::string::npos);
  }
  CHECK_THROWS(parse_suite("thm9"));
}
