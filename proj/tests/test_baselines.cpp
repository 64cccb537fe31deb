#include "ner/baselines.hpp"
#include "ner/experiments.hpp"
#include "ner/model.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ner;

namespace {

// Straightforward LARS entry-order reference: follows the equiangular path
// in small fixed increments and records when a new correlation reaches the
// active maximum. Step size is refined by bisection at each event.
std::vector<std::size_t> lars_reference(const Eigen::MatrixXd& design_in, const Eigen::VectorXd& y,
                                        std::size_t k_max) {
  Eigen::MatrixXd x = design_in;
  for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) /= x.col(j).norm();
  std::vector<std::size_t> active;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(y.size());
  const Eigen::VectorXd c0 = x.transpose() * y;
  Eigen::Index first = 0;
  c0.cwiseAbs().maxCoeff(&first);
  active.push_back(static_cast<std::size_t>(first));
  while (active.size() < k_max) {
    const Eigen::VectorXd c = x.transpose() * (y - mu);
    Eigen::MatrixXd xa(x.rows(), static_cast<Eigen::Index>(active.size()));
    Eigen::VectorXd s(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
      xa.col(static_cast<Eigen::Index>(a)) = x.col(static_cast<Eigen::Index>(active[a]));
      s(static_cast<Eigen::Index>(a)) = c(static_cast<Eigen::Index>(active[a])) > 0 ? 1.0 : -1.0;
    }
    const Eigen::MatrixXd xs = xa * s.asDiagonal();
    const Eigen::VectorXd w = (xs.transpose() * xs).ldlt().solve(Eigen::VectorXd::Ones(s.size()));
    const Eigen::VectorXd u = xs * w / std::sqrt(w.sum());
    // Active correlations fall as cmax - t A and vanish at t = cmax / A.
    const double cmax = std::abs(c(static_cast<Eigen::Index>(active[0])));
    const double A = 1.0 / std::sqrt(w.sum());
    // The first inactive j whose |c_j(t)| reaches cmax(t) along mu + t u.
    auto overtaken = [&](double t, std::size_t& who) {
      const Eigen::VectorXd ct = x.transpose() * (y - mu - t * u);
      const double level = std::abs(ct(static_cast<Eigen::Index>(active[0])));
      double gap = -1;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (std::find(active.begin(), active.end(), static_cast<std::size_t>(j)) != active.end()) continue;
        if (std::abs(ct(j)) - level > gap) {
          gap = std::abs(ct(j)) - level;
          who = static_cast<std::size_t>(j);
        }
      }
      return gap >= 0;
    };
    double lo = 0, hi = cmax / A;
    std::size_t who = 0;
    if (!overtaken(hi, who)) break;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      std::size_t w2 = 0;
      if (overtaken(mid, w2)) hi = mid; else lo = mid;
    }
    overtaken(hi, who);
    mu += hi * u;
    active.push_back(who);
  }
  return active;
}

}  // namespace

TEST_CASE("omp_sort examples") {
  const Dataset d(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(2, 1));
  CHECK(omp_sort(d, 2).order == std::vector<std::size_t>{0, 1});
  CHECK(omp_sort(d, 1).order == std::vector<std::size_t>{0});

  Eigen::MatrixXd f(2, 3);
  f << 1, 0, 0,
       0, 1, 0;
  const Dataset orth(f, Eigen::Vector3d(0, 0, 5));
  CHECK(omp_sort(orth, 2).order.empty());
}

TEST_CASE("omp residual is orthogonal to the selected features") {
  const SyntheticData s = generate_synthetic({40, 60, 4, 5.0, 3});
  const SortedFeatures sorted = omp_sort(s.data, 10);
  CHECK(sorted.order.size() == 10);
  for (std::size_t k = 1; k <= sorted.order.size(); ++k) {
    const IndexSet prefix(std::span<const std::size_t>(sorted.order.data(), k));
    const ErmFit fit = erm(s.data, prefix);
    for (std::size_t j : prefix)
      CHECK(std::abs(s.data.feature(j).dot(fit.residual)) < 1e-9 * s.data.feature(j).norm() *
                                                               std::max(1.0, fit.residual.norm()));
  }
}

TEST_CASE("omp stops at residual exhaustion") {
  const Dataset d(testing::gaussian(8, 30, 2).transpose(), testing::gaussian_vector(8, 3));
  CHECK(omp_sort(d, 20).order.size() <= 8);
}

TEST_CASE("lars_sort") {
  SUBCASE("orthonormal design orders by |<f, y>|") {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(testing::gaussian(20, 6, 4));
    const Eigen::MatrixXd rows =
        (Eigen::MatrixXd(qr.householderQ()) * Eigen::MatrixXd::Identity(20, 6)).transpose();
    Eigen::VectorXd theta(6);
    theta << 0.5, -3, 1, 0, 2, -0.1;
    const Dataset d(rows, rows.transpose() * theta);
    const std::vector<std::size_t> expected{1, 4, 2, 0, 5};
    CHECK(lars_sort(d, 5).order == expected);
    CHECK(omp_sort(d, 5).order == expected);
  }
  SUBCASE("single feature") {
    const Dataset d(testing::gaussian(10, 1, 5).transpose(), testing::gaussian_vector(10, 6));
    CHECK(lars_sort(d, 3).order == std::vector<std::size_t>{0});
  }
  SUBCASE("correlated design matches the reference trace") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Eigen::MatrixXd x = testing::gaussian(30, 3, 40 + seed);
      x.col(2) = 0.7 * x.col(0) + 0.3 * x.col(2);
      const Eigen::VectorXd y = x * Eigen::Vector3d(1.0, -0.6, 0.8) + 0.3 * testing::gaussian_vector(30, 60 + seed);
      const Dataset d = Dataset::from_design(x, y);
      CHECK(lars_sort(d, 3).order == lars_reference(x, y, 3));
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Eigen::MatrixXd x = testing::gaussian(25, 8, 80 + seed);
      const Eigen::VectorXd y = testing::gaussian_vector(25, 90 + seed);
      CHECK(lars_sort(Dataset::from_design(x, y), 5).order == lars_reference(x, y, 5));
    }
  }
}

TEST_CASE("sorters are permutation equivariant") {
  const SyntheticData s = generate_synthetic({40, 25, 3, 8.0, 12});
  std::vector<std::size_t> perm(25);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 7, perm.end());
  Eigen::MatrixXd permuted(40, 25);
  for (std::size_t j = 0; j < 25; ++j) permuted.col(static_cast<Eigen::Index>(j)) = s.data.feature(perm[j]);
  const Dataset p = Dataset::from_design(permuted, s.data.responses());
  // Feature perm[j] of the original is feature j of p.
  for (auto sorter : {&omp_sort, &lars_sort}) {
    const auto a = sorter(s.data, 10).order;
    const auto b = sorter(p, 10).order;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(perm[b[k]] == a[k]);
  }
}

TEST_CASE("aided_select") {
  const SortedFeatures s{{3, 1, 2}, SortAlgorithm::omp};
  CHECK(aided_select(s, 2).selected == IndexSet{3, 1});
  CHECK_FALSE(aided_select(s, 2).shortfall);
  CHECK(aided_select(s, 3).selected == IndexSet{3, 1, 2});
  const auto short_run = aided_select(s, 5);
  CHECK(short_run.shortfall);
  CHECK(short_run.selected == IndexSet{3, 1, 2});
  CHECK(aided_select(s, 2).selected.same_members(IndexSet{1, 3}));
}

TEST_CASE("ic_select") {
  SUBCASE("criterion values") {
    CHECK(information_criterion(InformationCriterion::aic, 50.0, 100, 3) ==
          doctest::Approx(100 * std::log(0.5) + 6));
    CHECK(information_criterion(InformationCriterion::bic, 50.0, 100, 3) ==
          doctest::Approx(100 * std::log(0.5) + 3 * std::log(100.0)));
    CHECK(std::isfinite(information_criterion(InformationCriterion::bic, 0.0, 10, 1)));
  }
  SUBCASE("noiseless signal of size 3") {
    const Eigen::MatrixXd x = testing::gaussian(50, 10, 3);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(10);
    theta.head(3) << 2, -1, 1.5;
    const Dataset d = Dataset::from_design(x, x * theta);
    const SortedFeatures sorted{{0, 1, 2, 3, 4, 5}, SortAlgorithm::omp};
    CHECK(ic_select(d, sorted, InformationCriterion::bic).size() == 3);
    CHECK(ic_select(d, sorted, InformationCriterion::aic).size() == 3);
  }
  SUBCASE("single prefix") {
    const Dataset d(testing::gaussian(30, 2, 4).transpose(), testing::gaussian_vector(30, 5));
    const SortedFeatures sorted{{1}, SortAlgorithm::omp};
    const IndexSet chosen = ic_select(d, sorted, InformationCriterion::bic);
    const double rss1 = erm(d, {1}).min_emp_risk * 30, rss0 = d.responses().squaredNorm();
    const bool one_better = information_criterion(InformationCriterion::bic, rss1, 30, 1) <
                            information_criterion(InformationCriterion::bic, rss0, 30, 0);
    CHECK(chosen.size() == (one_better ? 1u : 0u));
  }
  SUBCASE("BIC on pure noise picks small models") {
    std::size_t small = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      const Dataset d(testing::gaussian(200, 10, 700 + t).transpose(), testing::gaussian_vector(200, 900 + t));
      if (ic_select(d, omp_sort(d, 10), InformationCriterion::bic).size() <= 1) ++small;
    }
    CHECK(small >= 180);
  }
}
