#include "ner/baselines.hpp"

#include "ner/model.hpp"
#include "ner/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ner {

std::string_view to_string(SortAlgorithm algorithm) {
  switch (algorithm) {
    case SortAlgorithm::omp: return "omp";
    case SortAlgorithm::lars: return "lars";
    case SortAlgorithm::ridge_weight: return "ridge_weight";
  }
  return "unknown";
}

SortedFeatures omp_sort(const Dataset& data, std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("omp_sort: k_max must be positive");
  const Eigen::MatrixXd& x = data.design();
  const Eigen::VectorXd& y = data.responses();
  const Eigen::VectorXd norms = x.colwise().norm().transpose();
  const double guard = kCorrelationGuard * y.norm();
  const std::size_t limit = std::min({k_max, data.feature_count(), data.sample_count()});

  SortedFeatures out{{}, SortAlgorithm::omp};
  IndexSet selected;
  Eigen::VectorXd r = y;
  while (out.order.size() < limit && r.norm() >= 1e-12) {
    const Eigen::VectorXd corr = x.transpose() * r;
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (norms(jj) == 0.0 || selected.contains(j)) continue;
      const double score = std::abs(corr(jj)) / norms(jj);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best_score <= guard) break;
    selected.insert(best);
    out.order.push_back(best);
    r = erm(data, selected).residual;
  }
  return out;
}

SortedFeatures lars_sort(const Dataset& data, std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("lars_sort: k_max must be positive");
  const std::size_t L = data.feature_count();
  const Eigen::VectorXd& y = data.responses();
  const double guard = kCorrelationGuard * y.norm();

  Eigen::MatrixXd x = data.design();
  std::vector<bool> usable(L, true);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double nrm = x.col(j).norm();
    if (nrm == 0.0) usable[static_cast<std::size_t>(j)] = false;
    else x.col(j) /= nrm;
  }

  const std::size_t limit = std::min({k_max, L, data.sample_count()});
  SortedFeatures out{{}, SortAlgorithm::lars};
  std::vector<bool> active(L, false);
  Eigen::VectorXd r = y;

  auto add = [&](std::size_t j) {
    active[j] = true;
    out.order.push_back(j);
  };

  // First entry: largest absolute correlation.
  {
    const Eigen::VectorXd c = x.transpose() * r;
    std::size_t best = L;
    double best_abs = guard;
    for (std::size_t j = 0; j < L; ++j)
      if (usable[j] && std::abs(c(static_cast<Eigen::Index>(j))) > best_abs) {
        best_abs = std::abs(c(static_cast<Eigen::Index>(j)));
        best = j;
      }
    if (best == L) return out;
    add(best);
  }

  while (out.order.size() < limit) {
    const Eigen::VectorXd c = x.transpose() * r;
    const std::size_t m = out.order.size();
    Eigen::MatrixXd xa(x.rows(), static_cast<Eigen::Index>(m));
    double big_c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = static_cast<Eigen::Index>(out.order[i]);
      const double s = c(j) >= 0 ? 1.0 : -1.0;
      xa.col(static_cast<Eigen::Index>(i)) = s * x.col(j);
      big_c = std::max(big_c, std::abs(c(j)));
    }
    if (big_c <= guard) break;

    const Eigen::MatrixXd gram = xa.transpose() * xa;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    const Eigen::VectorXd w0 = ldlt.solve(ones);
    const double denom = ones.dot(w0);
    if (ldlt.info() != Eigen::Success || !(denom > 0) || !w0.allFinite()) break;
    const double equi = 1.0 / std::sqrt(denom);
    const Eigen::VectorXd u = xa * (equi * w0);
    const Eigen::VectorXd a = x.transpose() * u;

    double gamma = std::numeric_limits<double>::infinity();
    std::size_t entering = L;
    for (std::size_t j = 0; j < L; ++j) {
      if (active[j] || !usable[j]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      for (double cand : {(big_c - c(jj)) / (equi - a(jj)), (big_c + c(jj)) / (equi + a(jj))}) {
        if (cand > 1e-14 * big_c && std::isfinite(cand) && cand < gamma) {
          gamma = cand;
          entering = j;
        }
      }
    }
    if (entering == L) break;

    // The entering column must keep the active design full rank.
    Eigen::MatrixXd grown(xa.rows(), xa.cols() + 1);
    grown << xa, x.col(static_cast<Eigen::Index>(entering));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(grown);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < grown.cols()) break;

    r -= gamma * u;
    add(entering);
  }
  return out;
}

AidedSelection aided_select(const SortedFeatures& sorted, std::size_t true_k) {
  AidedSelection out;
  out.shortfall = true_k > sorted.order.size();
  const std::size_t take = std::min(true_k, sorted.order.size());
  for (std::size_t i = 0; i < take; ++i) out.selected.insert(sorted.order[i]);
  return out;
}

double information_criterion(InformationCriterion criterion, double rss, std::size_t n,
                             std::size_t k) {
  const double dn = static_cast<double>(n);
  const double fit = dn * std::log(std::max(rss / dn, 1e-300));
  const double penalty = criterion == InformationCriterion::aic ? 2.0 : std::log(dn);
  return fit + penalty * static_cast<double>(k);
}

IndexSet ic_select(const Dataset& data, const SortedFeatures& sorted,
                   InformationCriterion criterion) {
  if (sorted.order.empty()) throw std::invalid_argument("ic_select: empty sorted order");
  const std::size_t n = data.sample_count();
  // A residual below 1e-12 ||y|| is an exact fit; without this floor the log
  // of rounding-level RSS values would decide between exact fits.
  const double total = data.responses().squaredNorm();
  const double rss_floor = kExactFitRatio * kExactFitRatio * total;
  IndexSet prefix;
  double best = information_criterion(criterion, total, n, 0);
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= sorted.order.size(); ++k) {
    prefix.insert(sorted.order[k - 1]);
    const double rss = std::max(erm(data, prefix).min_emp_risk * static_cast<double>(n), rss_floor);
    const double score = information_criterion(criterion, rss, n, k);
    if (score < best) {
      best = score;
      best_k = k;
    }
  }
  return prefix.prefix(best_k);
}

}  // namespace ner
