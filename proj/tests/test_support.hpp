#pragma once

#include "ner/dataset.hpp"
#include "ner/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ner::testing {

// n x L matrix of standard normals from its own stream.
inline Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng = CounterRng::stream(seed, 99);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  return m;
}

inline Eigen::VectorXd gaussian_vector(std::size_t n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

// Squared norm of the projection of y onto the column span of a (SVD based).
inline double projected_norm2(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  if (a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const double tol = 1e-10 * svd.singularValues()(0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) total += std::pow(svd.matrixU().col(i).dot(y), 2);
  return total;
}

}  // namespace ner::testing
