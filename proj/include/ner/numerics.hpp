#pragma once

#include <Eigen/Dense>

namespace ner {

// Scalar special functions work in extended precision. Upper-tail
// probabilities such as F1(40) = 1 - 2.5e-10 are only resolved to ~1e-16 in
// double, which is too coarse to invert back to 1e-8 in the argument.
using extended = long double;

// Standard normal CDF. Throws std::domain_error on non-finite input.
extended std_normal_cdf(extended x);

// Standard normal quantile, p in (0, 1). Rational initializer refined with one
// Newton step.
extended std_normal_inv_cdf(extended p);

// CDF of a central chi-square with one degree of freedom: 2*Phi(sqrt(u)) - 1.
extended chi2_1_cdf(extended u);

// Quantile of the central chi-square(1): (Phi^-1((p + 1) / 2))^2, p in [0, 1).
extended chi2_1_inv_cdf(extended p);

// CDF of a non-central chi-square(1) with non-centrality zeta:
// Phi(sqrt(u) - sqrt(zeta)) - Phi(-sqrt(u) - sqrt(zeta)).
extended noncentral_chi2_1_cdf(extended u, extended zeta);

inline constexpr double kProbabilityFloor = 1e-15;

// Clamps p into [1e-15, 1 - 1e-15] so that quantile functions stay finite.
double clamp_probability(double p);

inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residual;
  double residual_norm2 = 0.0;
  bool rank_deficient = false;
};

// Minimizes ||y - A theta||^2 for a design A with samples as rows and active
// features as columns (n x k). Column-pivoted complete orthogonal
// decomposition; when the numerical rank is below k the minimum-norm solution
// is returned and rank_deficient is set.
LeastSquaresFit fit_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                  const Eigen::Ref<const Eigen::VectorXd>& responses);

// Same fit, with the features laid out as rows (k x n).
LeastSquaresFit least_squares(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              const Eigen::Ref<const Eigen::VectorXd>& responses);

// Ridge weights W = (X X^T + tau I)^-1 X Y for features X (k x n) and
// targets Y (n x J). Solved through a Cholesky factorization of the primal or
// dual Gram matrix, whichever is smaller. tau = 0 falls back to least squares
// and throws if the Gram matrix is singular.
Eigen::MatrixXd ridge_solve(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            const Eigen::Ref<const Eigen::MatrixXd>& targets, double tau);

// Same solve with the design given as samples x features (n x k).
Eigen::MatrixXd ridge_solve_design(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                   const Eigen::Ref<const Eigen::MatrixXd>& targets,
                                   double tau);

}  // namespace ner
