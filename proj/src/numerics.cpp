#include "ner/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ner {

namespace {

constexpr extended kInvSqrt2 = 0.707106781186547524400844362104849039L;
constexpr extended kInvSqrt2Pi = 0.398942280401432677939946059934381868L;

// Acklam's rational approximation for the lower half, p in (0, 0.5].
// Relative error below 1.2e-9 before refinement.
extended acklam_lower(extended p) {
  static constexpr extended a[] = {-3.969683028665376e+01L, 2.209460984245205e+02L,
                                   -2.759285104469687e+02L, 1.383577518672690e+02L,
                                   -3.066479806614716e+01L, 2.506628277459239e+00L};
  static constexpr extended b[] = {-5.447609879822406e+01L, 1.615858368580409e+02L,
                                   -1.556989798598866e+02L, 6.680131188771972e+01L,
                                   -1.328068155288572e+01L};
  static constexpr extended c[] = {-7.784894002430293e-03L, -3.223964580411365e-01L,
                                   -2.400758277161838e+00L, -2.549732539343734e+00L,
                                   4.374664141464968e+00L,  2.938163982698783e+00L};
  static constexpr extended d[] = {7.784695709041462e-03L, 3.224671290700398e-01L,
                                   2.445134137142996e+00L, 3.754408661907416e+00L};
  constexpr extended p_low = 0.02425L;

  if (p < p_low) {
    const extended q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const extended q = p - 0.5L;
  const extended r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

void require_finite(extended x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

}  // namespace

extended std_normal_cdf(extended x) {
  require_finite(x, "std_normal_cdf");
  return 0.5L * std::erfc(-x * kInvSqrt2);
}

extended std_normal_inv_cdf(extended p) {
  if (!(p > 0 && p < 1)) throw std::domain_error("std_normal_inv_cdf: p must lie in (0, 1)");
  // The complement 1 - p is exact for p >= 0.5, so the upper half is mapped
  // onto the lower tail where the CDF has full relative precision.
  if (p > 0.5L) return -std_normal_inv_cdf(1 - p);

  extended x = acklam_lower(p);
  const extended err = std_normal_cdf(x) - p;
  const extended density = kInvSqrt2Pi * std::exp(-0.5L * x * x);
  if (density > 0) x -= err / density;
  return x;
}

extended chi2_1_cdf(extended u) {
  if (std::isnan(u) || u < 0) throw std::domain_error("chi2_1_cdf: u must be nonnegative");
  if (std::isinf(u)) return 1;
  // 2 Phi(sqrt(u)) - 1 == erf(sqrt(u / 2)); the erf form avoids cancellation near 0.
  return std::erf(std::sqrt(u / 2));
}

extended chi2_1_inv_cdf(extended p) {
  if (std::isnan(p) || p < 0 || p >= 1)
    throw std::domain_error("chi2_1_inv_cdf: p must lie in [0, 1)");
  if (p == 0) return 0;
  // (p + 1) / 2 has complement (1 - p) / 2, computed without rounding loss.
  const extended z = -std_normal_inv_cdf((1 - p) / 2);
  return z * z;
}

extended noncentral_chi2_1_cdf(extended u, extended zeta) {
  if (std::isnan(u) || u < 0 || std::isnan(zeta) || zeta < 0)
    throw std::domain_error("noncentral_chi2_1_cdf: arguments must be nonnegative");
  if (std::isinf(u)) return 1;
  require_finite(zeta, "noncentral_chi2_1_cdf");
  const extended su = std::sqrt(u);
  const extended sz = std::sqrt(zeta);
  return std_normal_cdf(su - sz) - std_normal_cdf(-su - sz);
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

LeastSquaresFit fit_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                  const Eigen::Ref<const Eigen::VectorXd>& responses) {
  if (design.rows() != responses.size())
    throw std::invalid_argument("least_squares: design has " + std::to_string(design.rows()) +
                                " samples but responses have " +
                                std::to_string(responses.size()));
  if (design.rows() < 1 || design.cols() < 1)
    throw std::invalid_argument("least_squares: empty design");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(design);

  LeastSquaresFit fit;
  fit.coefficients = cod.solve(responses);
  fit.residual = responses - design * fit.coefficients;
  fit.residual_norm2 = fit.residual.squaredNorm();
  fit.rank_deficient = cod.rank() < design.cols();
  return fit;
}

LeastSquaresFit least_squares(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              const Eigen::Ref<const Eigen::VectorXd>& responses) {
  if (features.cols() != responses.size())
    throw std::invalid_argument("least_squares: features have " +
                                std::to_string(features.cols()) + " samples but responses have " +
                                std::to_string(responses.size()));
  const Eigen::MatrixXd design = features.transpose();
  return fit_least_squares(design, responses);
}

Eigen::MatrixXd ridge_solve_design(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                   const Eigen::Ref<const Eigen::MatrixXd>& targets,
                                   double tau) {
  if (!(tau >= 0)) throw std::invalid_argument("ridge_solve: tau must be nonnegative");
  if (design.rows() != targets.rows())
    throw std::invalid_argument("ridge_solve: design has " + std::to_string(design.rows()) +
                                " samples but targets have " + std::to_string(targets.rows()));
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();

  if (tau == 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < k) throw std::invalid_argument("ridge_solve: singular Gram matrix with tau = 0");
    return qr.solve(targets);
  }

  if (k <= n) {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += tau;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    return llt.solve(design.transpose() * targets);
  }
  // Dual form: X (X^T X + tau I_n)^-1 Y, same weights when k > n.
  Eigen::MatrixXd kernel = design * design.transpose();
  kernel.diagonal().array() += tau;
  Eigen::LLT<Eigen::MatrixXd> llt(kernel);
  return design.transpose() * llt.solve(targets);
}

Eigen::MatrixXd ridge_solve(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            const Eigen::Ref<const Eigen::MatrixXd>& targets, double tau) {
  const Eigen::MatrixXd design = features.transpose();
  return ridge_solve_design(design, targets, tau);
}

}  // namespace ner
