// Isotropic diffeomorphism used to flatten the posterior before the shell
// machinery runs:
//   h(gamma) = f(||gamma||) gamma / ||gamma||,   h(0) = 0,
//   f(x) = e^{bx} - e/3            for x >  1/b
//        = x^3 b^3 e/6 + x b e/2   for x <= 1/b
// f is C^1 and strictly increasing, so h is invertible with
//   det grad h(gamma) = f'(r) (f(r)/r)^{d-1},  r = ||gamma||.
//
// Convention used throughout: theta = h(gamma). Densities transform as
//   pi_gamma(gamma) = pi(h(gamma)) |det grad h(gamma)|.
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "dpmix/common.hpp"
#include "dpmix/model.hpp"

namespace dpmix {

struct DiffeoParams {
  double b = 0.01;  // growth rate, > 0
  void validate() const {
    if (!(b > 0) || !std::isfinite(b))
      throw invalid_input("DiffeoParams: b must be positive and finite");
  }
};

namespace detail {
inline constexpr double kE = 2.718281828459045235;
}

inline double f_scalar(double x, double b) {
  if (!(x >= 0)) throw invalid_input("f_scalar: x must be >= 0");
  if (x > 1.0 / b) return std::exp(b * x) - detail::kE / 3.0;
  return x * x * x * b * b * b * detail::kE / 6.0 + x * b * detail::kE / 2.0;
}

inline double f_prime(double x, double b) {
  if (!(x >= 0)) throw invalid_input("f_prime: x must be >= 0");
  if (x > 1.0 / b) return b * std::exp(b * x);
  return x * x * b * b * b * detail::kE / 2.0 + b * detail::kE / 2.0;
}

// f(x)/x evaluated without cancellation; equals b e/2 at x = 0.
inline double f_over_x(double x, double b) {
  if (!(x >= 0)) throw invalid_input("f_over_x: x must be >= 0");
  if (x > 1.0 / b) return (std::exp(b * x) - detail::kE / 3.0) / x;
  return x * x * b * b * b * detail::kE / 6.0 + b * detail::kE / 2.0;
}

inline double f_inverse(double y, double b) {
  if (!(y >= 0)) throw invalid_input("f_inverse: y must be >= 0");
  if (y == 0.0) return 0.0;
  if (y > 2.0 * detail::kE / 3.0) return std::log(y + detail::kE / 3.0) / b;
  // Strictly increasing cubic on [0, 1/b]; safeguarded Newton.
  const double tol = 1e-12 * std::max(1.0, y);
  double lo = 0.0, hi = 1.0 / b;
  double x = std::min(hi, y / (b * detail::kE / 2.0));
  for (int it = 0; it < 100; ++it) {
    const double g = f_scalar(x, b) - y;
    if (std::abs(g) <= tol) return x;
    if (g > 0)
      hi = x;
    else
      lo = x;
    const double step = g / f_prime(x, b);
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  throw numeric_error("f_inverse: Newton failed to converge");
}

inline Eigen::VectorXd h_forward(const Eigen::VectorXd& gamma, double b) {
  const double r = gamma.norm();
  if (r == 0.0) return Eigen::VectorXd::Zero(gamma.size());
  return gamma * f_over_x(r, b);
}

inline Eigen::VectorXd h_inverse(const Eigen::VectorXd& x, double b) {
  const double R = x.norm();
  if (R == 0.0) return Eigen::VectorXd::Zero(x.size());
  return x * (f_inverse(R, b) / R);
}

inline double log_abs_det_grad_h(const Eigen::VectorXd& gamma, double b) {
  const double r = gamma.norm();
  const int d = static_cast<int>(gamma.size());
  return std::log(f_prime(r, b)) + (d - 1) * std::log(f_over_x(r, b));
}

// Target and weight-ratio densities in gamma coordinates.
inline double log_transformed_weight_ratio(const Eigen::VectorXd& gamma,
                                           const Allocation& alloc,
                                           const std::vector<double>& y,
                                           const HyperParams& hp, double b) {
  const Theta theta{unflatten(hp, h_forward(gamma, b)), alloc};
  return log_weight_ratio(theta, y, hp) + log_abs_det_grad_h(gamma, b);
}

inline double log_transformed_target(const Eigen::VectorXd& gamma,
                                     const Allocation& alloc,
                                     const std::vector<double>& y,
                                     const HyperParams& hp, double b) {
  const Theta theta{unflatten(hp, h_forward(gamma, b)), alloc};
  return log_unnorm_posterior(theta, y, hp) + log_abs_det_grad_h(gamma, b);
}

}  // namespace dpmix
