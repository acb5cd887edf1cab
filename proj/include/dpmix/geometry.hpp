// Ellipsoid frame, concentric-shell bookkeeping, log-volumes and direct
// (rejection-free) uniform sampling from shells. All radius/volume
// arithmetic runs in log domain; r^d overflows linear doubles for the
// dimensions this is used at.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "dpmix/common.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

struct EllipsoidFrame {
  Eigen::VectorXd mu;
  Eigen::MatrixXd scale_factor;  // lower-triangular B with Sigma = B B^T
  double log_det_B = 0.0;
  int d = 0;
};

// Radii sqrt(c_i) on an arithmetic grid: radius(i) = base + step*i is the
// outer radius of shell i (0-based); shell 0 is the full inner ball.
struct ShellSchedule {
  double base_radius = 1.0;
  double step = 1.0;
  int count = 1;

  void validate() const {
    if (!(base_radius > 0) || !(step > 0) || count < 1)
      throw invalid_input("ShellSchedule: need base_radius > 0, step > 0, count >= 1");
  }
  double radius(int i) const { return base_radius + step * i; }
  double lower_radius(int i) const { return i == 0 ? 0.0 : radius(i - 1); }
  void extend() { count *= 2; }
};

inline EllipsoidFrame fit_frame(const Eigen::MatrixXd& samples) {
  const int K = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (K <= d) throw numeric_error("fit_frame: need more samples than dimensions");

  EllipsoidFrame frame;
  frame.d = d;
  frame.mu = samples.colwise().mean();
  Eigen::MatrixXd centered = samples.rowwise() - frame.mu.transpose();
  Eigen::MatrixXd cov =
      (centered.adjoint() * centered) / static_cast<double>(K - 1);

  // Jitter ladder: smallest lambda in {0, 1e-10, 1e-8, ...} that factors.
  for (double lambda = 0.0;; lambda = lambda == 0.0 ? 1e-10 : lambda * 100.0) {
    Eigen::MatrixXd sigma = cov + lambda * Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
      frame.scale_factor = llt.matrixL();
      if (frame.scale_factor.diagonal().minCoeff() > 0.0) {
        frame.log_det_B = frame.scale_factor.diagonal().array().log().sum();
        return frame;
      }
    }
    if (lambda > 1e2)
      throw numeric_error("fit_frame: factorization failed at max jitter");
  }
}

inline EllipsoidFrame fit_frame(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw numeric_error("fit_frame: no samples");
  Eigen::MatrixXd m(samples.size(), samples[0].size());
  for (size_t i = 0; i < samples.size(); ++i) m.row(i) = samples[i];
  return fit_frame(m);
}

inline double mahalanobis(const EllipsoidFrame& frame,
                          const Eigen::VectorXd& x) {
  return frame.scale_factor.triangularView<Eigen::Lower>()
      .solve(x - frame.mu)
      .norm();
}

// Shell containing radius r, boundary ties resolved to the lower index;
// nullopt if r lies beyond the last scheduled radius.
inline std::optional<int> shell_index(const ShellSchedule& sched, double r) {
  if (!std::isfinite(r) || r < 0)
    throw invalid_input("shell_index: radius must be finite and >= 0");
  int i = 0;
  if (r > sched.base_radius)
    i = static_cast<int>(std::ceil((r - sched.base_radius) / sched.step));
  while (i > 0 && r <= sched.radius(i - 1)) --i;
  while (i < sched.count && sched.radius(i) < r) ++i;
  if (i >= sched.count) return std::nullopt;
  return i;
}

// log Lebesgue measure of shell i:
//   log|B| + (d/2) log pi - lgamma(d/2 + 1) + log(c_i^{d/2} - c_{i-1}^{d/2})
inline double shell_log_volume(const EllipsoidFrame& frame,
                               const ShellSchedule& sched, int i) {
  const int d = frame.d;
  const double unit = 0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0);
  double radial;
  if (i == 0) {
    radial = d * std::log(sched.radius(0));
  } else {
    const double lo = sched.radius(i - 1), hi = sched.radius(i);
    radial = d * std::log(lo) + log_expm1(d * (std::log(hi) - std::log(lo)));
  }
  return frame.log_det_B + unit + radial;
}

// Uniform draw from shell i: random direction, radius with density
// proportional to r^{d-1} via inverse CDF, then map through the frame.
// No rejection loop.
inline Eigen::VectorXd sample_uniform_shell(const EllipsoidFrame& frame,
                                            const ShellSchedule& sched, int i,
                                            Rng& rng) {
  const int d = frame.d;
  Eigen::VectorXd g(d);
  for (int k = 0; k < d; ++k) g[k] = rnorm(rng);
  const double gn = g.norm();
  const double u = runif(rng);

  double log_r;
  if (i == 0) {
    log_r = std::log(sched.radius(0)) + std::log(u) / d;
  } else {
    // r^d = lo^d [ (1-u) + u e^t ],  t = d log(hi/lo)
    const double lo = sched.radius(i - 1), hi = sched.radius(i);
    const double t = d * (std::log(hi) - std::log(lo));
    const double mix = log_sum_exp(std::log1p(-u), std::log(u) + t);
    log_r = std::log(lo) + mix / d;
  }
  const double r = std::exp(log_r);
  return frame.mu + frame.scale_factor * (g * (r / gn));
}

}  // namespace dpmix
