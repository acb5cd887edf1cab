// L1 truncation-error bounds for the stick-breaking measure cut at N sticks.
//
// exact:        2 [ 1 - E{ (sum_{i<N} w_i)^M } ]
// approximate:  4 M exp(-(N-1)/alpha)
// traditional:  4 n exp(-(N-1)/alpha)   (per-observation mixing)
//
// The expectation has the closed form
//   E{(sum_{i<N} w_i)^M} = sum_{k=0}^{M} C(M,k) (-1)^k (alpha/(alpha+k))^{N-1}
// since sum_{i<N} w_i = 1 - prod_{j<N}(1-V_j) and E(1-V)^k = alpha/(alpha+k)
// for V ~ Beta(1, alpha). The k = 0 term cancels the leading 1, so the bound
// is evaluated directly as an alternating series over k >= 1.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dpmix/common.hpp"

namespace dpmix {

struct BoundReport {
  int M = 0;
  int N = 0;
  double alpha = 0.0;
  double exact_bound = 0.0;
  double approx_bound = 0.0;
  int n = 0;  // sample size for the traditional comparison; 0 if unused
  double traditional_bound_n = 0.0;
};

namespace detail {
inline void check_bound_args(long M, int N, double alpha) {
  if (M < 1) throw invalid_input("bound: M must be >= 1");
  if (N < 2) throw invalid_input("bound: N must be >= 2");
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw invalid_input("bound: alpha must be positive and finite");
}
}  // namespace detail

inline double approx_bound(int M, int N, double alpha) {
  detail::check_bound_args(M, N, alpha);
  return 4.0 * M * std::exp(-(N - 1) / alpha);
}

inline double traditional_bound(long n, int N, double alpha) {
  detail::check_bound_args(n, N, alpha);
  return 4.0 * n * std::exp(-(N - 1) / alpha);
}

inline double exact_bound(int M, int N, double alpha) {
  detail::check_bound_args(M, N, alpha);
  // Terms in log domain with sign tracking; binomials overflow far before
  // the result does.
  std::vector<double> log_terms(M);
  const double lgM = std::lgamma(M + 1.0);
  for (int k = 1; k <= M; ++k) {
    const double lchoose = lgM - std::lgamma(k + 1.0) - std::lgamma(M - k + 1.0);
    log_terms[k - 1] =
        lchoose + (N - 1) * (std::log(alpha) - std::log(alpha + k));
  }
  // Sum smallest-magnitude first with compensation; sign alternates, + at k=1.
  CompensatedSum acc;
  for (int k = M; k >= 1; --k) {
    const double t = std::exp(log_terms[k - 1]);
    acc.add((k % 2 == 1) ? t : -t);
  }
  double sum = acc.value();
  if (acc.abs_value() > 0.0 && std::abs(sum) < 1e-8 * acc.abs_value()) {
    // Severe cancellation: redo in double-double.
    DoubleDouble dd;
    for (int k = M; k >= 1; --k) {
      const double t = std::exp(log_terms[k - 1]);
      dd.add((k % 2 == 1) ? t : -t);
    }
    sum = dd.value();
    if (std::abs(sum) < 1e-30 * acc.abs_value() && acc.abs_value() > 1.0)
      throw numeric_error("exact_bound: alternating series failed to stabilize");
  }
  double b = 2.0 * sum;
  if (b < 0.0) b = 0.0;  // roundoff guard; the true value is in [0, 2]
  if (b > 2.0) b = 2.0;
  return b;
}

inline BoundReport bound_report(int M, int N, double alpha, int n = 0) {
  BoundReport r;
  r.M = M;
  r.N = N;
  r.alpha = alpha;
  r.exact_bound = exact_bound(M, N, alpha);
  r.approx_bound = approx_bound(M, N, alpha);
  r.n = n;
  r.traditional_bound_n = n > 0 ? traditional_bound(n, N, alpha) : 0.0;
  return r;
}

}  // namespace dpmix
