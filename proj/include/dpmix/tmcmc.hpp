// Additive transformation-based MCMC over the continuous block, with the
// allocations refreshed from G_N inside the proposal. One |N(0,1)| innovation
// is shared by all coordinates, each with an independent random sign, so the
// joint acceptance ratio reduces to the weight ratio.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "dpmix/diffeo.hpp"
#include "dpmix/geometry.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

struct TmcmcConfig {
  double scale = 1.0;              // common scaling constant a
  Eigen::VectorXd scale_per_coord; // optional per-coordinate override
  long burn_in = 0;
  long thin = 1;
  long keep = 1;
  uint64_t seed = 1;
  int acf_max_lag = 40;

  void validate(int dim) const {
    if (!(scale > 0)) throw invalid_input("TmcmcConfig: scale must be > 0");
    if (scale_per_coord.size() != 0 && scale_per_coord.size() != dim)
      throw invalid_input("TmcmcConfig: per-coordinate scale has wrong size");
    if (scale_per_coord.size() != 0 && scale_per_coord.minCoeff() <= 0)
      throw invalid_input("TmcmcConfig: per-coordinate scale must be > 0");
    if (burn_in < 0 || thin < 1 || keep < 1)
      throw invalid_input("TmcmcConfig: need burn_in >= 0, thin >= 1, keep >= 1");
  }
};

struct ChainOutput {
  std::vector<ThetaAux> aux_samples;
  std::vector<Allocation> alloc_samples;
  double acceptance_rate = 0.0;
  std::vector<std::string> acf_names;
  std::vector<std::vector<double>> acf;  // one series per tracked coordinate
};

struct TmcmcState {
  Theta theta;
  double log_wr = 0.0;
};

inline ThetaAux initial_aux(const HyperParams& hp) {
  ThetaAux aux;
  aux.alpha_tilde = std::log(hp.a_alpha / hp.b_alpha);
  aux.atoms.assign(hp.N, Atom{hp.nu0, std::log(hp.s / hp.S)});
  aux.zeta.assign(hp.N - 1, 0.0);
  aux.psi.assign(hp.psi_dim(), 0.0);
  return aux;
}

// One joint move; returns true if accepted. state.log_wr is kept in sync.
inline bool tmcmc_step(TmcmcState& state, const std::vector<double>& y,
                       const HyperParams& hp, const TmcmcConfig& cfg,
                       Rng& rng) {
  const int d = hp.theta_dim();
  const double eps = std::abs(rnorm(rng));
  Eigen::VectorXd v = flatten(state.theta.aux);
  for (int j = 0; j < d; ++j) {
    const double a =
        cfg.scale_per_coord.size() ? cfg.scale_per_coord[j] : cfg.scale;
    const double sgn = runif(rng) < 0.5 ? -1.0 : 1.0;
    v[j] += sgn * a * eps;
  }
  Theta prop;
  prop.aux = unflatten(hp, v);
  prop.alloc = sample_allocations(prop.aux, hp, rng);
  const double lw = log_weight_ratio(prop, y, hp);

  if (std::log(runif(rng)) < lw - state.log_wr) {
    state.theta = std::move(prop);
    state.log_wr = lw;
    return true;
  }
  return false;
}

// Biased-normalized sample autocorrelation, acf[0] == 1. A constant series
// is flagged by returning 1, 0, 0, ... .
inline std::vector<double> autocorrelation(const std::vector<double>& series,
                                           int max_lag) {
  const int n = static_cast<int>(series.size());
  if (n <= max_lag)
    throw invalid_input("autocorrelation: series shorter than max_lag");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= n;
  double denom = 0.0;
  for (double x : series) denom += (x - mean) * (x - mean);
  std::vector<double> acf(max_lag + 1, 0.0);
  acf[0] = 1.0;
  if (denom == 0.0) return acf;
  for (int k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (int t = 0; t + k < n; ++t)
      s += (series[t] - mean) * (series[t + k] - mean);
    acf[k] = s / denom;
  }
  return acf;
}

inline ChainOutput run_chain(const std::vector<double>& y,
                             const HyperParams& hp, const TmcmcConfig& cfg) {
  hp.validate();
  cfg.validate(hp.theta_dim());
  Rng rng = make_rng(cfg.seed, Stream::Chain, 0);

  TmcmcState state;
  state.theta.aux = initial_aux(hp);
  state.theta.alloc = sample_allocations(state.theta.aux, hp, rng);
  state.log_wr = log_weight_ratio(state.theta, y, hp);

  ChainOutput out;
  out.aux_samples.reserve(cfg.keep);
  out.alloc_samples.reserve(cfg.keep);
  long accepted = 0;
  const long total = cfg.burn_in + cfg.keep * cfg.thin;
  for (long it = 0; it < total; ++it) {
    if (tmcmc_step(state, y, hp, cfg, rng)) ++accepted;
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      out.aux_samples.push_back(state.theta.aux);
      out.alloc_samples.push_back(state.theta.alloc);
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / total;

  // Track alpha_tilde plus the materialized last mixture slot, the slot the
  // reference runs monitor.
  if (cfg.acf_max_lag > 0 &&
      static_cast<long>(out.aux_samples.size()) > cfg.acf_max_lag) {
    const int K = static_cast<int>(out.aux_samples.size());
    std::vector<double> a(K), nu(K), tau(K);
    for (int k = 0; k < K; ++k) {
      a[k] = out.aux_samples[k].alpha_tilde;
      const int ci = out.alloc_samples[k].c[hp.M - 1];
      nu[k] = out.aux_samples[k].atoms[ci].nu;
      tau[k] = std::exp(out.aux_samples[k].atoms[ci].lambda_tilde);
    }
    out.acf_names = {"alpha_tilde", "nu_xi_M", "tau_xi_M"};
    out.acf = {autocorrelation(a, cfg.acf_max_lag),
               autocorrelation(nu, cfg.acf_max_lag),
               autocorrelation(tau, cfg.acf_max_lag)};
  }
  return out;
}

// Map the kept draws through h^{-1} and fit the ellipsoid frame on the
// gamma-scale cloud.
inline EllipsoidFrame warm_start_frame(const ChainOutput& output,
                                       const HyperParams& hp,
                                       const DiffeoParams& diffeo) {
  if (output.aux_samples.empty())
    throw numeric_error("warm_start_frame: no samples");
  Eigen::MatrixXd m(output.aux_samples.size(), hp.theta_dim());
  for (size_t k = 0; k < output.aux_samples.size(); ++k)
    m.row(k) = h_inverse(flatten(output.aux_samples[k]), diffeo.b);
  return fit_frame(m);
}

// Fraction of warm-start gamma samples beyond the last scheduled radius; a
// coverage diagnostic for the radii configuration.
inline double fraction_outside_schedule(const ChainOutput& output,
                                        const HyperParams& hp,
                                        const DiffeoParams& diffeo,
                                        const EllipsoidFrame& frame,
                                        const ShellSchedule& sched) {
  if (output.aux_samples.empty()) return 0.0;
  long outside = 0;
  const double last = sched.radius(sched.count - 1);
  for (const ThetaAux& aux : output.aux_samples) {
    const double r =
        mahalanobis(frame, h_inverse(flatten(aux), diffeo.b));
    if (r > last) ++outside;
  }
  return static_cast<double>(outside) / output.aux_samples.size();
}

}  // namespace dpmix
