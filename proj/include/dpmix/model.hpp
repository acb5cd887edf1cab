// Truncated Dirichlet-process mixture of normals with a bounded number of
// mixture components. State is kept on an unconstrained scale:
//   alpha_tilde = log alpha, lambda_tilde = log tau, zeta = logit(V).
// Component parameters xi_j are represented by atom indices, so the
// discrete prior mass of an allocation is exactly prod_j w_{c_j}.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "dpmix/common.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

enum class WeightMode { FixedEqual, RandomPsi };

struct HyperParams {
  int M = 1;  // max mixture components
  int N = 2;  // truncation level
  double s = 4.0, S = 2.0;        // tau ~ Gamma(s/2, S/2) under G_0
  double nu0 = 0.0, c = 1.0;      // nu | tau ~ N(nu0, c/tau)
  double a_alpha = 2.0, b_alpha = 4.0;  // alpha ~ Gamma(a_alpha, b_alpha)
  WeightMode weight_mode = WeightMode::FixedEqual;
  double psi_mu = 0.0, psi_sd = 1.0;  // f_psi defaults to N(0,1)

  int psi_dim() const { return weight_mode == WeightMode::RandomPsi ? M : 0; }
  int theta_dim() const { return 1 + 2 * N + (N - 1) + psi_dim(); }

  void validate() const {
    if (M < 1) throw invalid_input("HyperParams: M must be >= 1");
    if (N < 2) throw invalid_input("HyperParams: N must be >= 2");
    if (!(s > 0 && S > 0 && c > 0 && a_alpha > 0 && b_alpha > 0))
      throw invalid_input("HyperParams: s, S, c, a_alpha, b_alpha must be > 0");
    if (!(psi_sd > 0)) throw invalid_input("HyperParams: psi_sd must be > 0");
  }
};

struct Atom {
  double nu = 0.0;            // component mean
  double lambda_tilde = 0.0;  // log precision
};

// Continuous block: alpha_tilde, atoms, logistic sticks, optional psi.
struct ThetaAux {
  double alpha_tilde = 0.0;
  std::vector<Atom> atoms;
  std::vector<double> zeta;  // length N-1, V_N == 1
  std::vector<double> psi;   // empty unless RandomPsi

  int dim() const {
    return 1 + 2 * static_cast<int>(atoms.size()) +
           static_cast<int>(zeta.size()) + static_cast<int>(psi.size());
  }
};

// Atom index per mixture slot; 0-based, each in [0, N).
struct Allocation {
  std::vector<int> c;
};

struct Theta {
  ThetaAux aux;
  Allocation alloc;
};

struct StickWeights {
  std::vector<double> w;
  std::vector<double> log_w;
};

// Flat coordinate layout: [alpha_tilde, nu_1, lt_1, ..., nu_N, lt_N,
// zeta_1..zeta_{N-1}, psi_1..psi_M].
inline Eigen::VectorXd flatten(const ThetaAux& aux) {
  const int N = static_cast<int>(aux.atoms.size());
  Eigen::VectorXd v(aux.dim());
  int k = 0;
  v[k++] = aux.alpha_tilde;
  for (int i = 0; i < N; ++i) {
    v[k++] = aux.atoms[i].nu;
    v[k++] = aux.atoms[i].lambda_tilde;
  }
  for (double z : aux.zeta) v[k++] = z;
  for (double p : aux.psi) v[k++] = p;
  return v;
}

inline ThetaAux unflatten(const HyperParams& hp, const Eigen::VectorXd& v) {
  if (v.size() != hp.theta_dim())
    throw invalid_input("unflatten: coordinate vector has wrong dimension");
  ThetaAux aux;
  int k = 0;
  aux.alpha_tilde = v[k++];
  aux.atoms.resize(hp.N);
  for (int i = 0; i < hp.N; ++i) {
    aux.atoms[i].nu = v[k++];
    aux.atoms[i].lambda_tilde = v[k++];
  }
  aux.zeta.resize(hp.N - 1);
  for (int i = 0; i < hp.N - 1; ++i) aux.zeta[i] = v[k++];
  aux.psi.resize(hp.psi_dim());
  for (int i = 0; i < hp.psi_dim(); ++i) aux.psi[i] = v[k++];
  return aux;
}

// w_i = V_i prod_{j<i} (1 - V_j), V_i = logistic(zeta_i), V_N = 1.
inline StickWeights stick_weights(const std::vector<double>& zeta) {
  if (!all_finite(zeta))
    throw invalid_input("stick_weights: non-finite zeta entry");
  const int N = static_cast<int>(zeta.size()) + 1;
  if (N < 2) throw invalid_input("stick_weights: need N >= 2");
  StickWeights sw;
  sw.log_w.resize(N);
  double log_remaining = 0.0;  // log prod_{j<i} (1 - V_j)
  for (int i = 0; i + 1 < N; ++i) {
    sw.log_w[i] = log_logistic(zeta[i]) + log_remaining;
    log_remaining += log_logistic(-zeta[i]);
  }
  sw.log_w[N - 1] = log_remaining;
  sw.w.resize(N);
  for (int i = 0; i < N; ++i) sw.w[i] = std::exp(sw.log_w[i]);
  return sw;
}

// log mixture weights pi_j: 1/M in FixedEqual mode, softmax(psi) otherwise.
inline std::vector<double> log_mixture_weights(const ThetaAux& aux,
                                               const HyperParams& hp) {
  std::vector<double> lw(hp.M);
  if (hp.weight_mode == WeightMode::FixedEqual) {
    const double v = -std::log(static_cast<double>(hp.M));
    for (auto& x : lw) x = v;
  } else {
    const double z = log_sum_exp(aux.psi);
    for (int j = 0; j < hp.M; ++j) lw[j] = aux.psi[j] - z;
  }
  return lw;
}

namespace detail {
inline void check_aux(const ThetaAux& aux, const HyperParams& hp) {
  if (static_cast<int>(aux.atoms.size()) != hp.N ||
      static_cast<int>(aux.zeta.size()) != hp.N - 1 ||
      static_cast<int>(aux.psi.size()) != hp.psi_dim())
    throw invalid_input("ThetaAux blocks do not match HyperParams");
  if (!std::isfinite(aux.alpha_tilde))
    throw invalid_input("ThetaAux: non-finite alpha_tilde");
  for (const auto& a : aux.atoms)
    if (!std::isfinite(a.nu) || !std::isfinite(a.lambda_tilde))
      throw invalid_input("ThetaAux: non-finite atom");
  if (!all_finite(aux.zeta) || !all_finite(aux.psi))
    throw invalid_input("ThetaAux: non-finite entry");
}

inline void check_alloc(const Allocation& alloc, const HyperParams& hp) {
  if (static_cast<int>(alloc.c.size()) != hp.M)
    throw invalid_input("Allocation: wrong number of slots");
  for (int ci : alloc.c)
    if (ci < 0 || ci >= hp.N)
      throw invalid_input("Allocation: index out of range");
}
}  // namespace detail

// Log prior density of the continuous block, all change-of-variable
// Jacobians included so this is a density in (alpha_tilde, nu, lambda_tilde,
// zeta, psi) coordinates.
inline double log_prior_aux(const ThetaAux& aux, const HyperParams& hp) {
  detail::check_aux(aux, hp);
  const double a = hp.a_alpha, b = hp.b_alpha;
  const double alpha = std::exp(aux.alpha_tilde);

  // [alpha_tilde]: Gamma(a,b) density of alpha times Jacobian alpha.
  double lp = a * std::log(b) - std::lgamma(a) + a * aux.alpha_tilde -
              b * alpha;

  // [phi_i]: tau ~ Gamma(s/2, S/2) with Jacobian tau, nu | tau ~ N(nu0, c/tau).
  const double half_s = 0.5 * hp.s, half_S = 0.5 * hp.S;
  const double tau_const = half_s * std::log(half_S) - std::lgamma(half_s);
  for (const Atom& at : aux.atoms) {
    const double tau = std::exp(at.lambda_tilde);
    lp += tau_const + half_s * at.lambda_tilde - half_S * tau;
    const double d = at.nu - hp.nu0;
    lp += -0.5 * (kLog2Pi + std::log(hp.c)) + 0.5 * at.lambda_tilde -
          tau * d * d / (2.0 * hp.c);
  }

  // [zeta_i]: Beta(1, alpha) density of V_i times Jacobian V_i (1 - V_i).
  for (double z : aux.zeta)
    lp += aux.alpha_tilde + log_logistic(z) + alpha * log_logistic(-z);

  // [psi_j]
  for (double p : aux.psi) lp += normal_logpdf(p, hp.psi_mu, hp.psi_sd);

  return lp;
}

// sum_i log sum_j pi_j N(y_i; nu_{c_j}, 1/tau_{c_j})
inline double log_likelihood(const std::vector<double>& y, const Theta& theta,
                             const HyperParams& hp) {
  if (y.empty()) throw invalid_input("log_likelihood: empty data");
  detail::check_aux(theta.aux, hp);
  detail::check_alloc(theta.alloc, hp);

  const std::vector<double> log_pi = log_mixture_weights(theta.aux, hp);
  std::vector<double> slot_nu(hp.M), slot_lt(hp.M);
  for (int j = 0; j < hp.M; ++j) {
    const Atom& at = theta.aux.atoms[theta.alloc.c[j]];
    slot_nu[j] = at.nu;
    slot_lt[j] = at.lambda_tilde;
  }

  double ll = 0.0;
  std::vector<double> comp(hp.M);
  for (double yi : y) {
    for (int j = 0; j < hp.M; ++j) {
      const double d = yi - slot_nu[j];
      comp[j] = log_pi[j] - 0.5 * kLog2Pi + 0.5 * slot_lt[j] -
                0.5 * std::exp(slot_lt[j]) * d * d;
    }
    ll += log_sum_exp(comp);
  }
  return ll;
}

inline double log_alloc_mass(const StickWeights& sw, const Allocation& alloc) {
  double s = 0.0;
  for (int ci : alloc.c) s += sw.log_w[ci];
  return s;
}

// log pi~(theta | y) = log lik + log prior(aux) + sum_j log w_{c_j}
inline double log_unnorm_posterior(const Theta& theta,
                                   const std::vector<double>& y,
                                   const HyperParams& hp) {
  const StickWeights sw = stick_weights(theta.aux.zeta);
  return log_likelihood(y, theta, hp) + log_prior_aux(theta.aux, hp) +
         log_alloc_mass(sw, theta.alloc);
}

// log of pi~ / prod_j G_N(xi_j); the allocation mass cancels exactly under
// the index representation.
inline double log_weight_ratio(const Theta& theta,
                               const std::vector<double>& y,
                               const HyperParams& hp) {
  return log_likelihood(y, theta, hp) + log_prior_aux(theta.aux, hp);
}

inline Allocation sample_allocations(const StickWeights& sw,
                                     const HyperParams& hp, Rng& rng) {
  Allocation alloc;
  alloc.c.resize(hp.M);
  const int N = static_cast<int>(sw.w.size());
  for (int j = 0; j < hp.M; ++j) {
    const double u = runif(rng);
    double cum = 0.0;
    int pick = N - 1;
    for (int i = 0; i < N; ++i) {
      cum += sw.w[i];
      if (u <= cum) {
        pick = i;
        break;
      }
    }
    alloc.c[j] = pick;
  }
  return alloc;
}

inline Allocation sample_allocations(const ThetaAux& aux,
                                     const HyperParams& hp, Rng& rng) {
  return sample_allocations(stick_weights(aux.zeta), hp, rng);
}

}  // namespace dpmix
