// Target interface consumed by the iid engine. A target provides:
//   dim()                           coordinate-space dimension
//   sample_and_eval(gamma, rng)     draw the discrete block given gamma and
//                                   return it with log rho(gamma, disc)
//   log_weight_ratio(gamma, disc)   log rho for a given pair
//   log_discrete_mass(gamma, disc)  log proposal mass of the discrete block
//                                   (only used by the faithful residual path)
//
// DpPosteriorTarget puts the DP mixture posterior in this form on the
// flattened gamma scale: theta = h(gamma), allocations drawn from G_N given
// theta, and rho the transformed weight ratio.
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dpmix/diffeo.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

class DpPosteriorTarget {
 public:
  using Discrete = Allocation;

  DpPosteriorTarget(std::vector<double> y, HyperParams hp, DiffeoParams diffeo)
      : y_(std::move(y)), hp_(hp), diffeo_(diffeo) {
    hp_.validate();
    diffeo_.validate();
    if (y_.empty()) throw invalid_input("DpPosteriorTarget: empty data");
  }

  int dim() const { return hp_.theta_dim(); }
  const HyperParams& hyper() const { return hp_; }
  const DiffeoParams& diffeo() const { return diffeo_; }
  const std::vector<double>& data() const { return y_; }

  std::pair<Allocation, double> sample_and_eval(const Eigen::VectorXd& gamma,
                                                Rng& rng) const {
    const ThetaAux aux = unflatten(hp_, h_forward(gamma, diffeo_.b));
    const StickWeights sw = stick_weights(aux.zeta);
    Allocation alloc = sample_allocations(sw, hp_, rng);
    const Theta theta{aux, alloc};
    const double lr = log_weight_ratio(theta, y_, hp_) +
                      log_abs_det_grad_h(gamma, diffeo_.b);
    return {std::move(alloc), lr};
  }

  double log_weight_ratio(const Eigen::VectorXd& gamma,
                          const Allocation& alloc) const {
    return log_transformed_weight_ratio(gamma, alloc, y_, hp_, diffeo_.b);
  }

  double log_discrete_mass(const Eigen::VectorXd& gamma,
                           const Allocation& alloc) const {
    const ThetaAux aux = unflatten(hp_, h_forward(gamma, diffeo_.b));
    return log_alloc_mass(stick_weights(aux.zeta), alloc);
  }

  Theta to_theta(const Eigen::VectorXd& gamma, const Allocation& alloc) const {
    return Theta{unflatten(hp_, h_forward(gamma, diffeo_.b)), alloc};
  }

 private:
  std::vector<double> y_;
  HyperParams hp_;
  DiffeoParams diffeo_;
};

}  // namespace dpmix
