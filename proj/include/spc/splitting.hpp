#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spc/core.hpp"
#include "spc/penalty.hpp"

namespace spc {

struct SplitOutcome {
  bool moved = false;
  Vec new_theta;
};

/// Soft-thresholding split step for object i, currently fused to cluster k.
/// Minimizes the majorized single-object loss
///   ||y_i - theta||^2 + lambda * sum_{l != k} w_{i,l} ||theta - mu_l||^2
///                     + lambda * N_k * sum_m |theta_m - mu_km|
/// with w_{i,l} the MM weights of i (as a singleton) against the other
/// centers. The quadratic part alone is minimized by theta_tilde; the own-
/// cluster term then soft-thresholds each component of theta_tilde - mu_k at
///   gamma = lambda * N_k / (2 (1 + lambda * sum_l w_{i,l})).
/// All components below gamma: the object stays put. Otherwise it unfuses;
/// thresholded components keep the unconstrained value theta_tilde.
inline SplitOutcome split_step(std::size_t i, const ClusterState& state,
                               const DataMatrix& data, const PenaltyParams& params) {
  if (i >= data.n) throw std::invalid_argument("split_step: bad object index");
  const std::size_t k = static_cast<std::size_t>(state.assignment[i]);
  const Vec& mu_k = state.centers[k];

  double wsum = 0.0;
  Vec wmu(data.p, 0.0);
  for (std::size_t l = 0; l < state.k(); ++l) {
    if (l == k) continue;
    const double w = weight(mu_k, state.centers[l], state.sizes[l], params);
    if (w == 0.0) continue;
    const double lw = params.lambda * w;
    wsum += lw;
    for (std::size_t m = 0; m < data.p; ++m) wmu[m] += lw * state.centers[l][m];
  }

  Vec theta_tilde(data.p);
  for (std::size_t m = 0; m < data.p; ++m)
    theta_tilde[m] = (data(i, m) + wmu[m]) / (1.0 + wsum);

  const double gamma =
      params.lambda * static_cast<double>(state.sizes[k]) / (2.0 * (1.0 + wsum));

  SplitOutcome out;
  out.new_theta = mu_k;
  bool any = false;
  Vec beta(data.p, 0.0);
  for (std::size_t m = 0; m < data.p; ++m) {
    const double bhat = theta_tilde[m] - mu_k[m];
    if (bhat > gamma)
      beta[m] = bhat - gamma;
    else if (bhat < -gamma)
      beta[m] = bhat + gamma;
    if (beta[m] != 0.0) any = true;
  }
  if (!any) return out;
  out.moved = true;
  for (std::size_t m = 0; m < data.p; ++m)
    out.new_theta[m] = beta[m] != 0.0 ? mu_k[m] + beta[m] : theta_tilde[m];
  return out;
}

/// Cycle all objects in index order; each mover becomes a new singleton
/// cluster at its split position. Objects that already sit alone in their
/// cluster are skipped (nothing to unfuse from). Returns the number of
/// objects that moved.
inline int split_pass(ClusterState& state, const DataMatrix& data,
                      const PenaltyParams& params) {
  int moved = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const std::size_t k = static_cast<std::size_t>(state.assignment[i]);
    if (state.sizes[k] <= 1) continue;
    SplitOutcome out = split_step(i, state, data, params);
    if (!out.moved) continue;
    ++moved;
    --state.sizes[k];
    state.assignment[i] = static_cast<int>(state.k());
    state.centers.push_back(std::move(out.new_theta));
    state.sizes.push_back(1);
  }
  return moved;
}

}  // namespace spc
