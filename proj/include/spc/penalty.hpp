#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace spc {

// Minimax concave penalty parameters. lambda scales the regularization,
// delta controls concavity; lambda * delta is the distance threshold beyond
// which the penalty saturates. lambda = 0 is accepted so the unpenalized
// (plain k-means) limit of the optimizer stays expressible.
struct PenaltyParams {
  double lambda = 1.0;
  double delta = 1.0;

  double threshold() const { return lambda * delta; }  // eta
};

inline PenaltyParams make_penalty_params(double lambda, double delta) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("penalty: lambda must be finite and >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("penalty: delta must be finite and > 0");
  return PenaltyParams{lambda, delta};
}

// rho(t) = t - t^2/(2*eta) for t < eta, eta/2 otherwise
inline double rho(double t, const PenaltyParams& params) {
  if (t < 0.0) throw std::invalid_argument("rho: t must be nonnegative");
  const double eta = params.threshold();
  if (t >= eta) return eta / 2.0;
  return t - t * t / (2.0 * eta);
}

// right derivative; 0 at and beyond the kink t = eta
inline double rho_prime(double t, const PenaltyParams& params) {
  if (t < 0.0) throw std::invalid_argument("rho_prime: t must be nonnegative");
  const double eta = params.threshold();
  if (t >= eta) return 0.0;
  return 1.0 - t / eta;
}

// largest value of lambda * rho(t), attained for all t >= eta
inline double max_penalty(const PenaltyParams& params) {
  return params.lambda * params.lambda * params.delta / 2.0;
}

// MM weight of center mu_l in the block update of mu_k:
//   w = N_l * rho'(||mu_k - mu_l||) / (2 ||mu_k - mu_l||)
// Coincident centers are the caller's problem; the optimizer merges them
// before weighting.
inline double weight(std::span<const double> mu_k, std::span<const double> mu_l,
                     int n_l, const PenaltyParams& params) {
  if (mu_k.size() != mu_l.size())
    throw std::invalid_argument("weight: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t m = 0; m < mu_k.size(); ++m) {
    const double diff = mu_k[m] - mu_l[m];
    d2 += diff * diff;
  }
  const double d = std::sqrt(d2);
  if (d == 0.0) throw std::invalid_argument("weight: centers coincide");
  return static_cast<double>(n_l) * rho_prime(d, params) / (2.0 * d);
}

}  // namespace spc
