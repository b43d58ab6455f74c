#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spc/core.hpp"
#include "spc/optimizer.hpp"
#include "spc/penalty.hpp"
#include "spc/splitting.hpp"

namespace spc {

/// Path construction parameters. omega is the one required choice: the
/// approximate fraction of nearest-neighbor pairs allowed to merge in the
/// first solution. Guidance: 0.5 for n > p, 0.1 for n < p.
struct PathConfig {
  double omega = 0.5;
  double tau = 0.45;
  double phi = 0.5;
  double alpha = 0.9;
  int grid_size = 20;

  static PathConfig defaults(double omega, std::size_t p) {
    PathConfig c;
    c.omega = omega;
    c.tau = 0.9 * omega;
    c.phi = 0.5;
    c.alpha = 0.9;
    c.grid_size = static_cast<int>(std::min<std::size_t>(20, p));
    return c;
  }
};

inline void validate(const PathConfig& c) {
  if (!(c.omega > 0.0 && c.omega < 1.0))
    throw std::invalid_argument("path config: omega must be in (0,1)");
  if (!(c.tau > 0.0 && c.tau < c.omega))
    throw std::invalid_argument("path config: tau must be in (0, omega)");
  if (!(c.phi > 0.0 && c.phi < 1.0))
    throw std::invalid_argument("path config: phi must be in (0,1)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0))
    throw std::invalid_argument("path config: alpha must be in (0,1)");
  if (c.grid_size < 1)
    throw std::invalid_argument("path config: grid_size must be positive");
}

struct PathOptions {
  bool allow_splits = false;
  int noise_cutoff = 3;  // cluster sizes <= cutoff count as noise in k_clust
};

struct Solution {
  PenaltyParams params;
  ClusterState state;
  MMReport report;
  int k_total = 0;
  int k_clust = 0;
  bool bvr_triggered = false;
};

struct SolutionPath {
  std::vector<Solution> solutions;
  PathConfig config;

  /// Indices of the first occurrence of each distinct (k_total, assignment).
  std::vector<std::size_t> deduplicated() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < solutions.size(); ++i) {
      bool dup = false;
      for (std::size_t j : out)
        if (solutions[j].k_total == solutions[i].k_total &&
            solutions[j].state.assignment == solutions[i].state.assignment) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(i);
    }
    return out;
  }
};

/// Initial (delta, lambda): eta_1 = Q_omega so roughly an omega fraction of
/// nearest-neighbor pairs fall under the merge threshold, and lambda_1 makes
/// the first block update contract a Q_tau-distant pair by the factor phi.
inline PenaltyParams init_params(const DataMatrix& data, const PathConfig& config) {
  validate(config);
  const double q_omega = nn_quantile(data, config.omega);
  const double q_tau = nn_quantile(data, config.tau);
  if (q_tau <= 0.0 || q_omega <= q_tau)
    throw std::invalid_argument(
        "init_params: degenerate nearest-neighbor quantiles (Q_omega must "
        "exceed Q_tau > 0); perturb omega/tau or jitter duplicate rows");
  const double lambda1 = 2.0 * config.phi * q_omega * q_tau /
                         ((1.0 - config.phi) * (q_omega - q_tau));
  return make_penalty_params(lambda1, q_omega / lambda1);
}

/// G lambdas from lambda_lo to (1 + 1/delta) * max pairwise distance,
/// evenly spaced in log scale. Collapses to the upper bound alone when the
/// requested lower bound already exceeds it.
inline std::vector<double> lambda_grid(double delta, double lambda_lo,
                                       const DataMatrix& data, int G) {
  if (G < 1) throw std::invalid_argument("lambda_grid: G must be positive");
  const double lambda_hi = (1.0 + 1.0 / delta) * max_pairwise_distance(data);
  if (!(lambda_lo < lambda_hi) || G == 1) return {lambda_hi};
  std::vector<double> grid(static_cast<std::size_t>(G));
  const double lo = std::log(lambda_lo);
  const double hi = std::log(lambda_hi);
  for (int g = 0; g < G; ++g)
    grid[static_cast<std::size_t>(g)] =
        std::exp(lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(G - 1));
  grid.front() = lambda_lo;
  grid.back() = lambda_hi;
  return grid;
}

/// delta <- alpha * delta with the new lambda lower bound chosen so the
/// maximum penalty z = lambda^2 delta / 2 carries over unchanged:
/// lambda_1' = lambda_tilde / sqrt(alpha). `current` holds the lambda in
/// force when the change was triggered.
inline PenaltyParams decrease_delta(const PenaltyParams& current,
                                    const PathConfig& config) {
  return make_penalty_params(current.lambda / std::sqrt(config.alpha),
                             current.delta * config.alpha);
}

/// Bias-variance ratio of cluster k: squared distance of the fitted center
/// from the cluster mean over the within-cluster variance; singletons are
/// judged against half their distance to the nearest other center.
inline double bvr(std::size_t k, const ClusterState& state, const DataMatrix& data) {
  if (k >= state.k()) throw std::invalid_argument("bvr: bad cluster index");
  if (state.sizes[k] > 1) {
    const Vec mean = cluster_mean(data, state, k);
    double within = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      if (state.assignment[i] != static_cast<int>(k)) continue;
      for (std::size_t m = 0; m < data.p; ++m) {
        const double diff = data(i, m) - mean[m];
        within += diff * diff;
      }
    }
    within /= static_cast<double>(state.sizes[k] - 1);
    double bias = 0.0;
    for (std::size_t m = 0; m < data.p; ++m) {
      const double diff = state.centers[k][m] - mean[m];
      bias += diff * diff;
    }
    if (within == 0.0)
      return bias > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return bias / within;
  }
  std::size_t obj = data.n;
  for (std::size_t i = 0; i < data.n; ++i)
    if (state.assignment[i] == static_cast<int>(k)) {
      obj = i;
      break;
    }
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < state.k(); ++l) {
    if (l == k) continue;
    r = std::min(r, pairwise_distance(data.row(obj), state.centers[l]));
  }
  double bias = 0.0;
  for (std::size_t m = 0; m < data.p; ++m) {
    const double diff = state.centers[k][m] - data(obj, m);
    bias += diff * diff;
  }
  return bias / ((r / 2.0) * (r / 2.0));
}

namespace detail {

inline int count_above_cutoff(const ClusterState& state, int cutoff) {
  int n = 0;
  for (int s : state.sizes)
    if (s > cutoff) ++n;
  return n;
}

// init_params, but when the two quantiles coincide (all nearest-neighbor
// distances equal, e.g. n = 2) fall back to a synthetic pair distance of
// 0.9 * Q_omega so the path can still start; the grid's upper end does the
// actual merging in that case.
inline PenaltyParams init_params_robust(const DataMatrix& data,
                                        const PathConfig& config) {
  validate(config);
  const double q_omega = nn_quantile(data, config.omega);
  const double q_tau = nn_quantile(data, config.tau);
  if (q_omega > q_tau && q_tau > 0.0) return init_params(data, config);
  if (q_omega <= 0.0)
    throw std::invalid_argument(
        "run_path: all nearest-neighbor distances are zero; jitter the data");
  const double d = 0.9 * q_omega;
  const double lambda1 =
      2.0 * config.phi * q_omega * d / ((1.0 - config.phi) * (q_omega - d));
  return make_penalty_params(lambda1, q_omega / lambda1);
}

}  // namespace detail

/// Full solution path: start from singletons, sweep lambda up each grid,
/// decrease delta whenever some cluster's BVR exceeds 1 (or the grid runs
/// out with K > 1), warm starting every run from the previous state. Stops
/// at K = 1.
inline SolutionPath run_path(const DataMatrix& data, const PathConfig& config,
                             const PathOptions& opts = {}) {
  validate(config);
  SolutionPath path;
  path.config = config;
  const ScaleThreshold xi = merge_threshold(data);
  PenaltyParams bound = detail::init_params_robust(data, config);
  ClusterState state = singleton_state(data);
  for (;;) {
    const std::vector<double> grid =
        lambda_grid(bound.delta, bound.lambda, data, config.grid_size);
    bool fired = false;
    for (double lambda : grid) {
      const PenaltyParams params = make_penalty_params(lambda, bound.delta);
      auto [next_state, report] = run_mm(std::move(state), data, params, xi);
      state = std::move(next_state);
      if (opts.allow_splits) split_pass(state, data, params);
      Solution sol;
      sol.params = params;
      sol.report = report;
      sol.k_total = static_cast<int>(state.k());
      sol.k_clust = detail::count_above_cutoff(state, opts.noise_cutoff);
      sol.state = state;
      if (sol.k_total == 1) {
        path.solutions.push_back(std::move(sol));
        return path;
      }
      for (std::size_t k = 0; k < state.k(); ++k)
        if (bvr(k, state, data) > 1.0) {
          fired = true;
          break;
        }
      sol.bvr_triggered = fired;
      path.solutions.push_back(std::move(sol));
      if (fired) {
        bound = decrease_delta(params, config);
        break;
      }
    }
    // grid exhausted without merging everything: decrease delta from the
    // top of the grid and keep going
    if (!fired) bound = decrease_delta(make_penalty_params(grid.back(), bound.delta), config);
  }
}

}  // namespace spc
