#pragma once

#include <cstddef>
#include <utility>

#include "spc/core.hpp"
#include "spc/penalty.hpp"

namespace spc {

struct MMReport {
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  int merges_performed = 0;
};

/// One block update: the minimizer of the quadratic surrogate of the
/// penalized loss in mu_k, with weights evaluated at the current mu_k and
/// all other centers held at their current values. With no active weights
/// this is exactly the cluster mean.
inline Vec center_update(std::size_t k, const ClusterState& state,
                         const DataMatrix& data, const PenaltyParams& params) {
  Vec mean = cluster_mean(data, state, k);
  if (params.lambda == 0.0 || state.k() == 1) return mean;
  Vec num = mean;
  double den = 1.0;
  for (std::size_t l = 0; l < state.k(); ++l) {
    if (l == k) continue;
    const double w = weight(state.centers[k], state.centers[l], state.sizes[l], params);
    if (w == 0.0) continue;
    const double lw = params.lambda * w;
    for (std::size_t m = 0; m < data.p; ++m) num[m] += lw * state.centers[l][m];
    den += lw;
  }
  if (den == 1.0) return mean;
  for (double& v : num) v /= den;
  return num;
}

namespace detail {

// Merge cluster b into cluster a (a < b): size-weighted mean center,
// relabel assignments, drop slot b.
inline void merge_clusters(ClusterState& state, std::size_t a, std::size_t b) {
  const double na = state.sizes[a];
  const double nb = state.sizes[b];
  for (std::size_t m = 0; m < state.centers[a].size(); ++m)
    state.centers[a][m] =
        (na * state.centers[a][m] + nb * state.centers[b][m]) / (na + nb);
  state.sizes[a] += state.sizes[b];
  for (int& c : state.assignment) {
    if (c == static_cast<int>(b)) c = static_cast<int>(a);
    if (c > static_cast<int>(b)) --c;
  }
  state.centers.erase(state.centers.begin() + static_cast<std::ptrdiff_t>(b));
  state.sizes.erase(state.sizes.begin() + static_cast<std::ptrdiff_t>(b));
}

// Merge every center within tol of centers[cur] (chained: re-scan after each
// merge). Keeps the surviving cluster at the smaller index. `next` is the
// sweep cursor; erasing a slot below it shifts it down. Returns the index
// the merged cluster ended up at.
inline std::size_t chain_merges(ClusterState& state, std::size_t cur, double tol,
                                std::size_t& next, int& merges) {
  for (;;) {
    std::size_t hit = state.k();
    for (std::size_t l = 0; l < state.k(); ++l) {
      if (l == cur) continue;
      if (pairwise_distance(state.centers[cur], state.centers[l]) < tol) {
        hit = l;
        break;
      }
    }
    if (hit == state.k()) return cur;
    const std::size_t a = std::min(cur, hit);
    const std::size_t b = std::max(cur, hit);
    merge_clusters(state, a, b);
    ++merges;
    if (b < next) --next;
    cur = a;
  }
}

// One full Gauss-Seidel sweep over the blocks; returns the number of merges.
inline int mm_sweep(ClusterState& state, const DataMatrix& data,
                    const PenaltyParams& params, ScaleThreshold xi) {
  int merges = 0;
  std::size_t k = 0;
  while (k < state.k()) {
    std::size_t next = k + 1;
    // coincident centers (duplicate rows as singletons) must merge before
    // the weights are evaluated; tol = denorm_min catches exactly d == 0
    k = chain_merges(state, k, std::numeric_limits<double>::denorm_min(), next, merges);
    state.centers[k] = center_update(k, state, data, params);
    chain_merges(state, k, xi.xi, next, merges);
    k = next;
  }
  return merges;
}

}  // namespace detail

/// One iteration of the MM algorithm: cycle the blocks in index order,
/// update each center, and fuse any centers that come within xi.
inline ClusterState mm_iteration(ClusterState state, const DataMatrix& data,
                                 const PenaltyParams& params, ScaleThreshold xi) {
  detail::mm_sweep(state, data, params, xi);
  return state;
}

/// Iterate mm_iteration until the largest center movement falls below the
/// stationarity tolerance or 50 iterations. A sweep that merged anything
/// never terminates the loop; the next sweep re-checks movement on the
/// surviving clusters.
///
/// The stationarity tolerance is xi / 20, strictly tighter than the merge
/// threshold. With both at xi, a pair of centers contracting at per-sweep
/// rate r stalls at separation ~ 2 xi / (1 - r) without ever fusing; the
/// slack lets slow contractions (r up to ~0.9) reach the merge first.
inline std::pair<ClusterState, MMReport> run_mm(ClusterState state,
                                                const DataMatrix& data,
                                                const PenaltyParams& params,
                                                ScaleThreshold xi) {
  constexpr int kMaxIterations = 50;
  constexpr double kStationarityFactor = 1.0 / 20.0;
  MMReport report;
  while (report.iterations < kMaxIterations) {
    const std::vector<Vec> before = state.centers;
    const int merges = detail::mm_sweep(state, data, params, xi);
    ++report.iterations;
    report.merges_performed += merges;
    if (merges > 0) continue;
    double movement = 0.0;
    for (std::size_t k = 0; k < state.k(); ++k)
      movement = std::max(movement, pairwise_distance(before[k], state.centers[k]));
    if (movement < xi.xi * kStationarityFactor) {
      report.converged = true;
      break;
    }
  }
  report.final_objective = objective(data, state, params);
  return {std::move(state), report};
}

}  // namespace spc
