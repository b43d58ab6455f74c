#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spc/penalty.hpp"

namespace spc {

using Vec = std::vector<double>;

/// n objects by p features, row major, all entries finite.
struct DataMatrix {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t m) const { return values[i * p + m]; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * p, p};
  }
};

inline DataMatrix make_data(std::size_t n, std::size_t p, std::vector<double> values) {
  if (n < 2 || p < 1) throw std::invalid_argument("data: need n >= 2 and p >= 1");
  if (values.size() != n * p) throw std::invalid_argument("data: size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("data: non-finite entry");
  return DataMatrix{n, p, std::move(values)};
}

/// Current clustering: K centers, object-to-cluster assignment (0-based),
/// cluster sizes. sizes[k] always equals the number of objects assigned to k.
struct ClusterState {
  std::vector<Vec> centers;
  std::vector<int> assignment;
  std::vector<int> sizes;

  std::size_t k() const { return centers.size(); }
};

/// Every object its own cluster, centered on itself.
inline ClusterState singleton_state(const DataMatrix& data) {
  ClusterState s;
  s.centers.reserve(data.n);
  s.assignment.resize(data.n);
  s.sizes.assign(data.n, 1);
  for (std::size_t i = 0; i < data.n; ++i) {
    s.centers.emplace_back(data.row(i).begin(), data.row(i).end());
    s.assignment[i] = static_cast<int>(i);
  }
  return s;
}

/// Merge/convergence tolerance in data units.
struct ScaleThreshold {
  double xi = 0.0;
};

inline double pairwise_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pairwise_distance: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double diff = a[m] - b[m];
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

/// Mean of the rows assigned to cluster k.
inline Vec cluster_mean(const DataMatrix& data, const ClusterState& state, std::size_t k) {
  Vec mean(data.p, 0.0);
  int count = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    if (state.assignment[i] != static_cast<int>(k)) continue;
    ++count;
    for (std::size_t m = 0; m < data.p; ++m) mean[m] += data(i, m);
  }
  if (count == 0) throw std::invalid_argument("cluster_mean: empty cluster");
  for (double& v : mean) v /= count;
  return mean;
}

/// Penalized loss: within-cluster sum of squares plus
/// lambda * sum_{k<l} N_k N_l rho(||mu_k - mu_l||).
inline double objective(const DataMatrix& data, const ClusterState& state,
                        const PenaltyParams& params) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const Vec& mu = state.centers[static_cast<std::size_t>(state.assignment[i])];
    if (mu.size() != data.p) throw std::invalid_argument("objective: dimension mismatch");
    for (std::size_t m = 0; m < data.p; ++m) {
      const double diff = data(i, m) - mu[m];
      loss += diff * diff;
    }
  }
  if (params.lambda > 0.0) {
    const std::size_t K = state.k();
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = k + 1; l < K; ++l) {
        const double d = pairwise_distance(state.centers[k], state.centers[l]);
        loss += params.lambda * static_cast<double>(state.sizes[k]) *
                static_cast<double>(state.sizes[l]) * rho(d, params);
      }
  }
  return loss;
}

/// Distance of each object to its nearest other object.
inline std::vector<double> nearest_neighbor_distances(const DataMatrix& data) {
  std::vector<double> nn(data.n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t j = i + 1; j < data.n; ++j) {
      const double d = pairwise_distance(data.row(i), data.row(j));
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  return nn;
}

/// beta-quantile of the nearest neighbor distances: the ceil(beta*n)-th
/// order statistic, no interpolation.
inline double nn_quantile(const DataMatrix& data, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("nn_quantile: beta must be in (0,1)");
  std::vector<double> nn = nearest_neighbor_distances(data);
  std::sort(nn.begin(), nn.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(beta * static_cast<double>(data.n)));
  return nn[idx - 1];
}

inline double max_pairwise_distance(const DataMatrix& data) {
  if (data.n < 2) throw std::invalid_argument("max_pairwise_distance: need n >= 2");
  double best = 0.0;
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t j = i + 1; j < data.n; ++j)
      best = std::max(best, pairwise_distance(data.row(i), data.row(j)));
  return best;
}

/// Unbiased (n-1) per-column sample standard deviations.
inline std::vector<double> column_sd(const DataMatrix& data) {
  std::vector<double> sd(data.p, 0.0);
  for (std::size_t m = 0; m < data.p; ++m) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) mean += data(i, m);
    mean /= static_cast<double>(data.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      const double diff = data(i, m) - mean;
      ss += diff * diff;
    }
    sd[m] = std::sqrt(ss / static_cast<double>(data.n - 1));
  }
  return sd;
}

/// xi = (1e-4 / sqrt(p)) * sum_m sd_m
inline ScaleThreshold merge_threshold(const DataMatrix& data) {
  const std::vector<double> sd = column_sd(data);
  double total = 0.0;
  for (double s : sd) total += s;
  return ScaleThreshold{1e-4 / std::sqrt(static_cast<double>(data.p)) * total};
}

}  // namespace spc
