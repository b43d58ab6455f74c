#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "spc/core.hpp"

namespace spc {

/// Cluster labels for all n objects with one distinguished noise id.
struct LabeledPartition {
  std::vector<int> labels;
  int noise_label = 0;

  bool is_noise(std::size_t i) const { return labels[i] == noise_label; }
};

/// Cross-tabulation of estimated (rows) vs true (columns) labels. The last
/// row and the last column hold the noise counts.
struct ContingencyTable {
  std::size_t rows = 0;  // K + 1
  std::size_t cols = 0;  // R + 1
  std::vector<std::int64_t> counts;

  std::int64_t& at(std::size_t i, std::size_t j) { return counts[i * cols + j]; }
  std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

inline ContingencyTable contingency(const LabeledPartition& estimated,
                                    const LabeledPartition& truth) {
  if (estimated.labels.size() != truth.labels.size())
    throw std::invalid_argument("contingency: partition lengths differ");
  std::map<int, std::size_t> emap, tmap;
  for (std::size_t i = 0; i < estimated.labels.size(); ++i) {
    if (!estimated.is_noise(i)) emap.emplace(estimated.labels[i], 0);
    if (!truth.is_noise(i)) tmap.emplace(truth.labels[i], 0);
  }
  std::size_t idx = 0;
  for (auto& kv : emap) kv.second = idx++;
  idx = 0;
  for (auto& kv : tmap) kv.second = idx++;
  ContingencyTable t;
  t.rows = emap.size() + 1;
  t.cols = tmap.size() + 1;
  t.counts.assign(t.rows * t.cols, 0);
  for (std::size_t i = 0; i < estimated.labels.size(); ++i) {
    const std::size_t r = estimated.is_noise(i) ? t.rows - 1 : emap[estimated.labels[i]];
    const std::size_t c = truth.is_noise(i) ? t.cols - 1 : tmap[truth.labels[i]];
    ++t.at(r, c);
  }
  return t;
}

namespace detail {

inline double h2(double k) { return k * (k - 1.0) / 2.0; }

// Adjusted Rand index of an arbitrary contingency table. `degenerate` is
// returned when the denominator vanishes with a vanishing numerator (e.g.
// single cluster vs single cluster); a nonzero numerator over a zero
// denominator cannot occur for valid tables but maps to 0.
inline double ari_from_counts(const std::vector<double>& counts, std::size_t rows,
                              std::size_t cols, double degenerate) {
  std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
  double n = 0.0, sij = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = counts[i * cols + j];
      rs[i] += v;
      cs[j] += v;
      n += v;
      sij += h2(v);
    }
  double sa = 0.0, sb = 0.0;
  for (double v : rs) sa += h2(v);
  for (double v : cs) sb += h2(v);
  const double hn = h2(n);
  const double expected = hn > 0.0 ? sa * sb / hn : 0.0;
  const double num = sij - expected;
  const double den = 0.5 * (sa + sb) - expected;
  if (den == 0.0) return num == 0.0 ? degenerate : 0.0;
  return num / den;
}

}  // namespace detail

/// ARI over the full table, noise rows/columns treated as ordinary blocks.
inline double ari(const ContingencyTable& table) {
  std::vector<double> counts(table.counts.begin(), table.counts.end());
  return detail::ari_from_counts(counts, table.rows, table.cols, 1.0);
}

/// ARI restricted to the estimated non-noise rows (all truth columns kept,
/// margins recomputed on the sub-table). Scores cluster assignment quality.
/// NaN when the estimate contains no clusters at all.
inline double ari_c(const LabeledPartition& estimated, const LabeledPartition& truth) {
  const ContingencyTable t = contingency(estimated, truth);
  const std::size_t K = t.rows - 1;
  if (K == 0) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> counts(K * t.cols);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < t.cols; ++j)
      counts[i * t.cols + j] = static_cast<double>(t.at(i, j));
  return detail::ari_from_counts(counts, K, t.cols, 1.0);
}

/// ARI of the 2x2 clustered/noise collapse with the clustered-called-noise
/// cell forced to zero. 0 when no noise is detected.
inline double ari_n(const LabeledPartition& estimated, const LabeledPartition& truth) {
  const ContingencyTable t = contingency(estimated, truth);
  const std::size_t K = t.rows - 1;
  const std::size_t R = t.cols - 1;
  double ncc = 0.0, nnc = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < R; ++j) ncc += static_cast<double>(t.at(i, j));
  for (std::size_t j = 0; j < R; ++j) nnc += static_cast<double>(t.at(K, j));
  const double nnn = static_cast<double>(t.at(K, R));
  const std::vector<double> counts{ncc, 0.0, nnc, nnn};
  return detail::ari_from_counts(counts, 2, 2, 0.0);
}

/// 1 - (true-clustered objects labeled noise) / n.
inline double s_n(const LabeledPartition& estimated, const LabeledPartition& truth) {
  if (estimated.labels.size() != truth.labels.size())
    throw std::invalid_argument("s_n: partition lengths differ");
  std::size_t nc = 0;
  for (std::size_t i = 0; i < estimated.labels.size(); ++i)
    if (estimated.is_noise(i) && !truth.is_noise(i)) ++nc;
  return 1.0 - static_cast<double>(nc) / static_cast<double>(estimated.labels.size());
}

struct NoiseLabeling {
  LabeledPartition partition;
  int k_clust = 0;
};

/// Relabel clusters of size <= cutoff as noise (label 0); surviving clusters
/// get compact ids 1..k_clust in original index order.
inline NoiseLabeling label_noise(const ClusterState& state, int cutoff = 3) {
  NoiseLabeling out;
  out.partition.noise_label = 0;
  std::vector<int> relabel(state.k(), 0);
  int next = 1;
  for (std::size_t k = 0; k < state.k(); ++k)
    if (state.sizes[k] > cutoff) relabel[k] = next++;
  out.k_clust = next - 1;
  out.partition.labels.resize(state.assignment.size());
  for (std::size_t i = 0; i < state.assignment.size(); ++i)
    out.partition.labels[i] = relabel[static_cast<std::size_t>(state.assignment[i])];
  return out;
}

}  // namespace spc
