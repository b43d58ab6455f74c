#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spc/core.hpp"
#include "spc/scheduler.hpp"

namespace spc {

/// Unpenalized Gaussian mixture log-likelihood with identity covariances,
/// component weights N_k / n, evaluated with log-sum-exp.
inline double log_likelihood(const DataMatrix& data, const ClusterState& state) {
  const double n = static_cast<double>(data.n);
  const double log_norm =
      -0.5 * static_cast<double>(data.p) * std::log(2.0 * std::numbers::pi);
  std::vector<double> log_pi(state.k());
  for (std::size_t k = 0; k < state.k(); ++k)
    log_pi[k] = std::log(static_cast<double>(state.sizes[k]) / n);
  double total = 0.0;
  std::vector<double> terms(state.k());
  for (std::size_t i = 0; i < data.n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < state.k(); ++k) {
      double d2 = 0.0;
      for (std::size_t m = 0; m < data.p; ++m) {
        const double diff = data(i, m) - state.centers[k][m];
        d2 += diff * diff;
      }
      terms[k] = log_pi[k] + log_norm - 0.5 * d2;
      best = std::max(best, terms[k]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    total += best + std::log(s);
  }
  return total;
}

struct RatioRecord {
  int k_low = 0;
  int k_high = 0;
  double dr = 0.0;
};

struct SelectionResult {
  std::size_t chosen_index = 0;  // into the deduplicated, K-ascending list
  int k_star = 0;
  std::vector<RatioRecord> ratios;
  std::size_t chosen_id = 0;  // caller-supplied id of the chosen entry
};

struct KLEntry {
  int k_total = 0;
  double log_lik = 0.0;
  std::size_t id = 0;
};

/// Difference-ratio selection over (K, L) summaries. Entries sharing a K are
/// collapsed to the highest-likelihood representative, the rest sorted by
/// ascending K; dr^(s,s+1) = (L_{s+1} - L_s) / (K_{s+1} - K_s). The chosen
/// K* is the largest K whose formation is still justified, i.e. the largest
/// K^(s+1) with dr^(s,s+1) >= a * max dr. If no ratio qualifies (the
/// likelihood never rises with K) the smallest K wins.
inline SelectionResult select_entries(std::vector<KLEntry> entries, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("select: a must be positive");
  std::sort(entries.begin(), entries.end(), [](const KLEntry& x, const KLEntry& y) {
    if (x.k_total != y.k_total) return x.k_total < y.k_total;
    return x.log_lik > y.log_lik;
  });
  std::vector<KLEntry> uniq;
  for (const KLEntry& e : entries)
    if (uniq.empty() || uniq.back().k_total != e.k_total) uniq.push_back(e);
  if (uniq.size() < 2)
    throw std::invalid_argument("select: need at least 2 distinct K values");

  SelectionResult result;
  double max_dr = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < uniq.size(); ++s) {
    const double dr = (uniq[s + 1].log_lik - uniq[s].log_lik) /
                      static_cast<double>(uniq[s + 1].k_total - uniq[s].k_total);
    result.ratios.push_back({uniq[s].k_total, uniq[s + 1].k_total, dr});
    max_dr = std::max(max_dr, dr);
  }
  std::size_t chosen = 0;
  for (std::size_t s = 0; s + 1 < uniq.size(); ++s)
    if (result.ratios[s].dr >= a * max_dr) chosen = s + 1;
  result.chosen_index = chosen;
  result.k_star = uniq[chosen].k_total;
  result.chosen_id = uniq[chosen].id;
  return result;
}

/// Selection over a solution path: deduplicate, compute per-solution
/// likelihoods, apply select_entries. chosen_id is the index into
/// path.solutions.
inline SelectionResult select(const SolutionPath& path, const DataMatrix& data,
                              double a = 0.05) {
  std::vector<KLEntry> entries;
  for (std::size_t idx : path.deduplicated())
    entries.push_back({path.solutions[idx].k_total,
                       log_likelihood(data, path.solutions[idx].state), idx});
  return select_entries(std::move(entries), a);
}

}  // namespace spc
