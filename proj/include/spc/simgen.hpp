#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spc/core.hpp"
#include "spc/evaluation.hpp"
#include "spc/rng.hpp"

namespace spc {

/// Synthetic scenario: k spherical (or feature-correlated) Gaussian clusters
/// with centers uniform on [-5,5]^p, plus uniform noise points rejected into
/// the region outside every cluster's radius.
struct ScenarioSpec {
  int n_clustered = 400;
  int p = 20;
  int k = 10;
  int noise_count = 0;
  bool overlap = false;
  bool correlated = false;
  double cluster_sd = 0.5;
  std::uint64_t seed = 1;
};

struct GeneratedData {
  DataMatrix data;
  LabeledPartition truth;  // labels 1..k, noise 0
};

namespace detail {

inline std::vector<Vec> draw_members(SplitMix64& rng, const Vec& center, int count,
                                     double sd, double corr) {
  std::vector<Vec> out(static_cast<std::size_t>(count), Vec(center.size()));
  for (auto& x : out) {
    // equicorrelated Gaussian via a single shared factor
    const double g = corr > 0.0 ? rng.normal() : 0.0;
    const double a = std::sqrt(corr);
    const double b = std::sqrt(1.0 - corr);
    for (std::size_t m = 0; m < center.size(); ++m)
      x[m] = center[m] + sd * (a * g + b * rng.normal());
  }
  return out;
}

inline double radius_of(const std::vector<Vec>& members, const Vec& center) {
  double r = 0.0;
  for (const Vec& x : members) r = std::max(r, pairwise_distance(x, center));
  return r;
}

// fraction of the two clusters' points lying within both radii
inline double overlap_fraction(const std::vector<Vec>& ma, const std::vector<Vec>& mb,
                               const Vec& ca, const Vec& cb, double ra, double rb) {
  std::size_t hits = 0;
  for (const std::vector<Vec>* side : {&ma, &mb})
    for (const Vec& x : *side)
      if (pairwise_distance(x, ca) <= ra && pairwise_distance(x, cb) <= rb) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ma.size() + mb.size());
}

}  // namespace detail

inline GeneratedData generate(const ScenarioSpec& spec) {
  if (spec.p < 1 || spec.k < 1 || spec.n_clustered < spec.k || spec.noise_count < 0)
    throw std::invalid_argument("generate: invalid scenario dimensions");
  if (spec.overlap && spec.k < 2)
    throw std::invalid_argument("generate: overlap needs k >= 2");
  if (!(spec.cluster_sd > 0.0))
    throw std::invalid_argument("generate: cluster_sd must be positive");

  SplitMix64 rng(spec.seed);
  const std::size_t p = static_cast<std::size_t>(spec.p);

  std::vector<Vec> centers(static_cast<std::size_t>(spec.k), Vec(p));
  for (auto& c : centers)
    for (double& v : c) v = rng.uniform(-5.0, 5.0);

  std::vector<int> sizes(static_cast<std::size_t>(spec.k), spec.n_clustered / spec.k);
  for (int r = 0; r < spec.n_clustered % spec.k; ++r) ++sizes[static_cast<std::size_t>(r)];

  const auto corr_of = [&](std::size_t j) {
    if (!spec.correlated) return 0.0;
    return j == 0 ? 0.5 : 0.9;  // one looser cluster, the rest tightly correlated
  };

  std::vector<std::vector<Vec>> members(static_cast<std::size_t>(spec.k));
  std::vector<bool> done(static_cast<std::size_t>(spec.k), false);

  if (spec.overlap) {
    // pull the second center of each pair toward the first until 15-20% of
    // the pair's points fall inside both radii; bisection on the distance
    // scale with members resampled per try
    for (std::size_t a = 0; a + 1 < static_cast<std::size_t>(spec.k); a += 2) {
      const std::size_t b = a + 1;
      const Vec dir_base = centers[b];
      double t_lo = 0.0, t_hi = 1.0, t = 0.5;
      bool ok = false;
      for (int tries = 0; tries < 200; ++tries) {
        for (std::size_t m = 0; m < p; ++m)
          centers[b][m] = centers[a][m] + t * (dir_base[m] - centers[a][m]);
        members[a] = detail::draw_members(rng, centers[a], sizes[a], spec.cluster_sd, corr_of(a));
        members[b] = detail::draw_members(rng, centers[b], sizes[b], spec.cluster_sd, corr_of(b));
        const double ra = detail::radius_of(members[a], centers[a]);
        const double rb = detail::radius_of(members[b], centers[b]);
        const double f = detail::overlap_fraction(members[a], members[b], centers[a],
                                                  centers[b], ra, rb);
        if (f >= 0.15 && f <= 0.20) {
          ok = true;
          break;
        }
        (f < 0.15 ? t_hi : t_lo) = t;
        t = 0.5 * (t_lo + t_hi);
      }
      if (!ok)
        throw std::runtime_error(
            "generate: could not reach 15-20% overlap; adjust cluster_sd or sizes");
      done[a] = done[b] = true;
    }
  }
  for (std::size_t j = 0; j < static_cast<std::size_t>(spec.k); ++j)
    if (!done[j])
      members[j] = detail::draw_members(rng, centers[j], sizes[j], spec.cluster_sd, corr_of(j));

  std::vector<double> radii(static_cast<std::size_t>(spec.k));
  for (std::size_t j = 0; j < radii.size(); ++j)
    radii[j] = detail::radius_of(members[j], centers[j]);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(spec.n_clustered + spec.noise_count) * p);
  std::vector<int> labels;
  for (std::size_t j = 0; j < members.size(); ++j)
    for (const Vec& x : members[j]) {
      values.insert(values.end(), x.begin(), x.end());
      labels.push_back(static_cast<int>(j) + 1);
    }

  Vec candidate(p);
  long budget = 10000L * (spec.noise_count + 1);
  for (int drawn = 0; drawn < spec.noise_count;) {
    if (--budget < 0)
      throw std::runtime_error(
          "generate: noise rejection budget exceeded; reduce noise_count or cluster_sd");
    for (double& v : candidate) v = rng.uniform(-5.0, 5.0);
    bool outside = true;
    for (std::size_t j = 0; j < radii.size(); ++j)
      if (pairwise_distance(candidate, centers[j]) <= radii[j]) {
        outside = false;
        break;
      }
    if (!outside) continue;
    values.insert(values.end(), candidate.begin(), candidate.end());
    labels.push_back(0);
    ++drawn;
  }

  GeneratedData out{make_data(labels.size(), p, std::move(values)),
                    LabeledPartition{std::move(labels), 0}};
  return out;
}

}  // namespace spc
