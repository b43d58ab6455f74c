#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spc/rng.hpp"
#include "spc/scheduler.hpp"
#include "spc/splitting.hpp"

using namespace spc;

namespace {

DataMatrix from_rows(const std::vector<Vec>& rows) {
  std::vector<double> values;
  for (const Vec& r : rows) values.insert(values.end(), r.begin(), r.end());
  return make_data(rows.size(), rows[0].size(), std::move(values));
}

// the majorized single-object objective the split step minimizes:
// ||y - t||^2 + lambda * sum_{l != k} w_l (t - mu_l)^2 + lambda*N_k*|t - mu_k|
double surrogate(double t, double y, std::size_t k, const ClusterState& s,
                 const PenaltyParams& params) {
  double v = (y - t) * (y - t) +
             params.lambda * s.sizes[k] * std::abs(t - s.centers[k][0]);
  for (std::size_t l = 0; l < s.k(); ++l) {
    if (l == k) continue;
    const double w = weight(s.centers[k], s.centers[l], s.sizes[l], params);
    v += params.lambda * w * (t - s.centers[l][0]) * (t - s.centers[l][0]);
  }
  return v;
}

// full single-object loss with everything else fixed (Eq. 1 restricted)
double restricted_loss(double t, double y, const ClusterState& s,
                       const PenaltyParams& params) {
  double v = (y - t) * (y - t);
  for (std::size_t l = 0; l < s.k(); ++l)
    v += params.lambda * s.sizes[l] * rho(std::abs(t - s.centers[l][0]), params);
  return v;
}

struct Instance {
  DataMatrix data;
  ClusterState state;
  PenaltyParams params;
};

// 1-D: object 0 fused to cluster 0 (center mu0, size >= 2), one or two other
// clusters around
Instance random_instance(SplitMix64& rng) {
  const double mu0 = rng.uniform(-2.0, 2.0);
  const double y = mu0 + rng.uniform(-2.0, 2.0);
  const int extra = 1 + static_cast<int>(rng.next_u64() % 2);
  std::vector<Vec> rows{{y}};
  ClusterState s;
  s.centers.push_back(Vec{mu0});
  s.sizes.push_back(2 + static_cast<int>(rng.next_u64() % 4));
  s.assignment.push_back(0);
  // filler members so the data matrix is consistent enough for the step
  for (int i = 1; i < s.sizes[0]; ++i) {
    rows.push_back(Vec{mu0});
    s.assignment.push_back(0);
  }
  for (int e = 0; e < extra; ++e) {
    const double mu = rng.uniform(-6.0, 6.0);
    const int n = 1 + static_cast<int>(rng.next_u64() % 7);
    s.centers.push_back(Vec{mu});
    s.sizes.push_back(n);
    for (int i = 0; i < n; ++i) {
      rows.push_back(Vec{mu});
      s.assignment.push_back(1 + e);
    }
  }
  Instance inst{from_rows(rows), std::move(s),
                make_penalty_params(rng.uniform(0.05, 1.5), rng.uniform(0.3, 4.0))};
  return inst;
}

}  // namespace

TEST_CASE("split_step stays put when the threshold dominates") {
  // far other cluster (zero weight), strong own-cluster pull
  const DataMatrix data = from_rows({{0.2}, {0.0}, {0.0}, {9.0}});
  ClusterState s;
  s.centers = {Vec{0.0}, Vec{9.0}};
  s.assignment = {0, 0, 0, 1};
  s.sizes = {3, 1};
  // gamma = lambda*3/2 = 1.5 > |beta_hat| = 0.2
  const SplitOutcome out = split_step(0, s, data, make_penalty_params(1.0, 1.0));
  REQUIRE(!out.moved);
  REQUIRE(out.new_theta == s.centers[0]);
}

TEST_CASE("split_step unfuses toward the observation as lambda vanishes") {
  const DataMatrix data = from_rows({{1.0}, {0.0}, {0.0}, {9.0}});
  ClusterState s;
  s.centers = {Vec{0.0}, Vec{9.0}};
  s.assignment = {0, 0, 0, 1};
  s.sizes = {3, 1};
  const SplitOutcome out = split_step(0, s, data, make_penalty_params(1e-9, 1.0));
  REQUIRE(out.moved);
  REQUIRE(out.new_theta[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("split_step minimizes its majorized objective exactly (1-D grid oracle)") {
  SplitMix64 rng(83);
  int moved_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng);
    const SplitOutcome out = split_step(0, inst.state, inst.data, inst.params);
    if (out.moved) ++moved_count;
    const double y = inst.data(0, 0);
    const double theta = out.new_theta[0];
    double lo = y, hi = y;
    for (const Vec& c : inst.state.centers) {
      lo = std::min(lo, c[0]);
      hi = std::max(hi, c[0]);
    }
    lo -= 1.0;
    hi += 1.0;
    double best = std::numeric_limits<double>::infinity();
    const int steps = 200000;
    for (int i = 0; i <= steps; ++i) {
      const double t = lo + (hi - lo) * i / steps;
      best = std::min(best, surrogate(t, y, 0, inst.state, inst.params));
    }
    REQUIRE(surrogate(theta, y, 0, inst.state, inst.params) <= best + 1e-6);
  }
  REQUIRE(moved_count > 10);  // the instance mix must exercise both branches
  REQUIRE(moved_count < 100);
}

TEST_CASE("split_step never increases the restricted loss (1-D)") {
  SplitMix64 rng(89);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = random_instance(rng);
    const SplitOutcome out = split_step(0, inst.state, inst.data, inst.params);
    const double y = inst.data(0, 0);
    const double before =
        restricted_loss(inst.state.centers[0][0], y, inst.state, inst.params);
    const double after = restricted_loss(out.new_theta[0], y, inst.state, inst.params);
    REQUIRE(after <= before + 1e-6);
  }
}

TEST_CASE("split_pass unfuses movers into singletons") {
  const DataMatrix data = from_rows({{1.5}, {0.0}, {0.1}, {9.0}});
  ClusterState s;
  s.centers = {Vec{0.0}, Vec{9.0}};
  s.assignment = {0, 0, 0, 1};
  s.sizes = {3, 1};
  const PenaltyParams params = make_penalty_params(0.05, 1.0);
  const int moved = split_pass(s, data, params);
  REQUIRE(moved >= 1);
  REQUIRE(s.k() >= 3);
  int total = 0;
  for (int v : s.sizes) total += v;
  REQUIRE(total == 4);
  // object 0 now alone at its split position
  const std::size_t k0 = static_cast<std::size_t>(s.assignment[0]);
  REQUIRE(s.sizes[k0] == 1);
}

TEST_CASE("path with splits disabled is bit-identical to the default path") {
  SplitMix64 rng(97);
  std::vector<double> v;
  for (int i = 0; i < 10; ++i) v.push_back(0.1 * rng.normal());
  for (int i = 0; i < 10; ++i) v.push_back(5.0 + 0.1 * rng.normal());
  const DataMatrix data = make_data(20, 1, std::move(v));
  const PathConfig config = PathConfig::defaults(0.4, 1);
  PathOptions off;
  off.allow_splits = false;
  const SolutionPath a = run_path(data, config);
  const SolutionPath b = run_path(data, config, off);
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) {
    REQUIRE(a.solutions[i].state.centers == b.solutions[i].state.centers);
    REQUIRE(a.solutions[i].state.assignment == b.solutions[i].state.assignment);
    REQUIRE(a.solutions[i].report.final_objective == b.solutions[i].report.final_objective);
  }
}

TEST_CASE("path with splits enabled still terminates") {
  SplitMix64 rng(101);
  std::vector<double> v;
  for (int i = 0; i < 8; ++i) v.push_back(0.3 * rng.normal());
  for (int i = 0; i < 8; ++i) v.push_back(4.0 + 0.3 * rng.normal());
  const DataMatrix data = make_data(16, 1, std::move(v));
  PathOptions opts;
  opts.allow_splits = true;
  const SolutionPath path = run_path(data, PathConfig::defaults(0.4, 1), opts);
  REQUIRE(path.solutions.back().k_total == 1);
}
