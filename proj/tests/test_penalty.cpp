#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "spc/penalty.hpp"
#include "spc/rng.hpp"

using namespace spc;

namespace {

// quadrature of the defining integrand (1 - x/eta)_+ on [0, t]
double rho_by_simpson(double t, double eta, int steps = 20000) {
  auto f = [&](double x) { return std::max(0.0, 1.0 - x / eta); };
  double sum = f(0.0) + f(t);
  for (int i = 1; i < steps; ++i) {
    const double x = t * static_cast<double>(i) / steps;
    sum += (i % 2 ? 4.0 : 2.0) * f(x);
  }
  return sum * t / (3.0 * steps);
}

}  // namespace

TEST_CASE("rho") {
  const PenaltyParams p11 = make_penalty_params(1.0, 1.0);
  REQUIRE(rho(0.0, p11) == 0.0);
  REQUIRE(rho(2.0, p11) == 0.5);  // saturated at eta/2
  REQUIRE(rho(0.5, p11) == Catch::Approx(0.375));
  REQUIRE(rho(0.5, p11) == Catch::Approx(rho_by_simpson(0.5, 1.0)).margin(1e-8));
  REQUIRE_THROWS_AS(rho(-0.1, p11), std::invalid_argument);

  SECTION("matches quadrature at random points") {
    SplitMix64 rng(1);
    for (int t = 0; t < 30; ++t) {
      const double lambda = rng.uniform(0.2, 3.0);
      const double delta = rng.uniform(0.2, 3.0);
      const PenaltyParams params = make_penalty_params(lambda, delta);
      const double x = rng.uniform(0.0, 2.0 * params.threshold());
      REQUIRE(rho(x, params) ==
              Catch::Approx(rho_by_simpson(x, params.threshold())).margin(1e-8));
    }
  }

  SECTION("concave and dominated by min(t, eta/2)") {
    SplitMix64 rng(2);
    const PenaltyParams params = make_penalty_params(1.3, 0.8);
    for (int t = 0; t < 200; ++t) {
      const double t1 = rng.uniform(0.0, 3.0);
      const double t2 = t1 + rng.uniform(0.0, 3.0);
      const double th = rng.uniform(0.0, 1.0);
      const double mid = th * t1 + (1.0 - th) * t2;
      REQUIRE(rho(mid, params) >=
              th * rho(t1, params) + (1.0 - th) * rho(t2, params) - 1e-12);
      REQUIRE(rho(mid, params) <= std::min(mid, params.threshold() / 2.0) + 1e-15);
    }
  }

  SECTION("l1 limit as delta grows") {
    const PenaltyParams params = make_penalty_params(1.0, 1e9);
    for (double t : {0.01, 0.3, 1.0})
      REQUIRE(std::abs(rho(t, params) - t) < 1e-6);
  }
}

TEST_CASE("rho_prime") {
  const PenaltyParams p11 = make_penalty_params(1.0, 1.0);
  REQUIRE(rho_prime(0.0, p11) == 1.0);
  REQUIRE(rho_prime(1.0, p11) == 0.0);  // right derivative at the kink
  REQUIRE(rho_prime(5.0, p11) == 0.0);
  REQUIRE(rho_prime(0.5, make_penalty_params(2.0, 0.5)) == Catch::Approx(0.5));
  REQUIRE_THROWS_AS(rho_prime(-1.0, p11), std::invalid_argument);

  SECTION("finite differences of rho away from the kink") {
    SplitMix64 rng(3);
    const PenaltyParams params = make_penalty_params(0.9, 1.7);
    const double eta = params.threshold();
    for (int t = 0; t < 100; ++t) {
      double x = rng.uniform(0.01, 2.0 * eta);
      if (std::abs(x - eta) < 1e-3) continue;
      const double h = 1e-7;
      const double fd = (rho(x + h, params) - rho(x - h, params)) / (2.0 * h);
      REQUIRE(rho_prime(x, params) == Catch::Approx(fd).margin(1e-6));
    }
  }
}

TEST_CASE("weight") {
  const PenaltyParams p = make_penalty_params(1.0, 2.0);  // eta = 2
  const std::vector<double> a{0.0, 0.0};

  SECTION("hinge kills far pairs") {
    const std::vector<double> far{2.0, 0.0};
    REQUIRE(weight(a, far, 5, p) == 0.0);
  }
  SECTION("hand value") {
    const std::vector<double> b{1.0, 0.0};
    REQUIRE(weight(a, b, 1, p) == Catch::Approx(0.25));  // (1 - 1/2) / 2
  }
  SECTION("linear in the neighbor size") {
    const std::vector<double> b{0.7, 0.4};
    REQUIRE(weight(a, b, 4, p) == Catch::Approx(4.0 * weight(a, b, 1, p)));
  }
  SECTION("zero distance refused") {
    REQUIRE_THROWS_AS(weight(a, a, 1, p), std::invalid_argument);
  }
}

TEST_CASE("max_penalty") {
  REQUIRE(max_penalty(make_penalty_params(1.0, 1.0)) == 0.5);
  REQUIRE(max_penalty(make_penalty_params(2.0, 0.5)) == 1.0);
  // consistency with saturation: z = lambda * rho(t) for any t >= eta
  const PenaltyParams p = make_penalty_params(1.7, 0.9);
  REQUIRE(max_penalty(p) == Catch::Approx(p.lambda * rho(p.threshold() + 1.0, p)));
}

TEST_CASE("parameter validation") {
  REQUIRE_THROWS_AS(make_penalty_params(-1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_penalty_params(1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_penalty_params(1.0, -2.0), std::invalid_argument);
  REQUIRE_NOTHROW(make_penalty_params(0.0, 1.0));  // k-means limit
}
