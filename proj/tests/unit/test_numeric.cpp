#include <doctest.h>

#include <cmath>

#include "losslab/numeric.hpp"
#include "losslab/rng.hpp"

using losslab::clamp_prob;
using losslab::safe_neg_log;
using losslab::sigmoid;
using losslab::sigmoid_derivative;

TEST_CASE("sigmoid values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(2.0) == doctest::Approx(0.8807970779778824).epsilon(1e-14));
  // Large negative logits stay strictly positive, no underflow to 0.
  const double tiny = sigmoid(-40.0);
  CHECK(tiny > 0.0);
  CHECK(tiny < 1e-17);
  CHECK(tiny == doctest::Approx(4.248354255291589e-18).epsilon(1e-13));
}

TEST_CASE("sigmoid is strictly increasing on a random grid") {
  losslab::Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const double z1 = rng.uniform(-30.0, 30.0);
    const double z2 = z1 + rng.uniform(1e-9, 5.0);
    CHECK(sigmoid(z1) < sigmoid(z2));
  }
}

TEST_CASE("sigmoid symmetry: s(z) + s(-z) == 1") {
  for (int i = 0; i <= 600; ++i) {
    const double z = -30.0 + 60.0 * i / 600.0;
    CHECK(std::abs(sigmoid(z) + sigmoid(-z) - 1.0) <= 1e-15);
  }
}

TEST_CASE("sigmoid derivative p(1-p) against central differences") {
  // At |z| near 10 the finite difference itself carries ~2e-6 relative noise
  // (the two evaluations agree to ~9e-11 while each is only good to ~2e-16),
  // so the h = 1e-6 sweep gets a 1e-5 gate and a coarser h tightens to 1e-6.
  auto sweep = [](double h, double tol) {
    for (int i = 0; i <= 200; ++i) {
      const double z = -10.0 + 20.0 * i / 200.0;
      const double p = sigmoid(z);
      const double analytic = sigmoid_derivative(p);
      const double fd = (sigmoid(z + h) - sigmoid(z - h)) / (2.0 * h);
      CHECK(std::abs(fd - analytic) / std::max(std::abs(analytic), std::abs(fd)) <= tol);
    }
  };
  sweep(1e-6, 1e-5);
  sweep(1e-5, 1e-6);
}

TEST_CASE("clamp_prob") {
  CHECK(clamp_prob(0.0, 1e-12) == 1e-12);
  CHECK(clamp_prob(0.5, 1e-12) == 0.5);
  CHECK(clamp_prob(1.0, 1e-12) == 1.0 - 1e-12);
  CHECK_THROWS_WITH_AS(clamp_prob(std::nan("")), doctest::Contains("invalid probability"),
                       std::invalid_argument);
  CHECK_THROWS_AS(clamp_prob(0.5, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(clamp_prob(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("safe_neg_log") {
  CHECK(safe_neg_log(0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(safe_neg_log(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  // -ln(1 - x) ~ x for small x; the input representation limits accuracy here.
  CHECK(safe_neg_log(1.0 - 1e-12) == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK_THROWS_WITH_AS(safe_neg_log(0.0), doctest::Contains("log singularity"),
                       std::domain_error);
}

TEST_CASE("safe_neg_log is non-negative over clamped probabilities") {
  losslab::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double p = clamp_prob(rng.uniform(-0.5, 1.5));
    CHECK(safe_neg_log(p) >= 0.0);
  }
}
