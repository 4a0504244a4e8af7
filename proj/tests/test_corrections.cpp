#include <doctest.h>

#include <cmath>

#include "casimir/corrections.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

ForceCurve power_law(double k, int n) {
  return [=](double d) { return k / std::pow(d, n); };
}

}  // namespace

TEST_CASE("power laws get the analytic n(n+1)/2 multiplier") {
  const double K = 3e-27;
  for (int n : {2, 3, 4}) {
    for (double d : {0.7e-6, 2e-6, 7e-6}) {
      const double delta = 40e-9;
      const double x = delta / d;
      const double expected = 1.0 + n * (n + 1) * x * x / 2.0;
      const double ratio = fluctuation_corrected_force(power_law(K, n), d, delta) / power_law(K, n)(d);
      CHECK(std::abs(ratio / expected - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("quoted correction factors") {
  const auto f3 = power_law(1.0, 3);
  CHECK(fluctuation_corrected_force(f3, 0.7e-6, 40e-9) / f3(0.7e-6) == doctest::Approx(1.0196).epsilon(1e-4));
  const auto f2 = power_law(1.0, 2);
  CHECK(fluctuation_corrected_force(f2, 1e-6, 1e-8) / f2(1e-6) == doctest::Approx(1.0003).epsilon(1e-9));
  CHECK(fluctuation_corrected_force(f3, 1e-6, 0.0) == f3(1e-6));
}

TEST_CASE("corrections commute with force scaling") {
  const auto f = power_law(2.0, 3);
  const auto g = power_law(6.0, 3);
  CHECK(fluctuation_corrected_force(g, 1e-6, 40e-9) ==
        doctest::Approx(3.0 * fluctuation_corrected_force(f, 1e-6, 40e-9)).epsilon(1e-10));
}

TEST_CASE("separation correction") {
  CHECK(corrected_separation(1e-6, 0.0) == 1e-6);
  CHECK(corrected_separation(1e-6, 40e-9) == doctest::Approx(1.0016e-6).epsilon(1e-12));
  CHECK(corrected_separation(0.7e-6, 40e-9) / 0.7e-6 == doctest::Approx(1.003265).epsilon(1e-6));
  double prev = 0.0;
  for (double d = 0.3e-6; d < 10e-6; d *= 1.3) {
    const double c = corrected_separation(d, 40e-9);
    CHECK(c > d);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("correction uncertainty") {
  const auto f3 = power_law(1e-27, 3);
  const double d = 0.7e-6, delta = 40e-9, sigma = 20e-9;
  CHECK(correction_uncertainty(f3, d, {delta, 0.0}) == 0.0);
  const double expected = 6.0 * f3(d) * 2.0 * delta * sigma / (d * d);
  CHECK(correction_uncertainty(f3, d, {delta, sigma}) == doctest::Approx(expected).epsilon(1e-6));
  double prev = 0.0;
  for (double x = 5e-6; x >= 0.5e-6; x /= 1.4) {
    const double u = correction_uncertainty(f3, x, {delta, sigma});
    CHECK(u > prev);
    prev = u;
  }
}

TEST_CASE("expansion refuses d <= 5 delta") {
  const auto f = power_law(1.0, 3);
  CHECK_THROWS_AS(fluctuation_corrected_force(f, 200e-9, 40e-9), RegimeError);
  CHECK_THROWS_AS(corrected_separation(100e-9, 40e-9), RegimeError);
  CHECK_THROWS_AS(correction_uncertainty(f, 250e-9, {40e-9, 20e-9}), RegimeError);
  CHECK_THROWS_AS(fluctuation_corrected_force(f, 1e-6, -1e-9), DomainError);
}
