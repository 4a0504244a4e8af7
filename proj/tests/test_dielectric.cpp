#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

AngularFrequency ev(double e) { return ev_to_angular_frequency(e); }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("casimir_dielectric_" + name);
  std::ofstream(path) << text;
  return path;
}

std::string load_error(const std::string& text) {
  try {
    load_optical_table(write_temp("bad.csv", text));
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("Drude and plasma permittivity at imaginary frequency") {
  const PlasmaParams plasma = gold_plasma();
  CHECK(eps_imag_axis(plasma, plasma.omega_p) == doctest::Approx(2.0).epsilon(1e-14));

  // 1 + 56.8516 / (0.16243 * 0.21343) and 1 + 56.8516 / 0.16243^2 by hand
  CHECK(eps_imag_axis(gold_drude(), ev(0.16243)) == doctest::Approx(1640.9).epsilon(1e-4));
  CHECK(eps_imag_axis(plasma, ev(0.16243)) == doctest::Approx(2155.8).epsilon(1e-4));
}

TEST_CASE("permittivity decreases along the imaginary axis") {
  for (const DielectricModel m : {DielectricModel{gold_drude()}, DielectricModel{gold_plasma()}}) {
    double prev = INFINITY;
    for (double x = 1e-4; x < 1e3; x *= 1.7) {
      const double e = eps_imag_axis(m, ev(x));
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("Drude approaches plasma far above gamma") {
  const auto gamma = gold_drude().gamma.value;
  for (double x : {20.0, 100.0, 1000.0}) {
    const double xi = ev(x).value;
    const double rel = std::abs(eps_imag_axis(gold_drude(), ev(x)) / eps_imag_axis(gold_plasma(), ev(x)) - 1.0);
    CHECK(rel < gamma / xi);
  }
}

TEST_CASE("non-positive imaginary frequency is outside the interface") {
  CHECK_THROWS_AS(eps_imag_axis(gold_drude(), AngularFrequency{0.0}), DomainError);
  CHECK_THROWS_AS(eps_imag_axis(gold_drude(), AngularFrequency{-1.0}), DomainError);
}

TEST_CASE("optical table loading") {
  const auto t = load_optical_table(write_temp("two.csv", "photon_energy_ev,eps_imag\n1.0,5.0\n2.0,3.0\n"));
  REQUIRE(t.rows().size() == 2);
  CHECK(t.rows()[0].omega.value == doctest::Approx(1.519267e15).epsilon(1e-6));
  CHECK(t.rows()[1].omega.value == doctest::Approx(3.038534e15).epsilon(1e-6));
  CHECK(t.rows()[1].eps_imag == 3.0);

  CHECK(load_error("").find("empty") != std::string::npos);
  CHECK(load_error("photon_energy_ev,eps_imag\n1,1\n3,1\n2,1\n").find("row 4") != std::string::npos);
  CHECK(load_error("photon_energy_ev,eps_imag\n1,1\n2,-1\n").find("row 3") != std::string::npos);
  CHECK(load_error("photon_energy_ev\n1\n2\n").find("eps_imag") != std::string::npos);
  CHECK(load_error("photon_energy_ev,eps_imag\n1,1\n2,abc\n").find("row 3") != std::string::npos);
  CHECK(load_error("photon_energy_ev,eps_imag\n1,1\n").find("at least 2 rows") != std::string::npos);
}

TEST_CASE("Kramers-Kronig transform reproduces a Lorentz oscillator") {
  // eps''(w) = A g0 w / ((w0^2 - w^2)^2 + g0^2 w^2)  <->  eps(i xi) = 1 + A / (w0^2 + xi^2 + g0 xi)
  const double w0 = 1e15, g0 = 1e14, A = 4.0 * w0 * w0;
  std::vector<OpticalRow> rows;
  const int n = 6000;
  for (int i = 0; i < n; ++i) {
    const double w = w0 * std::pow(10.0, -4.0 + 8.0 * i / (n - 1));
    const double den = (w0 * w0 - w * w) * (w0 * w0 - w * w) + g0 * g0 * w * w;
    rows.push_back({AngularFrequency{w}, A * g0 * w / den});
  }
  const TabulatedModel model{make_optical_table(rows), NoExtrapolation{}, 3.0};
  for (double r = 0.01; r <= 100.0; r *= 1.25) {
    const double xi = r * w0;
    const double exact = 1.0 + A / (w0 * w0 + xi * xi + g0 * xi);
    CHECK(eps_imag_axis(model, AngularFrequency{xi}) == doctest::Approx(exact).epsilon(5e-3));
  }
}

TEST_CASE("a narrow table with Drude extrapolation degenerates to Drude") {
  const DrudeParams drude = gold_drude();
  const auto eps2 = [&](double w) {
    const double wp = drude.omega_p.value, g = drude.gamma.value;
    return wp * wp * g / (w * (w * w + g * g));
  };
  const double w1 = ev(10.0).value, w2 = ev(10.001).value;
  const TabulatedModel model{make_optical_table({{AngularFrequency{w1}, eps2(w1)}, {AngularFrequency{w2}, eps2(w2)}}),
                             drude, 3.0};
  for (double x : {0.001, 0.05, 0.5, 3.0, 30.0}) {
    CHECK(eps_imag_axis(model, ev(x)) == doctest::Approx(eps_imag_axis(drude, ev(x))).epsilon(1e-5));
  }
  CHECK(static_response(model) == StaticResponse::Dissipative);
}

TEST_CASE("static response tags") {
  CHECK(static_response(gold_drude()) == StaticResponse::Dissipative);
  CHECK(static_response(gold_plasma()) == StaticResponse::Plasma);
  CHECK(static_plasma_frequency(gold_plasma()) == gold_plasma().omega_p);
  CHECK(static_response(ConstantModel{3.0}) == StaticResponse::Dielectric);
  CHECK(static_permittivity(ConstantModel{3.0}) == 3.0);
  CHECK(eps_imag_axis(ConstantModel{3.0}, ev(1.0)) == 3.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(validate(DrudeParams{AngularFrequency{-1.0}, AngularFrequency{1.0}}), ValidationError);
  CHECK_THROWS_AS(validate(ConstantModel{0.5}), ValidationError);
  const auto table = make_optical_table({{ev(1.0), 1.0}, {ev(2.0), 1.0}});
  CHECK_THROWS_AS(validate(TabulatedModel{table, NoExtrapolation{}, 0.5}), ValidationError);
  CHECK_THROWS_AS(make_optical_table({{ev(2.0), 1.0}, {ev(1.0), 1.0}}), ValidationError);
  CHECK_FALSE(describe(gold_drude()).empty());
}
