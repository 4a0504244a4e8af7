#include "casimir/lifshitz.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "casimir/diagnostics.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"
#include "quadrature.hpp"

namespace casimir {

namespace {

using constants::c;
using constants::hbar;
using constants::k_B;
using constants::pi;

// Panel boundaries (relative to the lower limit) for the y = 2 kappa_0 d
// integral. Integrands decay like exp(-y); beyond +50 they are below 1e-19 of
// the total.
constexpr std::array<double, 6> kYPanels{0.0, 1.0, 4.0, 12.0, 25.0, 50.0};

// Panel boundaries for the T = 0 frequency integral in t = 2 xi d / c. The
// fine panels near zero resolve the Drude TE turn-on at very small xi.
constexpr std::array<double, 11> kTPanels{0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 4.0, 15.0, 60.0};

// r^2 and 1 - r^2 for r = (a - b)/(a + b), without cancellation.
struct Reflectivity {
  double r2;
  double one_minus_r2;
};

Reflectivity from_ratio(double a, double b) {
  const double s = a + b;
  const double r = (a - b) / s;
  return {r * r, 4.0 * a * b / (s * s)};
}

// TE-type coefficient (y - b)/(y + b) with b = sqrt(y^2 + q2), written as
// -q2 / (y + b)^2 so that it stays accurate when q2 << y^2.
Reflectivity te_reflectivity(double y, double q2) {
  const double b = std::sqrt(y * y + q2);
  const double s = y + b;
  const double r = -q2 / (s * s);
  return {r * r, 4.0 * y * b / (s * s)};
}

// ln(1 - r^2 e^-y)
double log_factor(const Reflectivity& r, double y) {
  const double x = r.r2 * std::exp(-y);
  if (x < 0.5) return std::log1p(-x);
  return std::log(-std::expm1(-y) + std::exp(-y) * r.one_minus_r2);
}

// r^2 e^-y / (1 - r^2 e^-y)
double pressure_factor(const Reflectivity& r, double y) {
  const double e = std::exp(-y);
  return r.r2 * e / (-std::expm1(-y) + e * r.one_minus_r2);
}

using detail::adaptive_integrate;
using detail::Estimate;

// Sum over the fixed y panels; abs_tol is split evenly between them.
template <class F>
Estimate integrate_panels(F f, double lower, double rel_tol, double abs_tol, int nodes) {
  Estimate sum;
  const double per_panel = abs_tol / (kYPanels.size() - 1);
  for (std::size_t i = 0; i + 1 < kYPanels.size(); ++i) {
    sum += adaptive_integrate(f, lower + kYPanels[i], lower + kYPanels[i + 1], rel_tol, per_panel, nodes);
  }
  return sum;
}

// Accumulated quadrature error must stay within rel_tol of the result.
void check_error(const Estimate& e, double rel_tol, const char* what) {
  const double achieved = e.value != 0.0 ? e.error / std::abs(e.value) : e.error;
  if (achieved > 10.0 * rel_tol) {
    std::ostringstream msg;
    msg << what << ": quadrature error estimate " << achieved << " exceeds rel_tol " << rel_tol;
    throw ConvergenceError(msg.str(), achieved);
  }
}

enum class Pol { TE, TM };

// Reflectivity as a function of y for one polarization at one frequency.
// Dimensionless: a_te = y, b = sqrt(y^2 + Q^2) with Q^2 = 4 d^2 (eps-1) xi^2 / c^2.
struct Channel {
  enum class Kind { Zero, Perfect, Constant, Ratio } kind;
  double q2 = 0.0;      // Q^2 for the Ratio kind
  double eps = 1.0;     // TM multiplies y by eps
  Reflectivity fixed{}; // Constant kind
  bool tm = false;

  Reflectivity at(double y) const {
    switch (kind) {
      case Kind::Perfect: return {1.0, 0.0};
      case Kind::Constant: return fixed;
      case Kind::Ratio:
        if (!tm) return te_reflectivity(y, q2);
        return from_ratio(eps * y, std::sqrt(y * y + q2));
      case Kind::Zero: break;
    }
    return {0.0, 1.0};
  }
};

Channel dynamic_channel(Pol p, double xi, double eps, double d) {
  Channel ch;
  ch.kind = Channel::Kind::Ratio;
  const double twodxi = 2.0 * d * xi / c;
  ch.q2 = (eps - 1.0) * twodxi * twodxi;
  ch.eps = eps;
  ch.tm = p == Pol::TM;
  return ch;
}

Channel static_channel(Pol p, const DielectricModel& model, double d) {
  Channel ch;
  switch (static_response(model)) {
    case StaticResponse::Dissipative:
      ch.kind = p == Pol::TE ? Channel::Kind::Zero : Channel::Kind::Perfect;
      break;
    case StaticResponse::Plasma:
      if (p == Pol::TM) {
        ch.kind = Channel::Kind::Perfect;
      } else {
        const double P = 2.0 * d * static_plasma_frequency(model).value / c;
        ch.kind = Channel::Kind::Ratio;
        ch.q2 = P * P;
      }
      break;
    case StaticResponse::Dielectric:
      if (p == Pol::TE) {
        ch.kind = Channel::Kind::Zero;
      } else {
        const double e = static_permittivity(model);
        ch.kind = Channel::Kind::Constant;
        ch.fixed = from_ratio(e, 1.0);
      }
      break;
  }
  return ch;
}

// Integral over y in [y_min, inf) of y ln(1 - r^2 e^-y) (energy) or
// y^2 r^2 e^-y / (1 - r^2 e^-y) (pressure). The absolute tolerance is scaled
// by the perfect-mirror value of the same integral.
Estimate channel_integral(Quantity q, const Channel& ch, double y_min, double rel_tol, int nodes) {
  if (ch.kind == Channel::Kind::Zero) return {};
  const double decay = std::exp(-y_min);
  if (q == Quantity::FreeEnergy) {
    const double abs_tol = 1e-3 * rel_tol * (y_min + 1.0) * decay;
    return integrate_panels([&](double y) { return y * log_factor(ch.at(y), y); }, y_min, rel_tol, abs_tol, nodes);
  }
  const double abs_tol = 1e-3 * rel_tol * (y_min * y_min + 2.0 * y_min + 2.0) * decay;
  return integrate_panels([&](double y) { return y * y * pressure_factor(ch.at(y), y); }, y_min, rel_tol, abs_tol,
                          nodes);
}

// Dimensionful prefactor turning the y integral into energy/area (times
// k_B T / 2 pi) or pressure (times k_B T / pi).
double y_jacobian(Quantity q, double d) {
  return q == Quantity::FreeEnergy ? 1.0 / (4.0 * d * d) : 1.0 / (8.0 * d * d * d);
}

void check_geometry(double d, double temperature) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("separation must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError("temperature must be positive; use the T = 0 path for T = 0");
  }
}

int matsubara_hard_cap(double d, double temperature) {
  const double scale = hbar * c / (2.0 * pi * k_B * temperature * d);
  return static_cast<int>(std::ceil(15.0 * scale)) + 10;
}

double inner_tolerance(const QuadratureSpec& spec) { return std::max(spec.rel_tol * 0.01, 1e-14); }

double t0_quantity(Quantity q, double d, const DielectricModel& model, const QuadratureSpec& spec) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("separation must be positive");
  validate(spec);
  validate(model);
  const double inner_tol = inner_tolerance(spec);
  auto integrand = [&](double t) {
    const double xi = t * c / (2.0 * d);
    const double eps = eps_imag_axis(model, AngularFrequency{xi});
    double sum = 0.0;
    for (Pol p : {Pol::TE, Pol::TM}) {
      sum += channel_integral(q, dynamic_channel(p, xi, eps, d), t, inner_tol, spec.k_nodes).value;
    }
    return sum;
  };
  // Below t = 1 the dissipative TE channel behaves like sqrt(t); t = s^2
  // makes it smooth there.
  auto squared = [&](double s) { return 2.0 * s * integrand(s * s); };
  const auto panel = [&](std::size_t i, double rel, double abs) {
    const double a = kTPanels[i], b = kTPanels[i + 1];
    if (b <= 1.0) return adaptive_integrate(squared, std::sqrt(a), std::sqrt(b), rel, abs, spec.k_nodes);
    return adaptive_integrate(integrand, a, b, rel, abs, spec.k_nodes);
  };
  const std::size_t n_panels = kTPanels.size() - 1;
  double rough = 0.0;
  for (std::size_t i = 0; i < n_panels; ++i) rough += std::abs(panel(i, 1e-3, 0.0).value);
  const double abs_tol = 0.1 * spec.rel_tol * rough / static_cast<double>(n_panels);
  Estimate est;
  for (std::size_t i = 0; i < n_panels; ++i) est += panel(i, spec.rel_tol, abs_tol);
  check_error(est, spec.rel_tol, "zero-temperature frequency integral");
  const double total = est.value;
  // E = hbar c / (32 pi^2 d^3) * integral, P = hbar c / (32 pi^2 d^4) * integral
  const double pref = hbar * c / (32.0 * pi * pi * d * d * d);
  return q == Quantity::FreeEnergy ? pref * total : pref * total / d;
}

double sum_terms(const std::vector<MatsubaraTerm>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += t.total();
  return s;
}

}  // namespace

void validate(const QuadratureSpec& spec) {
  if (!(spec.rel_tol > 0.0 && spec.rel_tol <= 1e-3)) {
    throw ValidationError("rel_tol must lie in (0, 1e-3]");
  }
  if (spec.max_matsubara < 1) throw ValidationError("max_matsubara must be >= 1");
  switch (spec.k_nodes) {
    case 15: case 21: case 31: case 41: case 51: case 61: break;
    default: throw ValidationError("k_nodes must be one of 15, 21, 31, 41, 51, 61");
  }
}

ReflectionPair reflection_coeffs(double k, AngularFrequency xi, double eps) {
  if (!(k > 0.0)) throw DomainError("transverse wavevector must be positive");
  if (!(xi.value >= 0.0)) throw DomainError("imaginary frequency must be non-negative");
  if (!(eps >= 1.0)) throw DomainError("permittivity on the imaginary axis must be >= 1");
  const double xc = xi.value / c;
  const double kappa0 = std::sqrt(k * k + xc * xc);
  const double kappa = std::sqrt(k * k + eps * xc * xc);
  return {(kappa0 - kappa) / (kappa0 + kappa), (eps * kappa0 - kappa) / (eps * kappa0 + kappa)};
}

ReflectionPair static_reflection_coeffs(double k, const DielectricModel& model) {
  if (!(k > 0.0)) throw DomainError("transverse wavevector must be positive");
  switch (static_response(model)) {
    case StaticResponse::Dissipative: return {0.0, 1.0};
    case StaticResponse::Plasma: {
      const double wc = static_plasma_frequency(model).value / c;
      const double q = std::sqrt(k * k + wc * wc);
      return {-wc * wc / ((k + q) * (k + q)), 1.0};
    }
    case StaticResponse::Dielectric: {
      const double e = static_permittivity(model);
      return {0.0, (e - 1.0) / (e + 1.0)};
    }
  }
  return {0.0, 0.0};
}

std::vector<MatsubaraTerm> matsubara_terms(Quantity q, double d, double temperature,
                                           const DielectricModel& model, const QuadratureSpec& spec) {
  check_geometry(d, temperature);
  validate(spec);
  validate(model);
  const double inner_tol = inner_tolerance(spec);
  const double pref = (q == Quantity::FreeEnergy ? k_B * temperature / (2.0 * pi) : k_B * temperature / pi) *
                      y_jacobian(q, d);
  const int hard_cap = matsubara_hard_cap(d, temperature);

  std::vector<MatsubaraTerm> terms;
  Estimate acc;
  {
    const Estimate te = channel_integral(q, static_channel(Pol::TE, model, d), 0.0, inner_tol, spec.k_nodes);
    const Estimate tm = channel_integral(q, static_channel(Pol::TM, model, d), 0.0, inner_tol, spec.k_nodes);
    terms.push_back({0, AngularFrequency{0.0}, 0.5 * pref * te.value, 0.5 * pref * tm.value});
    acc.value += 0.5 * (te.value + tm.value);
    acc.error += 0.5 * (te.error + tm.error);
  }
  double sum = terms.front().total();
  for (int n = 1;; ++n) {
    if (n > spec.max_matsubara) {
      const double achieved = std::abs(terms.back().total() / sum);
      std::ostringstream msg;
      msg << "Matsubara sum not converged after " << spec.max_matsubara << " terms (achieved " << achieved
          << ", requested " << spec.rel_tol << ")";
      throw ConvergenceError(msg.str(), achieved);
    }
    const AngularFrequency xi = matsubara_frequency(n, temperature);
    const double eps = eps_imag_axis(model, xi);
    const double y_min = 2.0 * xi.value * d / c;
    const Estimate te_est = channel_integral(q, dynamic_channel(Pol::TE, xi.value, eps, d), y_min, inner_tol, spec.k_nodes);
    const Estimate tm_est = channel_integral(q, dynamic_channel(Pol::TM, xi.value, eps, d), y_min, inner_tol, spec.k_nodes);
    acc += te_est;
    acc += tm_est;
    const double te = pref * te_est.value;
    const double tm = pref * tm_est.value;
    terms.push_back({n, xi, te, tm});
    sum += te + tm;
    if (std::abs(te + tm) <= spec.rel_tol * std::abs(sum) || n >= hard_cap) break;
  }
  check_error(acc, spec.rel_tol, "Matsubara k-integrals");
  return terms;
}

double free_energy_per_area(double d, double temperature, const DielectricModel& model,
                            const QuadratureSpec& spec) {
  return sum_terms(matsubara_terms(Quantity::FreeEnergy, d, temperature, model, spec));
}

double pressure_parallel(double d, double temperature, const DielectricModel& model,
                         const QuadratureSpec& spec) {
  return sum_terms(matsubara_terms(Quantity::Pressure, d, temperature, model, spec));
}

double free_energy_per_area_T0(double d, const DielectricModel& model, const QuadratureSpec& spec) {
  return t0_quantity(Quantity::FreeEnergy, d, model, spec);
}

double pressure_parallel_T0(double d, const DielectricModel& model, const QuadratureSpec& spec) {
  return t0_quantity(Quantity::Pressure, d, model, spec);
}

namespace {
void check_pfa(double d, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("sphere radius must be positive");
  if (d / radius > 1e-3) {
    std::ostringstream msg;
    msg << "proximity force approximation used at d/R = " << d / radius << " > 1e-3";
    warn(msg.str());
  }
}
}  // namespace

double force_sphere_plane(double d, double temperature, double radius, const DielectricModel& model,
                          const QuadratureSpec& spec) {
  check_pfa(d, radius);
  return 2.0 * pi * radius * std::abs(free_energy_per_area(d, temperature, model, spec));
}

double force_sphere_plane_T0(double d, double radius, const DielectricModel& model, const QuadratureSpec& spec) {
  check_pfa(d, radius);
  return 2.0 * pi * radius * std::abs(free_energy_per_area_T0(d, model, spec));
}

double casimir_force(double d, double temperature, double radius, const DielectricModel& model,
                     const QuadratureSpec& spec) {
  if (temperature == 0.0) return force_sphere_plane_T0(d, radius, model, spec);
  return force_sphere_plane(d, temperature, radius, model, spec);
}

double asymptote_thermal(double d, double radius, double temperature, ThermalFamily which) {
  if (!(d > 0.0) || !(radius > 0.0)) throw DomainError("separation and radius must be positive");
  if (!(temperature >= 0.0)) throw DomainError("temperature must be non-negative");
  const double drude = constants::zeta3 * radius * k_B * temperature / (8.0 * d * d);
  return which == ThermalFamily::Drude ? drude : 2.0 * drude;
}

DielectricModel make_material_model(ThermalFamily family, const DrudeParams& params,
                                    const std::optional<OpticalTable>& table, double tail_exponent) {
  if (table) {
    LowFrequencyExtrapolation low = family == ThermalFamily::Drude ? LowFrequencyExtrapolation{params}
                                                                   : LowFrequencyExtrapolation{PlasmaParams{params.omega_p}};
    return TabulatedModel{*table, low, tail_exponent};
  }
  if (family == ThermalFamily::Drude) return params;
  return PlasmaParams{params.omega_p};
}

BandSpec gold_band(ThermalFamily family) {
  BandSpec b;
  b.family = family;
  b.omega_p_min = ev_to_angular_frequency(6.85);
  b.omega_p_max = ev_to_angular_frequency(9.00);
  b.gamma_min = ev_to_angular_frequency(0.02);
  b.gamma_max = ev_to_angular_frequency(0.061);
  b.nominal = gold_drude();
  return b;
}

std::vector<BandPoint> sensitivity_band(const std::vector<double>& d_grid, double temperature, double radius,
                                        const BandSpec& band, const QuadratureSpec& spec, unsigned threads) {
  if (d_grid.empty()) throw ValidationError("separation grid is empty");
  if (!(band.omega_p_min.value > 0.0) || band.omega_p_max < band.omega_p_min || !(band.gamma_min.value > 0.0) ||
      band.gamma_max < band.gamma_min) {
    throw ValidationError("parameter ranges must be positive and ordered (min <= max)");
  }
  DrudeParams center{0.5 * (band.omega_p_min.value + band.omega_p_max.value),
                     0.5 * (band.gamma_min.value + band.gamma_max.value)};
  if (band.nominal) {
    const auto& n = *band.nominal;
    if (n.omega_p >= band.omega_p_min && n.omega_p <= band.omega_p_max && n.gamma >= band.gamma_min &&
        n.gamma <= band.gamma_max) {
      center = n;
    }
  }
  std::vector<DielectricModel> corners;
  corners.push_back(make_material_model(band.family, center, band.table, band.tail_exponent));
  for (auto wp : {band.omega_p_min, band.omega_p_max}) {
    for (auto g : {band.gamma_min, band.gamma_max}) {
      corners.push_back(make_material_model(band.family, DrudeParams{wp, g}, band.table, band.tail_exponent));
    }
  }
  return parallel_map(
      d_grid,
      [&](double d) {
        BandPoint p{d, 0.0, 0.0, 0.0};
        p.f_center = casimir_force(d, temperature, radius, corners.front(), spec);
        p.f_min = p.f_max = p.f_center;
        for (std::size_t i = 1; i < corners.size(); ++i) {
          const double f = casimir_force(d, temperature, radius, corners[i], spec);
          p.f_min = std::min(p.f_min, f);
          p.f_max = std::max(p.f_max, f);
        }
        return p;
      },
      threads);
}

}  // namespace casimir
