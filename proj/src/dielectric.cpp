#include "casimir/dielectric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "casimir/csv.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr double kTwoOverPi = 2.0 / constants::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Integral over [0, W] of d omega / ((omega^2 + gamma^2)(omega^2 + xi^2)).
double drude_low_band_kernel(double W, double gamma, double xi) {
  auto f = [W](double x) { return std::atan(W / x) / x; };
  if (std::abs(xi - gamma) < 1e-5 * gamma) {
    const double m = 0.5 * (xi + gamma);
    const double df = -std::atan(W / m) / (m * m) - W / (m * (m * m + W * W));
    return -df / (2.0 * m);
  }
  return (f(gamma) - f(xi)) / ((xi - gamma) * (xi + gamma));
}

// z - atan(z) without cancellation for small z.
double z_minus_atan(double z) {
  if (z < 1e-3) {
    const double z2 = z * z;
    return z * z2 * (1.0 / 3.0 - z2 / 5.0 + z2 * z2 / 7.0);
  }
  return z - std::atan(z);
}

// Integral of omega eps''(omega) / (omega^2 + xi^2) over one table segment
// with eps'' interpolated linearly between the end points.
double segment_integral(const OpticalRow& lo, const OpticalRow& hi, double xi) {
  const double w1 = lo.omega.value;
  const double w2 = hi.omega.value;
  const double dw = w2 - w1;
  const double slope = (hi.eps_imag - lo.eps_imag) / dw;
  const double intercept = lo.eps_imag - slope * w1;
  if (xi == 0.0) {
    return intercept * std::log(w2 / w1) + slope * dw;
  }
  const double xi2 = xi * xi;
  const double log_ratio = std::log1p(dw * (w2 + w1) / (w1 * w1 + xi2));
  const double z = xi * dw / (xi2 + w1 * w2);
  const double linear_part = dw * (w1 * w2) / (xi2 + w1 * w2) + xi * z_minus_atan(z);
  return 0.5 * intercept * log_ratio + slope * linear_part;
}

// Integral over u in [0, 1] of u^(s-1) / (1 + (a u)^2); the power-law tail
// above the table after the substitution u = omega_max / omega.
double tail_kernel(double s, double a) {
  if (a == 0.0) return 1.0 / s;
  if (s == 3.0) {
    if (a < 0.1) {
      const double a2 = a * a;
      double term = 1.0, sum = 0.0;
      for (int k = 0; k < 10; ++k) {
        sum += term / (2 * k + 3);
        term *= -a2;
      }
      return sum;
    }
    return (1.0 - std::atan(a) / a) / (a * a);
  }
  using boost::math::quadrature::gauss_kronrod;
  auto f = [s, a](double u) { return std::pow(u, s - 1.0) / (1.0 + a * a * u * u); };
  return gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

double tabulated_kk(const TabulatedModel& m, double xi) {
  const auto& rows = m.table.rows();
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    integral += segment_integral(rows[i], rows[i + 1], xi);
  }
  const double w_max = rows.back().omega.value;
  integral += rows.back().eps_imag * tail_kernel(m.tail_exponent, xi / w_max);

  const double w_min = rows.front().omega.value;
  double low = 0.0;
  std::visit(overloaded{
                 [](const NoExtrapolation&) {},
                 [&](const DrudeParams& p) {
                   const double wp = p.omega_p.value, g = p.gamma.value;
                   low = kTwoOverPi * wp * wp * g * drude_low_band_kernel(w_min, g, xi);
                 },
                 [&](const PlasmaParams& p) {
                   // eps'' of the plasma model is a delta function at omega = 0.
                   low = p.omega_p.value * p.omega_p.value / (xi * xi);
                 },
             },
             m.low);
  return 1.0 + low + kTwoOverPi * integral;
}

void check_positive(AngularFrequency w, const char* what) {
  if (!(w.value > 0.0) || !std::isfinite(w.value)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

DrudeParams gold_drude() {
  return {ev_to_angular_frequency(7.54), ev_to_angular_frequency(0.051)};
}

PlasmaParams gold_plasma() { return {ev_to_angular_frequency(7.54)}; }

OpticalTable make_optical_table(std::vector<OpticalRow> rows) {
  if (rows.size() < 2) {
    throw ValidationError("optical table needs at least 2 rows, got " + std::to_string(rows.size()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].omega.value > 0.0) || !std::isfinite(rows[i].omega.value)) {
      throw ValidationError("optical table row " + std::to_string(i) + ": frequency must be positive");
    }
    if (!(rows[i].eps_imag >= 0.0) || !std::isfinite(rows[i].eps_imag)) {
      throw ValidationError("optical table row " + std::to_string(i) + ": eps_imag must be >= 0");
    }
    if (i > 0 && !(rows[i].omega.value > rows[i - 1].omega.value)) {
      throw ValidationError("optical table row " + std::to_string(i) +
                            ": frequencies must be strictly increasing");
    }
  }
  OpticalTable t;
  t.rows_ = std::move(rows);
  return t;
}

OpticalTable load_optical_table(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path, {"photon_energy_ev", "eps_imag"});
  if (csv.rows.empty()) throw ValidationError(path.string() + ": no data rows");
  std::vector<OpticalRow> rows;
  rows.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const std::size_t line = csv.line_numbers[i];
    const double energy = r[0];
    const double eps = r[1];
    if (!(energy > 0.0)) {
      throw ValidationError(path.string() + " row " + std::to_string(line) +
                            ": photon energy must be positive");
    }
    if (eps < 0.0) {
      throw ValidationError(path.string() + " row " + std::to_string(line) +
                            ": negative eps_imag");
    }
    if (!rows.empty() && !(ev_to_angular_frequency(energy) > rows.back().omega)) {
      throw ValidationError(path.string() + " row " + std::to_string(line) +
                            ": photon energies not strictly increasing");
    }
    rows.push_back({ev_to_angular_frequency(energy), eps});
  }
  return make_optical_table(std::move(rows));
}

StaticResponse static_response(const DielectricModel& model) {
  return std::visit(
      overloaded{
          [](const DrudeParams&) { return StaticResponse::Dissipative; },
          [](const PlasmaParams&) { return StaticResponse::Plasma; },
          [](const ConstantModel&) { return StaticResponse::Dielectric; },
          [](const TabulatedModel& t) {
            return std::visit(overloaded{
                                  [](const NoExtrapolation&) { return StaticResponse::Dielectric; },
                                  [](const DrudeParams&) { return StaticResponse::Dissipative; },
                                  [](const PlasmaParams&) { return StaticResponse::Plasma; },
                              },
                              t.low);
          },
      },
      model);
}

AngularFrequency static_plasma_frequency(const DielectricModel& model) {
  if (const auto* p = std::get_if<PlasmaParams>(&model)) return p->omega_p;
  if (const auto* t = std::get_if<TabulatedModel>(&model)) {
    if (const auto* p = std::get_if<PlasmaParams>(&t->low)) return p->omega_p;
  }
  throw DomainError("model has no plasma-type static response");
}

double static_permittivity(const DielectricModel& model) {
  if (const auto* c = std::get_if<ConstantModel>(&model)) return c->eps;
  if (const auto* t = std::get_if<TabulatedModel>(&model)) {
    if (std::holds_alternative<NoExtrapolation>(t->low)) return tabulated_kk(*t, 0.0);
  }
  throw DomainError("model has no finite static permittivity");
}

double eps_imag_axis(const DielectricModel& model, AngularFrequency xi) {
  if (!(xi.value > 0.0)) {
    throw DomainError("eps(i xi) is only evaluated for xi > 0; the static limit is tag-dispatched");
  }
  const double x = xi.value;
  return std::visit(overloaded{
                        [x](const DrudeParams& p) {
                          const double wp = p.omega_p.value;
                          return 1.0 + wp * wp / (x * (x + p.gamma.value));
                        },
                        [x](const PlasmaParams& p) {
                          const double wp = p.omega_p.value;
                          return 1.0 + wp * wp / (x * x);
                        },
                        [x](const TabulatedModel& t) { return tabulated_kk(t, x); },
                        [](const ConstantModel& c) { return c.eps; },
                    },
                    model);
}

void validate(const DielectricModel& model) {
  std::visit(overloaded{
                 [](const DrudeParams& p) {
                   check_positive(p.omega_p, "Drude omega_p");
                   check_positive(p.gamma, "Drude gamma");
                 },
                 [](const PlasmaParams& p) { check_positive(p.omega_p, "plasma omega_p"); },
                 [](const TabulatedModel& t) {
                   if (!(t.tail_exponent >= 1.0) || !std::isfinite(t.tail_exponent)) {
                     throw ValidationError("tail exponent must be >= 1");
                   }
                   if (const auto* p = std::get_if<DrudeParams>(&t.low)) {
                     check_positive(p->omega_p, "Drude omega_p");
                     check_positive(p->gamma, "Drude gamma");
                   }
                   if (const auto* p = std::get_if<PlasmaParams>(&t.low)) {
                     check_positive(p->omega_p, "plasma omega_p");
                   }
                 },
                 [](const ConstantModel& c) {
                   if (!(c.eps >= 1.0) || !std::isfinite(c.eps)) {
                     throw ValidationError("constant permittivity must be finite and >= 1");
                   }
                 },
             },
             model);
}

std::string describe(const DielectricModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const DrudeParams& p) {
                   os << "drude(omega_p=" << angular_frequency_to_ev(p.omega_p)
                      << " eV, gamma=" << angular_frequency_to_ev(p.gamma) << " eV)";
                 },
                 [&](const PlasmaParams& p) {
                   os << "plasma(omega_p=" << angular_frequency_to_ev(p.omega_p) << " eV)";
                 },
                 [&](const TabulatedModel& t) {
                   os << "tabulated(" << t.table.rows().size() << " rows, tail s=" << t.tail_exponent
                      << ")";
                 },
                 [&](const ConstantModel& c) { os << "constant(eps=" << c.eps << ")"; },
             },
             model);
  return os.str();
}

}  // namespace casimir
