#pragma once

#include <optional>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/dielectric.hpp"

namespace casimir {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  int max_matsubara = 100000;
  int k_nodes = 15;  // Gauss-Kronrod points per panel: 15, 21, 31, 41, 51 or 61
};

void validate(const QuadratureSpec& spec);

struct ReflectionPair {
  double te;
  double tm;
};

// Fresnel coefficients at imaginary frequency xi > 0 for transverse
// wavevector k > 0 and permittivity eps = eps(i xi) >= 1.
ReflectionPair reflection_coeffs(double k, AngularFrequency xi, double eps);

// xi = 0 coefficients, dispatched on the model's static response:
// dissipative (Drude) -> (0, 1); plasma -> (k - q)/(k + q) with
// q = sqrt(k^2 + omega_p^2/c^2), 1; dielectric -> (0, (eps0 - 1)/(eps0 + 1)).
ReflectionPair static_reflection_coeffs(double k, const DielectricModel& model);

// One term of the Matsubara sum, already carrying the k_B T / 2 pi (energy)
// or k_B T / pi (pressure) prefactor and the half weight at n = 0.
struct MatsubaraTerm {
  int n;
  AngularFrequency xi;
  double te;
  double tm;
  double total() const { return te + tm; }
};

enum class Quantity { FreeEnergy, Pressure };

std::vector<MatsubaraTerm> matsubara_terms(Quantity q, double d, double temperature,
                                           const DielectricModel& model, const QuadratureSpec& spec = {});

// Parallel-plate Lifshitz free energy per unit area, J/m^2 (negative).
double free_energy_per_area(double d, double temperature, const DielectricModel& model,
                            const QuadratureSpec& spec = {});

// Attractive pressure dE/dd, N/m^2 (positive).
double pressure_parallel(double d, double temperature, const DielectricModel& model,
                         const QuadratureSpec& spec = {});

// T = 0 counterparts: the Matsubara sum replaced by (hbar / 2 pi) * integral over xi.
double free_energy_per_area_T0(double d, const DielectricModel& model, const QuadratureSpec& spec = {});
double pressure_parallel_T0(double d, const DielectricModel& model, const QuadratureSpec& spec = {});

// Proximity-force sphere-plane force 2 pi R |E(d)|, N (positive = attractive).
// Emits a warning when d / R > 1e-3.
double force_sphere_plane(double d, double temperature, double radius, const DielectricModel& model,
                          const QuadratureSpec& spec = {});
double force_sphere_plane_T0(double d, double radius, const DielectricModel& model,
                             const QuadratureSpec& spec = {});

// force_sphere_plane for T > 0, force_sphere_plane_T0 for T == 0.
double casimir_force(double d, double temperature, double radius, const DielectricModel& model,
                     const QuadratureSpec& spec = {});

enum class ThermalFamily { Drude, Plasma };

// Leading large-separation thermal force: zeta(3) R k_B T / (8 d^2) for Drude,
// twice that for plasma.
double asymptote_thermal(double d, double radius, double temperature, ThermalFamily which);

// Gold-like material of the given low-frequency family. With a table, the
// optical data is extrapolated to zero frequency with the family's model.
DielectricModel make_material_model(ThermalFamily family, const DrudeParams& params,
                                    const std::optional<OpticalTable>& table = std::nullopt,
                                    double tail_exponent = 3.0);

struct BandSpec {
  ThermalFamily family = ThermalFamily::Drude;
  AngularFrequency omega_p_min;
  AngularFrequency omega_p_max;
  AngularFrequency gamma_min;
  AngularFrequency gamma_max;
  // Central parameter set; defaults to the range midpoints when absent or
  // outside the ranges.
  std::optional<DrudeParams> nominal;
  std::optional<OpticalTable> table;
  double tail_exponent = 3.0;
};

// Default exploration ranges for gold: omega_p 6.85..9.00 eV, gamma 0.02..0.061 eV,
// centred on 7.54 / 0.051 eV.
BandSpec gold_band(ThermalFamily family);

struct BandPoint {
  double d;
  double f_min;
  double f_center;
  double f_max;
};

// Sphere-plane force envelope over the four corners of the (omega_p, gamma)
// box plus the central set. temperature == 0 selects the T = 0 path.
std::vector<BandPoint> sensitivity_band(const std::vector<double>& d_grid, double temperature, double radius,
                                        const BandSpec& band, const QuadratureSpec& spec = {},
                                        unsigned threads = 1);

}  // namespace casimir
