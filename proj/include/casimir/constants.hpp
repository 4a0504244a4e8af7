#pragma once

#include <compare>
#include <numbers>

namespace casimir {

// CODATA 2018 values. Everything inside the library is SI; electron-volts
// appear only at file and command-line boundaries.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double c = 299792458.0;                  // m / s
inline constexpr double k_B = 1.380649e-23;               // J / K
inline constexpr double eps0 = 8.8541878128e-12;          // F / m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double zeta3 = 1.2020569031595942854;    // Apery's constant
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

inline constexpr const char* kConstantsVersion = "CODATA-2018";

struct AngularFrequency {
  double value = 0.0;  // rad / s

  constexpr auto operator<=>(const AngularFrequency&) const = default;
};

constexpr AngularFrequency operator*(double a, AngularFrequency w) { return {a * w.value}; }

// Photon energy in eV to angular frequency E e / hbar.
AngularFrequency ev_to_angular_frequency(double energy_ev);

double angular_frequency_to_ev(AngularFrequency omega);

// xi_n = 2 pi n k_B T / hbar. T must be strictly positive; the zero
// temperature limit has its own frequency-integral path in the engine.
AngularFrequency matsubara_frequency(int n, double temperature);

}  // namespace casimir
