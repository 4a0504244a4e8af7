#include "casimir/constants.hpp"

#include <cmath>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

AngularFrequency ev_to_angular_frequency(double energy_ev) {
  if (!(energy_ev >= 0.0) || !std::isfinite(energy_ev)) {
    throw DomainError("photon energy must be finite and non-negative, got " +
                      std::to_string(energy_ev) + " eV");
  }
  return {energy_ev * constants::elementary_charge / constants::hbar};
}

double angular_frequency_to_ev(AngularFrequency omega) {
  return omega.value * constants::hbar / constants::elementary_charge;
}

AngularFrequency matsubara_frequency(int n, double temperature) {
  if (n < 0) throw DomainError("Matsubara index must be non-negative");
  if (!(temperature > 0.0)) {
    throw DomainError("Matsubara frequencies need T > 0; use the T = 0 path instead");
  }
  return {2.0 * constants::pi * n * constants::k_B * temperature / constants::hbar};
}

}  // namespace casimir
