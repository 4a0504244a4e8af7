#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "casimir/constants.hpp"

namespace casimir {

struct DrudeParams {
  AngularFrequency omega_p;
  AngularFrequency gamma;
};

struct PlasmaParams {
  AngularFrequency omega_p;
};

// Gold values used for the theory curves: omega_p = 7.54 eV, gamma = 0.051 eV.
DrudeParams gold_drude();
PlasmaParams gold_plasma();

struct OpticalRow {
  AngularFrequency omega;
  double eps_imag;  // eps''(omega)
};

// Imaginary part of the permittivity on a strictly increasing real-frequency
// grid. Construct through make_optical_table or load_optical_table.
class OpticalTable {
public:
  const std::vector<OpticalRow>& rows() const noexcept { return rows_; }
  AngularFrequency omega_min() const { return rows_.front().omega; }
  AngularFrequency omega_max() const { return rows_.back().omega; }

private:
  friend OpticalTable make_optical_table(std::vector<OpticalRow> rows);
  std::vector<OpticalRow> rows_;
};

// Validates: at least two rows, strictly increasing frequencies, eps'' >= 0.
OpticalTable make_optical_table(std::vector<OpticalRow> rows);

// CSV with header `photon_energy_ev,eps_imag`. Row numbers in error messages
// count the header as row 1.
OpticalTable load_optical_table(const std::filesystem::path& path);

struct NoExtrapolation {};

using LowFrequencyExtrapolation = std::variant<NoExtrapolation, DrudeParams, PlasmaParams>;

struct TabulatedModel {
  OpticalTable table;
  LowFrequencyExtrapolation low;
  double tail_exponent = 3.0;  // eps'' ~ omega^-s above the table
};

// Non-dispersive dielectric. With a huge eps this is the perfect-mirror
// reference used to check the Lifshitz engine against closed forms.
struct ConstantModel {
  double eps;
};

using DielectricModel = std::variant<DrudeParams, PlasmaParams, TabulatedModel, ConstantModel>;

// What the zero-frequency reflection coefficients are derived from. The
// engine dispatches on this tag and never evaluates eps numerically at 0.
enum class StaticResponse { Dissipative, Plasma, Dielectric };

StaticResponse static_response(const DielectricModel& model);

// Plasma frequency governing the n = 0 TE reflection (Plasma response only).
AngularFrequency static_plasma_frequency(const DielectricModel& model);

// Static permittivity eps(0) (Dielectric response only).
double static_permittivity(const DielectricModel& model);

// eps(i xi) for xi > 0.
double eps_imag_axis(const DielectricModel& model, AngularFrequency xi);

// Checks parameter invariants (positive frequencies, tail exponent >= 1, eps >= 1).
void validate(const DielectricModel& model);

std::string describe(const DielectricModel& model);

}  // namespace casimir
