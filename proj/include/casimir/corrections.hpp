#pragma once

#include <functional>

namespace casimir {

struct FluctuationSpec {
  double delta;        // rms separation fluctuation, m
  double delta_sigma;  // its uncertainty, m
};

using ForceCurve = std::function<double(double)>;

// F(d) + F''(d) delta^2 / 2, F'' from a 5-point central difference with step
// max(1 nm, 1e-3 d). Requires d > 5 delta.
double fluctuation_corrected_force(const ForceCurve& force, double d, double delta);

// Second derivative used above, exposed for diagnostics.
double second_derivative(const ForceCurve& force, double d);

// d (1 + (delta/d)^2): the capacitive calibration sees <1/d>, which
// underestimates the mean gap by that factor.
double corrected_separation(double d_inferred, double delta);

// Half the spread of the fluctuation correction between delta +- delta_sigma.
double correction_uncertainty(const ForceCurve& force, double d, const FluctuationSpec& spec);

}  // namespace casimir
