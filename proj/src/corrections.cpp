#include "casimir/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

void check_regime(double d, double delta) {
  if (!(delta >= 0.0)) throw DomainError("separation fluctuation must be non-negative");
  if (!(d > 5.0 * delta)) {
    throw RegimeError("fluctuation expansion needs d > 5 delta (d = " + std::to_string(d) +
                      ", delta = " + std::to_string(delta) + ")");
  }
}

}  // namespace

double second_derivative(const ForceCurve& force, double d) {
  const double h = std::max(1e-9, 1e-3 * d);
  const double f0 = force(d);
  const double fp1 = force(d + h), fm1 = force(d - h);
  const double fp2 = force(d + 2.0 * h), fm2 = force(d - 2.0 * h);
  return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
}

double fluctuation_corrected_force(const ForceCurve& force, double d, double delta) {
  check_regime(d, delta);
  if (delta == 0.0) return force(d);
  return force(d) + 0.5 * second_derivative(force, d) * delta * delta;
}

double corrected_separation(double d_inferred, double delta) {
  check_regime(d_inferred, delta);
  const double ratio = delta / d_inferred;
  return d_inferred * (1.0 + ratio * ratio);
}

double correction_uncertainty(const ForceCurve& force, double d, const FluctuationSpec& spec) {
  if (!(spec.delta_sigma >= 0.0)) throw DomainError("delta uncertainty must be non-negative");
  check_regime(d, spec.delta + spec.delta_sigma);
  if (spec.delta_sigma == 0.0) return 0.0;
  const double curvature = second_derivative(force, d);
  const double hi = spec.delta + spec.delta_sigma;
  const double lo = spec.delta - spec.delta_sigma;
  return std::abs(0.5 * curvature * (hi * hi - lo * lo)) / 2.0;
}

}  // namespace casimir
