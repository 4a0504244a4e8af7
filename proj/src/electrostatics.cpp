#include "casimir/electrostatics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "casimir/constants.hpp"
#include "casimir/csv.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

double capacitance_gradient(double radius) { return constants::pi * constants::eps0 * radius; }

void check_separation(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("separation must be positive");
}

}  // namespace

PatchRegime classify_patch_regime(double patch_size, double d, double radius) {
  check_separation(d);
  if (patch_size < d / 5.0) return PatchRegime::Suppressed;
  if (patch_size >= std::sqrt(radius * d)) return PatchRegime::Large;
  return PatchRegime::Intermediate;
}

double bias_force(double d, double radius, double V, double V_m) {
  check_separation(d);
  const double dv = V - V_m;
  return capacitance_gradient(radius) * dv * dv / d;
}

double patch_force(double d, double radius, double v_rms, double delta) {
  check_separation(d);
  if (!(delta >= 0.0)) throw DomainError("separation fluctuation must be non-negative");
  const double ratio = delta / d;
  return capacitance_gradient(radius) * v_rms * v_rms / d * (1.0 + ratio * ratio);
}

CalibrationResult calibrate_from_sweep(const std::vector<SweepSample>& samples, double radius) {
  if (samples.size() < 4) {
    throw ArityError("parabolic calibration needs at least 4 samples, got " + std::to_string(samples.size()));
  }
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  const auto n = static_cast<Eigen::Index>(samples.size());
  // Voltages are centred and scaled before fitting; the monomial
  // coefficients are recovered exactly afterwards.
  double v_mean = 0.0, v_scale = 0.0;
  for (const auto& s : samples) v_mean += s.V;
  v_mean /= static_cast<double>(n);
  for (const auto& s : samples) v_scale = std::max(v_scale, std::abs(s.V - v_mean));
  if (v_scale == 0.0) throw CalibrationError("sweep has a single voltage");

  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (!(s.sigma_F > 0.0)) throw ValidationError("sweep sample sigma must be positive");
    const double w = 1.0 / s.sigma_F;
    const double u = (s.V - v_mean) / v_scale;
    A(i, 0) = w;
    A(i, 1) = w * u;
    A(i, 2) = w * u * u;
    b(i) = w * s.F;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) throw CalibrationError("sweep voltages do not determine a parabola");
  const Eigen::Vector3d p = qr.solve(b);
  const Eigen::Matrix3d cov_p = (A.transpose() * A).inverse();

  // F = p0 + p1 u + p2 u^2 with u = (V - m)/s  ->  monomials in V.
  const double m = v_mean, s = v_scale;
  Eigen::Matrix3d T;  // c = T p
  T << 1.0, -m / s, m * m / (s * s),
       0.0, 1.0 / s, -2.0 * m / (s * s),
       0.0, 0.0, 1.0 / (s * s);
  const Eigen::Vector3d coef = T * p;
  const Eigen::Matrix3d cov_c = T * cov_p * T.transpose();

  const double c0 = coef(0), c1 = coef(1), c2 = coef(2);
  if (!(c2 > 0.0)) {
    throw CalibrationError("force-vs-voltage curvature is not positive (c2 = " + std::to_string(c2) + ")");
  }

  CalibrationResult r;
  const double k = capacitance_gradient(radius);
  r.d = k / c2;
  r.V_m = -c1 / (2.0 * c2);
  r.F_residual = c0 - c1 * c1 / (4.0 * c2);
  Eigen::Matrix3d J;  // rows: d, V_m, F_residual; columns: c0, c1, c2
  J << 0.0, 0.0, -k / (c2 * c2),
       0.0, -1.0 / (2.0 * c2), c1 / (2.0 * c2 * c2),
       1.0, -c1 / (2.0 * c2), c1 * c1 / (4.0 * c2 * c2);
  r.covariance = J * cov_c * J.transpose();
  r.coefficients = coef;
  r.chi2 = (A * p - b).squaredNorm();
  r.n_samples = static_cast<int>(n);
  return r;
}

std::vector<SweepSample> load_sweep_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path, {"voltage_v", "force_n", "sigma_n"});
  std::vector<SweepSample> out;
  out.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    if (!(r[2] > 0.0)) {
      throw ValidationError(path.string() + " row " + std::to_string(csv.line_numbers[i]) +
                            ": sigma_n must be positive");
    }
    out.push_back({r[0], r[1], r[2]});
  }
  return out;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "voltage_v,force_n,sigma_n\n";
  for (const auto& s : samples) write_csv_row(out, {s.V, s.F, s.sigma_F});
}

}  // namespace casimir
