#pragma once

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <vector>

namespace casimir {

struct BiasState {
  double V;    // applied bias, V
  double V_m;  // minimizing potential, V
};

// Patch-size regimes relative to the separation d and r_eff = sqrt(R d).
enum class PatchRegime {
  Suppressed,    // lambda << d: force ~ exp(-d / lambda), neglected
  Intermediate,  // d << lambda << r_eff: pi eps0 R V_rms^2 / d
  Large,         // lambda >~ r_eff: absorbed into a d-dependent V_m
};

// lambda < d/5 -> Suppressed, lambda >= sqrt(R d) -> Large, else Intermediate.
PatchRegime classify_patch_regime(double patch_size, double d, double radius);

struct SweepSample {
  double V;        // volts
  double F;        // newtons
  double sigma_F;  // newtons, > 0
};

// pi eps0 R (V - V_m)^2 / d
double bias_force(double d, double radius, double V, double V_m);

// pi eps0 R V_rms^2 / d * (1 + (delta/d)^2)
double patch_force(double d, double radius, double v_rms, double delta = 0.0);

struct CalibrationResult {
  double d;           // m, pi eps0 R / c2
  double V_m;         // V, -c1 / (2 c2)
  double F_residual;  // N, force at the parabola vertex: c0 - c1^2 / (4 c2)
  // Covariance of (d, V_m, F_residual), SI units.
  Eigen::Matrix3d covariance;
  Eigen::Vector3d coefficients;  // (c0, c1, c2)
  double chi2;
  int n_samples;

  double sigma_d() const { return std::sqrt(covariance(0, 0)); }
  double sigma_V_m() const { return std::sqrt(covariance(1, 1)); }
  double sigma_F_residual() const { return std::sqrt(covariance(2, 2)); }
};

// Weighted least-squares parabola F(V) = c2 V^2 + c1 V + c0 through a
// force-vs-voltage sweep. Needs at least 4 samples and c2 > 0.
CalibrationResult calibrate_from_sweep(const std::vector<SweepSample>& samples, double radius);

// Sweep CSV: header `voltage_v,force_n,sigma_n`.
std::vector<SweepSample> load_sweep_csv(const std::filesystem::path& path);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepSample>& samples);

}  // namespace casimir
