#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/corrections.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/lifshitz.hpp"

namespace casimir {

struct MeasurementPoint {
  double d;      // m
  double F;      // N
  double sigma;  // N
};

enum class ModelId { Drude300K, Plasma300K, DrudeT0, PlasmaT0 };

inline constexpr ModelId kAllModels[] = {ModelId::Drude300K, ModelId::Plasma300K, ModelId::DrudeT0,
                                         ModelId::PlasmaT0};

std::string_view to_string(ModelId id);
// Accepts the canonical names (Drude300K, ...) case-insensitively.
ModelId parse_model_id(std::string_view name);

// Everything a theory curve depends on besides the model identity.
struct TheoryConfig {
  double radius = 0.156;       // m
  double temperature = 300.0;  // K, used by the *300K models
  DrudeParams material = gold_drude();
  std::optional<OpticalTable> table;
  double tail_exponent = 3.0;
  QuadratureSpec quadrature;
};

struct ModelCurve {
  ModelId id;
  ForceCurve evaluator;  // d -> N
};

// Uncorrected sphere-plane Casimir force for the model.
ForceCurve raw_casimir_curve(ModelId id, const TheoryConfig& theory);

// Theory curve as compared with data: fluctuation-corrected with delta.
ModelCurve make_model_curve(ModelId id, const TheoryConfig& theory, double delta);

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

// Bin edges around a log grid: geometric midpoints, outer edges half a step out.
std::vector<double> log_bin_edges(const std::vector<double>& grid);

// Inverse-variance weighted F and d per bin, sigma = (sum sigma_i^-2)^-1/2.
// Empty bins are dropped; bins are [e_i, e_i+1) with the last one closed.
std::vector<MeasurementPoint> bin_points(const std::vector<MeasurementPoint>& points,
                                         const std::vector<double>& edges);

// sigma_i -> sqrt(sigma_i^2 + u_i^2), u_i the fluctuation-correction uncertainty
// of the uncorrected curve at d_i.
std::vector<MeasurementPoint> add_correction_uncertainty(const std::vector<MeasurementPoint>& points,
                                                         const ForceCurve& raw_curve,
                                                         const FluctuationSpec& spec);

struct FitResult {
  ModelId model_id;
  double v_rms_sq;             // V^2, may be negative under model mismatch
  double a;                    // N
  Eigen::Matrix2d covariance;  // (v_rms_sq, a), SI
  double chi2_reduced;
  int n_points;

  // sqrt(v_rms_sq) when v_rms_sq >= 0.
  std::optional<double> v_rms() const;
  // Propagated standard error of v_rms, when defined and nonzero.
  std::optional<double> v_rms_sigma() const;
};

// Weighted linear fit of F_i - curve(d_i) on the basis
// {pi eps0 R / d_i (1 + (delta/d_i)^2), 1}. The curve is evaluated once per
// distinct separation, spread over `threads` workers.
FitResult fit_patch_and_offset(const std::vector<MeasurementPoint>& points, const ModelCurve& curve,
                               double radius, double delta, unsigned threads = 1);

// Independent fits, sorted by ascending reduced chi^2 (stable on ties).
std::vector<FitResult> discriminate_models(const std::vector<MeasurementPoint>& points,
                                           const std::vector<ModelCurve>& curves, double radius, double delta,
                                           unsigned threads = 1);

// Measurement CSV: `separation_um,force_pn,sigma_pn`.
std::vector<MeasurementPoint> load_measurement_csv(const std::filesystem::path& path);
void write_measurement_csv(std::ostream& out, const std::vector<MeasurementPoint>& points);

// "Drude300K: V_rms = 5.40 mV, a = -3.02 pN, reduced chi^2 = 1.04"
std::string summary_line(const FitResult& r);

}  // namespace casimir
