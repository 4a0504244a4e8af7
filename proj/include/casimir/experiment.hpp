#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "casimir/analysis.hpp"
#include "casimir/electrostatics.hpp"

namespace casimir {

std::vector<double> default_sweep_voltages();  // 11 points, -50 mV .. 50 mV

struct CampaignConfig {
  double d_min = 0.7e-6;  // m
  double d_max = 7e-6;    // m
  int n_separations = 30;
  int n_sweeps = 383;
  std::vector<double> sweep_voltages = default_sweep_voltages();  // V
  ModelId truth_model = ModelId::Drude300K;
  TheoryConfig theory;         // geometry, temperature and material of the truth curve
  double v_rms_true = 5.4e-3;  // V
  double v_m_true = 20e-3;     // V, minimizing potential at d_max
  // Change of V_m between d_max and d_min, linear in ln d. Zero keeps V_m
  // constant so that the at-V_m samples carry no residual bias force.
  double v_m_variation = 0.0;    // V
  double offset_a_true = -3e-12;  // N
  double noise_sigma = 1e-12;     // N
  double drift_rate = 0.0;        // N per sweep
  double delta_true = 40e-9;      // m
  std::uint64_t seed = 0;
};

void validate(const CampaignConfig& config);

// The separation schedule: n_separations log-spaced values, ascending.
std::vector<double> separation_schedule(const CampaignConfig& config);

// V_m(d) seen by the simulated apparatus.
double minimizing_potential(const CampaignConfig& config, double d);

struct SweepRecord {
  double nominal_d;  // m
  std::vector<SweepSample> samples;
  int sweep_index;

  bool is_full_sweep() const { return samples.size() > 1; }
};

struct Campaign {
  std::vector<SweepRecord> records;
  // Raw per-record points at the nominal separations: the at-V_m sample, or
  // the parabola vertex of a full sweep.
  std::vector<MeasurementPoint> points;
};

// Each sweep visits every scheduled separation in ascending order. Full
// voltage sweeps are recorded at d_min and d_max, a single sample at the
// applied bias v_m_true elsewhere. Forces are
//   corrected truth + patch + bias (1 + (delta/d)^2) + offset + drift + noise
// drawn from one seeded stream in schedule order. The truth curve is
// evaluated once per separation, spread over `threads` workers.
Campaign generate_campaign(const CampaignConfig& config, unsigned threads = 1);

// Same, with the fluctuation-corrected truth force supplied directly.
Campaign generate_campaign(const CampaignConfig& config, const ForceCurve& truth, unsigned threads = 1);

struct DriftFit {
  std::vector<SweepRecord> records;  // drift removed
  double slope;                      // N per sweep
  double slope_sigma;                // N per sweep
};

// Weighted regression of force against sweep index, one intercept per
// (separation, voltage) condition and a common slope; the linear component
// is subtracted from every sample.
DriftFit subtract_drift(const std::vector<SweepRecord>& records);

struct ReductionOptions {
  double radius = 0.156;  // m
  double delta = 40e-9;   // m, used by the separation correction
  bool remove_drift = true;
  bool correct_separation = true;
  std::optional<std::vector<double>> bin_edges;
};

struct ReducedCampaign {
  std::vector<MeasurementPoint> points;
  CalibrationResult calibration_min;  // pooled over all sweeps at d_min
  CalibrationResult calibration_max;  // pooled over all sweeps at d_max
  double separation_offset;           // m, added to every nominal separation
  double drift_slope;                 // N per sweep (0 when not removed)
  double drift_slope_sigma;
};

// Drift removal, electrostatic calibration at the end separations, piezo
// offset from the calibrated separations, optional binning.
ReducedCampaign reduce_campaign(const std::vector<SweepRecord>& records, const ReductionOptions& options);

// JSON document with CampaignConfig field names in snake_case. Lengths and
// forces are SI; omega_p_ev and gamma_ev are in eV. A missing seed is
// reported as std::nullopt.
struct ParsedCampaignConfig {
  CampaignConfig config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> optical_table;
};

ParsedCampaignConfig parse_campaign_config(const std::string& json_text);
std::string campaign_config_json(const CampaignConfig& config,
                                 const std::optional<std::filesystem::path>& optical_table = std::nullopt);

}  // namespace casimir
