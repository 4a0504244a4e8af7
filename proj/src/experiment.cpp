#include "casimir/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <utility>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"

namespace casimir {

namespace {

// Recorded uncertainty when the campaign is noiseless.
constexpr double kSigmaFloor = 1e-15;

double recorded_sigma(const CampaignConfig& c) { return c.noise_sigma > 0.0 ? c.noise_sigma : kSigmaFloor; }

double weighted_offset(const std::vector<std::pair<double, double>>& values) {
  double w = 0.0, wx = 0.0, plain = 0.0;
  for (const auto& [x, sigma] : values) {
    plain += x;
    if (sigma > 0.0 && std::isfinite(sigma)) {
      w += 1.0 / (sigma * sigma);
      wx += x / (sigma * sigma);
    }
  }
  if (w == 0.0) return plain / static_cast<double>(values.size());
  return wx / w;
}

}  // namespace

std::vector<double> default_sweep_voltages() {
  std::vector<double> v(11);
  for (int i = 0; i < 11; ++i) v[static_cast<std::size_t>(i)] = (i - 5) / 100.0;
  return v;
}

void validate(const CampaignConfig& c) {
  if (!(c.d_min > 0.0) || !(c.d_max > c.d_min)) throw ValidationError("campaign needs 0 < d_min < d_max");
  if (c.n_separations < 2) throw ValidationError("campaign needs n_separations >= 2");
  if (c.n_sweeps < 1) throw ValidationError("campaign needs n_sweeps >= 1");
  const std::set<double> distinct(c.sweep_voltages.begin(), c.sweep_voltages.end());
  if (distinct.size() < 4) throw ValidationError("sweep_voltages needs at least 4 distinct values");
  for (double v : c.sweep_voltages) {
    if (!std::isfinite(v)) throw ValidationError("sweep_voltages must be finite");
  }
  if (!(c.noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be non-negative");
  if (!(c.delta_true >= 0.0)) throw ValidationError("delta_true must be non-negative");
  if (!(c.d_min > 5.0 * c.delta_true)) throw ValidationError("delta_true must be below d_min / 5");
  if (!(c.theory.radius > 0.0)) throw ValidationError("radius must be positive");
  if (!(c.theory.temperature > 0.0)) throw ValidationError("temperature must be positive");
  for (double x : {c.v_rms_true, c.v_m_true, c.v_m_variation, c.offset_a_true, c.drift_rate}) {
    if (!std::isfinite(x)) throw ValidationError("campaign parameters must be finite");
  }
  validate(c.theory.quadrature);
}

std::vector<double> separation_schedule(const CampaignConfig& config) {
  return log_grid(config.d_min, config.d_max, config.n_separations);
}

double minimizing_potential(const CampaignConfig& c, double d) {
  const double t = std::log(d / c.d_max) / std::log(c.d_min / c.d_max);
  return c.v_m_true + c.v_m_variation * t;
}

Campaign generate_campaign(const CampaignConfig& config, unsigned threads) {
  validate(config);
  const ModelCurve truth = make_model_curve(config.truth_model, config.theory, config.delta_true);
  return generate_campaign(config, truth.evaluator, threads);
}

Campaign generate_campaign(const CampaignConfig& config, const ForceCurve& truth, unsigned threads) {
  validate(config);
  const auto schedule = separation_schedule(config);
  const auto truth_force = parallel_map(schedule, truth, threads);
  const double radius = config.theory.radius;
  const double delta = config.delta_true;
  const double sigma = recorded_sigma(config);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Campaign out;
  out.records.reserve(schedule.size() * static_cast<std::size_t>(config.n_sweeps));
  for (int sweep = 0; sweep < config.n_sweeps; ++sweep) {
    for (std::size_t j = 0; j < schedule.size(); ++j) {
      const double d = schedule[j];
      const double ratio = delta / d;
      const double v_m = minimizing_potential(config, d);
      const double base = truth_force[j] + patch_force(d, radius, config.v_rms_true, delta) +
                          config.offset_a_true + config.drift_rate * sweep;
      const bool full = j == 0 || j + 1 == schedule.size();
      SweepRecord rec{d, {}, sweep};
      const auto emit = [&](double V) {
        const double bias = bias_force(d, radius, V, v_m) * (1.0 + ratio * ratio);
        rec.samples.push_back({V, base + bias + config.noise_sigma * normal(rng), sigma});
      };
      if (full) {
        for (double V : config.sweep_voltages) emit(V);
      } else {
        emit(config.v_m_true);
      }
      if (full) {
        const auto cal = calibrate_from_sweep(rec.samples, radius);
        out.points.push_back({d, cal.F_residual, cal.sigma_F_residual()});
      } else {
        out.points.push_back({d, rec.samples[0].F, rec.samples[0].sigma_F});
      }
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

DriftFit subtract_drift(const std::vector<SweepRecord>& records) {
  std::set<int> sweeps;
  for (const auto& r : records) sweeps.insert(r.sweep_index);
  if (sweeps.size() < 2) {
    throw ArityError("drift subtraction needs at least 2 sweeps, got " + std::to_string(sweeps.size()));
  }
  struct Group {
    double w = 0.0, wi = 0.0, wf = 0.0;
  };
  using Key = std::pair<double, double>;
  std::map<Key, Group> groups;
  for (const auto& r : records) {
    for (const auto& s : r.samples) {
      if (!(s.sigma_F > 0.0)) throw ValidationError("sweep sample sigma must be positive");
      const double w = 1.0 / (s.sigma_F * s.sigma_F);
      auto& g = groups[{r.nominal_d, s.V}];
      g.w += w;
      g.wi += w * r.sweep_index;
      g.wf += w * s.F;
    }
  }
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : records) {
    for (const auto& s : r.samples) {
      const auto& g = groups.at({r.nominal_d, s.V});
      const double w = 1.0 / (s.sigma_F * s.sigma_F);
      const double dx = r.sweep_index - g.wi / g.w;
      sxx += w * dx * dx;
      sxy += w * dx * (s.F - g.wf / g.w);
    }
  }
  if (!(sxx > 0.0)) throw RankError("no condition was measured in more than one sweep");

  DriftFit fit;
  fit.slope = sxy / sxx;
  fit.slope_sigma = 1.0 / std::sqrt(sxx);
  fit.records = records;
  for (auto& r : fit.records) {
    for (auto& s : r.samples) s.F -= fit.slope * r.sweep_index;
  }
  return fit;
}

ReducedCampaign reduce_campaign(const std::vector<SweepRecord>& records, const ReductionOptions& options) {
  if (records.empty()) throw ArityError("campaign has no records");
  ReducedCampaign out{};
  std::vector<SweepRecord> work = records;
  if (options.remove_drift) {
    auto drift = subtract_drift(records);
    work = std::move(drift.records);
    out.drift_slope = drift.slope;
    out.drift_slope_sigma = drift.slope_sigma;
  }

  std::map<double, std::vector<SweepSample>> pooled;
  for (const auto& r : work) {
    if (r.is_full_sweep()) {
      auto& dst = pooled[r.nominal_d];
      dst.insert(dst.end(), r.samples.begin(), r.samples.end());
    }
  }
  if (pooled.size() < 2) throw ArityError("calibration needs full sweeps at two separations");
  const auto& [d_lo, s_lo] = *pooled.begin();
  const auto& [d_hi, s_hi] = *pooled.rbegin();
  out.calibration_min = calibrate_from_sweep(s_lo, options.radius);
  out.calibration_max = calibrate_from_sweep(s_hi, options.radius);

  const auto calibrated = [&](const CalibrationResult& cal) {
    const double d = options.correct_separation ? corrected_separation(cal.d, options.delta) : cal.d;
    return d;
  };
  out.separation_offset = weighted_offset({
      {calibrated(out.calibration_min) - d_lo, out.calibration_min.sigma_d()},
      {calibrated(out.calibration_max) - d_hi, out.calibration_max.sigma_d()},
  });

  std::vector<MeasurementPoint> points;
  points.reserve(work.size());
  for (const auto& r : work) {
    const double d = r.nominal_d + out.separation_offset;
    if (r.is_full_sweep()) {
      const auto cal = calibrate_from_sweep(r.samples, options.radius);
      points.push_back({d, cal.F_residual, cal.sigma_F_residual()});
    } else {
      points.push_back({d, r.samples[0].F, r.samples[0].sigma_F});
    }
  }
  out.points = options.bin_edges ? bin_points(points, *options.bin_edges) : std::move(points);
  return out;
}

ParsedCampaignConfig parse_campaign_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");

  ParsedCampaignConfig out;
  auto& c = out.config;
  static const std::set<std::string> known = {
      "d_min",         "d_max",       "n_separations", "n_sweeps",      "sweep_voltages", "truth_model",
      "v_rms_true",    "v_m_true",    "v_m_variation", "offset_a_true", "noise_sigma",    "drift_rate",
      "delta_true",    "seed",        "radius",        "temperature",   "omega_p_ev",     "gamma_ev",
      "optical_table", "tail_exponent", "rel_tol"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError("unknown config field '" + key + "'");
  }

  const auto number = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ValidationError(std::string("config field '") + key + "' must be a number");
    dst = j[key].get<double>();
  };
  const auto integer = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      throw ValidationError(std::string("config field '") + key + "' must be an integer");
    }
    dst = j[key].get<int>();
  };

  number("d_min", c.d_min);
  number("d_max", c.d_max);
  integer("n_separations", c.n_separations);
  integer("n_sweeps", c.n_sweeps);
  if (j.contains("sweep_voltages")) {
    const auto& v = j["sweep_voltages"];
    if (!v.is_array()) throw ValidationError("config field 'sweep_voltages' must be an array");
    c.sweep_voltages.clear();
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError("sweep_voltages entries must be numbers");
      c.sweep_voltages.push_back(x.get<double>());
    }
  }
  if (j.contains("truth_model")) {
    if (!j["truth_model"].is_string()) throw ValidationError("config field 'truth_model' must be a string");
    c.truth_model = parse_model_id(j["truth_model"].get<std::string>());
  }
  number("v_rms_true", c.v_rms_true);
  number("v_m_true", c.v_m_true);
  number("v_m_variation", c.v_m_variation);
  number("offset_a_true", c.offset_a_true);
  number("noise_sigma", c.noise_sigma);
  number("drift_rate", c.drift_rate);
  number("delta_true", c.delta_true);
  number("radius", c.theory.radius);
  number("temperature", c.theory.temperature);
  number("tail_exponent", c.theory.tail_exponent);
  number("rel_tol", c.theory.quadrature.rel_tol);
  double omega_p_ev = angular_frequency_to_ev(c.theory.material.omega_p);
  double gamma_ev = angular_frequency_to_ev(c.theory.material.gamma);
  number("omega_p_ev", omega_p_ev);
  number("gamma_ev", gamma_ev);
  try {
    c.theory.material = {ev_to_angular_frequency(omega_p_ev), ev_to_angular_frequency(gamma_ev)};
  } catch (const DomainError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError("config field 'seed' must be a non-negative integer");
    out.seed = j["seed"].get<std::uint64_t>();
    c.seed = *out.seed;
  }
  if (j.contains("optical_table") && !j["optical_table"].is_null()) {
    if (!j["optical_table"].is_string()) throw ValidationError("config field 'optical_table' must be a path");
    out.optical_table = j["optical_table"].get<std::string>();
  }
  return out;
}

std::string campaign_config_json(const CampaignConfig& c, const std::optional<std::filesystem::path>& optical_table) {
  nlohmann::ordered_json j;
  j["d_min"] = c.d_min;
  j["d_max"] = c.d_max;
  j["n_separations"] = c.n_separations;
  j["n_sweeps"] = c.n_sweeps;
  j["sweep_voltages"] = c.sweep_voltages;
  j["truth_model"] = std::string(to_string(c.truth_model));
  j["v_rms_true"] = c.v_rms_true;
  j["v_m_true"] = c.v_m_true;
  j["v_m_variation"] = c.v_m_variation;
  j["offset_a_true"] = c.offset_a_true;
  j["noise_sigma"] = c.noise_sigma;
  j["drift_rate"] = c.drift_rate;
  j["delta_true"] = c.delta_true;
  j["seed"] = c.seed;
  j["radius"] = c.theory.radius;
  j["temperature"] = c.theory.temperature;
  j["omega_p_ev"] = angular_frequency_to_ev(c.theory.material.omega_p);
  j["gamma_ev"] = angular_frequency_to_ev(c.theory.material.gamma);
  j["optical_table"] = optical_table ? nlohmann::ordered_json(optical_table->string()) : nlohmann::ordered_json();
  j["tail_exponent"] = c.theory.tail_exponent;
  j["rel_tol"] = c.theory.quadrature.rel_tol;
  return j.dump(2);
}

}  // namespace casimir
