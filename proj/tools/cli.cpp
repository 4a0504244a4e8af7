#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "casimir/analysis.hpp"
#include "casimir/constants.hpp"
#include "casimir/csv.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/experiment.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/parallel.hpp"

namespace casimir::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kMicron = 1e-6;
constexpr double kPiconewton = 1e-12;
constexpr double kNanometre = 1e-9;

struct MaterialFlags {
  double omega_p_ev = 7.54;
  double gamma_ev = 0.051;
  std::string optical_table;
  double tail_exponent = 3.0;
  double rel_tol = 1e-8;
  int max_matsubara = QuadratureSpec{}.max_matsubara;
};

struct GridFlags {
  double dmin_um = 0.7;
  double dmax_um = 7.0;
  int points = 30;
};

void add_material_flags(CLI::App* cmd, MaterialFlags& m) {
  cmd->add_option("--omega-p", m.omega_p_ev, "Plasma frequency, eV")->capture_default_str();
  cmd->add_option("--gamma", m.gamma_ev, "Relaxation frequency, eV")->capture_default_str();
  cmd->add_option("--optical-table", m.optical_table, "CSV photon_energy_ev,eps_imag")->check(CLI::ExistingFile);
  cmd->add_option("--tail-exponent", m.tail_exponent, "High-frequency tail exponent")->capture_default_str();
  cmd->add_option("--rel-tol", m.rel_tol, "Relative quadrature tolerance")->capture_default_str();
  cmd->add_option("--max-matsubara", m.max_matsubara, "Matsubara terms before giving up")->capture_default_str();
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--dmin", g.dmin_um, "Smallest separation, um")->capture_default_str();
  cmd->add_option("--dmax", g.dmax_um, "Largest separation, um")->capture_default_str();
  cmd->add_option("--points", g.points, "Number of log-spaced separations")->capture_default_str();
}

std::vector<double> grid_from(const GridFlags& g) {
  if (!(g.dmin_um > 0.0) || !(g.dmax_um >= g.dmin_um)) throw ValidationError("need 0 < --dmin <= --dmax");
  if (g.points < 1) throw ValidationError("--points must be at least 1");
  if (g.points == 1 && g.dmin_um != g.dmax_um) throw ValidationError("--points 1 needs --dmin equal to --dmax");
  if (g.points > 1 && g.dmin_um == g.dmax_um) throw ValidationError("--dmin equals --dmax; use --points 1");
  return log_grid(g.dmin_um * kMicron, g.dmax_um * kMicron, g.points);
}

json grid_json(const GridFlags& g) { return {{"dmin_um", g.dmin_um}, {"dmax_um", g.dmax_um}, {"points", g.points}}; }

std::optional<OpticalTable> table_from(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_optical_table(path);
}

QuadratureSpec quadrature_from(const MaterialFlags& m) {
  QuadratureSpec q;
  q.rel_tol = m.rel_tol;
  q.max_matsubara = m.max_matsubara;
  validate(q);
  return q;
}

TheoryConfig theory_from(const MaterialFlags& m, double radius, double temperature) {
  if (!(radius > 0.0)) throw ValidationError("--radius must be positive");
  if (!(temperature >= 0.0)) throw ValidationError("--temp must be non-negative");
  TheoryConfig t;
  t.radius = radius;
  t.temperature = temperature;
  t.material = {ev_to_angular_frequency(m.omega_p_ev), ev_to_angular_frequency(m.gamma_ev)};
  t.table = table_from(m.optical_table);
  t.tail_exponent = m.tail_exponent;
  t.quadrature = quadrature_from(m);
  return t;
}

json material_json(const MaterialFlags& m) {
  return {{"omega_p_ev", m.omega_p_ev},
          {"gamma_ev", m.gamma_ev},
          {"optical_table", m.optical_table.empty() ? json() : json(m.optical_table)},
          {"tail_exponent", m.tail_exponent},
          {"rel_tol", m.rel_tol},
          {"max_matsubara", m.max_matsubara}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << content;
  if (!f) throw ValidationError("failed writing " + path);
}

// CSV to the named file, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

struct Manifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  json summary;
};

// Written next to the first output file, or to the explicit path.
void write_manifest(const Manifest& m, const std::string& explicit_path) {
  std::string path = explicit_path;
  if (path.empty() && !m.outputs.empty()) path = m.outputs.front() + ".manifest.json";
  if (path.empty()) return;
  json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["constants_version"] = kConstantsVersion;
  j["tool_version"] = kToolVersion;
  j["seed"] = m.seed ? json(*m.seed) : json();
  if (!m.summary.is_null()) j["summary"] = m.summary;
  write_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- force

struct ForceOptions {
  std::string model = "drude";
  bool all_models = false;
  double temperature = 300.0;
  double radius = 0.156;
  double delta_nm = 0.0;
  GridFlags grid;
  MaterialFlags material;
  std::string output;
  std::string manifest;
};

void run_force(const ForceOptions& o, std::ostream& out) {
  const auto grid = grid_from(o.grid);
  const TheoryConfig theory = theory_from(o.material, o.radius, o.temperature);
  std::vector<ModelId> models;
  if (o.all_models) {
    if (o.temperature == 0.0) throw ValidationError("--all-models needs --temp > 0 for the thermal curves");
    models.assign(std::begin(kAllModels), std::end(kAllModels));
  } else {
    const bool thermal = o.temperature > 0.0;
    if (o.model == "drude") models.push_back(thermal ? ModelId::Drude300K : ModelId::DrudeT0);
    else models.push_back(thermal ? ModelId::Plasma300K : ModelId::PlasmaT0);
  }

  const unsigned threads = thread_count_from_env();
  std::ostringstream csv;
  if (o.all_models) csv << "model_id,";
  csv << "separation_um,force_pn,f_times_d_pn_um,f_times_d2_pn_um2\n";
  for (ModelId id : models) {
    const ModelCurve curve = make_model_curve(id, theory, o.delta_nm * kNanometre);
    const auto force = parallel_map(grid, curve.evaluator, threads);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d_um = grid[i] / kMicron;
      const double f_pn = force[i] / kPiconewton;
      if (o.all_models) csv << to_string(id) << ',';
      write_csv_row(csv, {d_um, f_pn, f_pn * d_um, f_pn * d_um * d_um});
    }
  }
  emit(o.output, csv.str(), out);

  Manifest m;
  m.command = "force";
  m.config = {{"model", o.all_models ? json("all") : json(o.model)},
              {"temperature_k", o.temperature},
              {"radius_m", o.radius},
              {"delta_nm", o.delta_nm},
              {"grid", grid_json(o.grid)},
              {"material", material_json(o.material)}};
  if (!o.material.optical_table.empty()) m.inputs.push_back(o.material.optical_table);
  if (!o.output.empty()) m.outputs.push_back(o.output);
  write_manifest(m, o.manifest);
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string sweeps_prefix;
  bool unbinned = false;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
}

void run_simulate(SimulateOptions o, std::ostream& out) {
  std::string config_text = "{}";
  if (!o.config.empty()) {
    config_text = read_file(o.config);
    // A manifest from an earlier run carries the resolved config and options.
    json doc;
    try {
      doc = json::parse(config_text);
    } catch (const json::parse_error& e) {
      throw ValidationError(o.config + " is not valid JSON: " + e.what());
    }
    if (doc.is_object() && doc.contains("command") && doc.contains("config")) {
      if (doc["command"] != "simulate") throw ValidationError(o.config + " is a manifest for another command");
      json cfg = doc["config"];
      if (cfg.contains("binned")) {
        if (!cfg["binned"].is_boolean()) throw ValidationError("manifest field 'binned' must be a boolean");
        o.unbinned = o.unbinned || !cfg["binned"].get<bool>();
        cfg.erase("binned");
      }
      config_text = cfg.dump();
    }
  }
  ParsedCampaignConfig parsed = parse_campaign_config(config_text);
  CampaignConfig& cfg = parsed.config;
  if (o.seed) cfg.seed = *o.seed;
  else if (parsed.seed) cfg.seed = *parsed.seed;
  else cfg.seed = entropy_seed();
  if (parsed.optical_table) cfg.theory.table = load_optical_table(*parsed.optical_table);
  validate(cfg);

  const unsigned threads = thread_count_from_env();
  const Campaign campaign = generate_campaign(cfg, threads);
  ReductionOptions reduction;
  reduction.radius = cfg.theory.radius;
  reduction.delta = cfg.delta_true;
  if (!o.unbinned) reduction.bin_edges = log_bin_edges(separation_schedule(cfg));
  const ReducedCampaign reduced = reduce_campaign(campaign.records, reduction);

  std::ostringstream csv;
  write_measurement_csv(csv, reduced.points);
  write_file(o.output, csv.str());

  Manifest m;
  m.command = "simulate";
  m.config = json::parse(campaign_config_json(cfg, parsed.optical_table));
  m.config["binned"] = !o.unbinned;
  if (!o.config.empty()) m.inputs.push_back(o.config);
  if (parsed.optical_table) m.inputs.push_back(parsed.optical_table->string());
  m.outputs.push_back(o.output);
  if (!o.sweeps_prefix.empty()) {
    const auto schedule = separation_schedule(cfg);
    for (const auto& [d, suffix] : {std::pair{schedule.front(), "_dmin.csv"}, std::pair{schedule.back(), "_dmax.csv"}}) {
      std::vector<SweepSample> samples;
      for (const auto& r : campaign.records) {
        if (r.nominal_d == d) samples.insert(samples.end(), r.samples.begin(), r.samples.end());
      }
      const std::string path = o.sweeps_prefix + suffix;
      write_sweep_csv(path, samples);
      m.outputs.push_back(path);
    }
  }
  m.seed = cfg.seed;
  m.summary = {{"records", campaign.records.size()},
               {"points", reduced.points.size()},
               {"separation_offset_m", reduced.separation_offset},
               {"v_m_at_dmax_v", reduced.calibration_max.V_m},
               {"drift_slope_n_per_sweep", reduced.drift_slope}};
  write_manifest(m, "");
  out << fmt::format("wrote {} points to {} (seed {})\n", reduced.points.size(), o.output, cfg.seed);
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string data;
  std::vector<std::string> models;
  bool bin = false;
  int bins = 30;
  double radius = 0.156;
  double temperature = 300.0;
  double delta_nm = 40.0;
  bool correction_uncertainty = false;
  double delta_sigma_nm = 20.0;
  MaterialFlags material;
  std::string output;
  std::string subtract;
  std::string manifest;
};

json cov_json(const FitResult& r) {
  return {{"v_rms_sq_v_rms_sq", r.covariance(0, 0)},
          {"v_rms_sq_a", r.covariance(0, 1)},
          {"a_a", r.covariance(1, 1)}};
}

void run_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<MeasurementPoint> points = load_measurement_csv(o.data);
  if (points.empty()) throw ValidationError(o.data + " has no data rows");
  if (o.bin) {
    if (o.bins < 1) throw ValidationError("--bins must be at least 1");
    const auto [lo, hi] = std::ranges::minmax(points, {}, &MeasurementPoint::d);
    std::vector<double> edges;
    if (lo.d == hi.d || o.bins == 1) {
      edges = {lo.d * (1.0 - 1e-9), hi.d * (1.0 + 1e-9)};
    } else {
      edges = log_bin_edges(log_grid(lo.d, hi.d, o.bins));
    }
    points = bin_points(points, edges);
  }
  if (!(o.temperature > 0.0)) throw ValidationError("--temp must be positive for the thermal models");
  const TheoryConfig theory = theory_from(o.material, o.radius, o.temperature);
  const double delta = o.delta_nm * kNanometre;

  std::vector<ModelId> ids;
  if (o.models.empty()) ids.assign(std::begin(kAllModels), std::end(kAllModels));
  for (const auto& name : o.models) ids.push_back(parse_model_id(name));

  const unsigned threads = thread_count_from_env();
  std::vector<FitResult> results;
  std::vector<ModelCurve> curves;
  for (ModelId id : ids) {
    curves.push_back(make_model_curve(id, theory, delta));
    auto pts = points;
    if (o.correction_uncertainty) {
      pts = add_correction_uncertainty(points, raw_casimir_curve(id, theory),
                                       {delta, o.delta_sigma_nm * kNanometre});
    }
    results.push_back(fit_patch_and_offset(pts, curves.back(), o.radius, delta, threads));
  }
  std::ranges::stable_sort(results, {}, &FitResult::chi2_reduced);

  json report;
  report["data"] = o.data;
  report["binned"] = o.bin;
  report["n_points"] = points.size();
  report["radius_m"] = o.radius;
  report["delta_m"] = delta;
  json list = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto v = r.v_rms();
    const auto vs = r.v_rms_sigma();
    list.push_back({{"rank", i + 1},
                    {"model_id", to_string(r.model_id)},
                    {"v_rms_mv", v ? json(*v * 1e3) : json()},
                    {"v_rms_sigma_mv", vs ? json(*vs * 1e3) : json()},
                    {"v_rms_sq", r.v_rms_sq},
                    {"a_pn", r.a / kPiconewton},
                    {"a_sigma_pn", std::sqrt(r.covariance(1, 1)) / kPiconewton},
                    {"chi2_reduced", r.chi2_reduced},
                    {"n_points", r.n_points},
                    {"covariance", cov_json(r)}});
  }
  report["results"] = list;
  emit(o.output, report.dump(2) + "\n", out);

  std::ostream& summary = o.output.empty() ? err : out;
  for (const auto& r : results) summary << summary_line(r) << '\n';

  Manifest m;
  m.command = "fit";
  m.config = {{"models", json::array()},
              {"bin", o.bin},
              {"bins", o.bins},
              {"radius_m", o.radius},
              {"temperature_k", o.temperature},
              {"delta_nm", o.delta_nm},
              {"correction_uncertainty", o.correction_uncertainty},
              {"delta_sigma_nm", o.delta_sigma_nm},
              {"material", material_json(o.material)}};
  for (ModelId id : ids) m.config["models"].push_back(to_string(id));
  m.inputs.push_back(o.data);
  if (!o.material.optical_table.empty()) m.inputs.push_back(o.material.optical_table);
  if (!o.output.empty()) m.outputs.push_back(o.output);

  if (!o.subtract.empty()) {
    const double k = constants::pi * constants::eps0 * o.radius;
    std::ostringstream csv;
    std::vector<double> distinct_d;
    for (const auto& p : points) distinct_d.push_back(p.d);
    std::ranges::sort(distinct_d);
    distinct_d.erase(std::unique(distinct_d.begin(), distinct_d.end()), distinct_d.end());
    csv << "model_id,separation_um,force_pn,sigma_pn,theory_pn\n";
    for (const auto& r : results) {
      const auto& curve = *std::ranges::find(curves, r.model_id, &ModelCurve::id);
      const auto theory_force = parallel_map(distinct_d, curve.evaluator, threads);
      for (const auto& p : points) {
        const auto slot = std::ranges::lower_bound(distinct_d, p.d) - distinct_d.begin();
        const double ratio = delta / p.d;
        const double patch = k * r.v_rms_sq / p.d * (1.0 + ratio * ratio);
        csv << to_string(r.model_id) << ',';
        write_csv_row(csv, {p.d / kMicron, (p.F - patch - r.a) / kPiconewton, p.sigma / kPiconewton,
                            theory_force[static_cast<std::size_t>(slot)] / kPiconewton});
      }
    }
    write_file(o.subtract, csv.str());
    m.outputs.push_back(o.subtract);
  }
  write_manifest(m, o.manifest);
}

// ---------------------------------------------------------------- band

struct BandOptions {
  std::string family = "drude";
  double omega_p_min = 6.85, omega_p_max = 9.00;
  double gamma_min = 0.02, gamma_max = 0.061;
  double omega_p = 7.54, gamma = 0.051;
  double temperature = 300.0;
  double radius = 0.156;
  GridFlags grid;
  std::string optical_table;
  double tail_exponent = 3.0;
  double rel_tol = 1e-8;
  int max_matsubara = QuadratureSpec{}.max_matsubara;
  std::string output;
  std::string manifest;
};

void run_band(const BandOptions& o, std::ostream& out) {
  const auto grid = grid_from(o.grid);
  if (!(o.radius > 0.0)) throw ValidationError("--radius must be positive");
  if (!(o.temperature >= 0.0)) throw ValidationError("--temp must be non-negative");
  BandSpec band;
  band.family = o.family == "drude" ? ThermalFamily::Drude : ThermalFamily::Plasma;
  band.omega_p_min = ev_to_angular_frequency(o.omega_p_min);
  band.omega_p_max = ev_to_angular_frequency(o.omega_p_max);
  band.gamma_min = ev_to_angular_frequency(o.gamma_min);
  band.gamma_max = ev_to_angular_frequency(o.gamma_max);
  band.nominal = DrudeParams{ev_to_angular_frequency(o.omega_p), ev_to_angular_frequency(o.gamma)};
  band.table = table_from(o.optical_table);
  band.tail_exponent = o.tail_exponent;
  QuadratureSpec q;
  q.rel_tol = o.rel_tol;
  q.max_matsubara = o.max_matsubara;
  validate(q);

  const auto rows = sensitivity_band(grid, o.temperature, o.radius, band, q, thread_count_from_env());
  std::ostringstream csv;
  csv << "separation_um,f_min_pn,f_center_pn,f_max_pn\n";
  for (const auto& r : rows) {
    write_csv_row(csv, {r.d / kMicron, r.f_min / kPiconewton, r.f_center / kPiconewton, r.f_max / kPiconewton});
  }
  emit(o.output, csv.str(), out);

  Manifest m;
  m.command = "band";
  m.config = {{"family", o.family},
              {"omega_p_range_ev", {o.omega_p_min, o.omega_p_max}},
              {"gamma_range_ev", {o.gamma_min, o.gamma_max}},
              {"nominal_ev", {o.omega_p, o.gamma}},
              {"temperature_k", o.temperature},
              {"radius_m", o.radius},
              {"grid", grid_json(o.grid)},
              {"optical_table", o.optical_table.empty() ? json() : json(o.optical_table)},
              {"tail_exponent", o.tail_exponent},
              {"rel_tol", o.rel_tol},
              {"max_matsubara", o.max_matsubara}};
  if (!o.optical_table.empty()) m.inputs.push_back(o.optical_table);
  if (!o.output.empty()) m.outputs.push_back(o.output);
  write_manifest(m, o.manifest);
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
  std::string sweep;
  double radius = 0.156;
  double delta_nm = 0.0;
  std::string output;
  std::string manifest;
};

void run_calibrate(const CalibrateOptions& o, std::ostream& out) {
  const auto samples = load_sweep_csv(o.sweep);
  const auto cal = calibrate_from_sweep(samples, o.radius);
  const double corrected = corrected_separation(cal.d, o.delta_nm * kNanometre);
  json j;
  j["sweep"] = o.sweep;
  j["n_samples"] = cal.n_samples;
  j["d_um"] = cal.d / kMicron;
  j["sigma_d_um"] = cal.sigma_d() / kMicron;
  j["d_corrected_um"] = corrected / kMicron;
  j["v_m_mv"] = cal.V_m * 1e3;
  j["sigma_v_m_mv"] = cal.sigma_V_m() * 1e3;
  j["f_residual_pn"] = cal.F_residual / kPiconewton;
  j["sigma_f_residual_pn"] = cal.sigma_F_residual() / kPiconewton;
  j["chi2"] = cal.chi2;
  emit(o.output, j.dump(2) + "\n", out);

  Manifest m;
  m.command = "calibrate";
  m.config = {{"radius_m", o.radius}, {"delta_nm", o.delta_nm}};
  m.inputs.push_back(o.sweep);
  if (!o.output.empty()) m.outputs.push_back(o.output);
  write_manifest(m, o.manifest);
}

int report(std::ostream& err, int code, const std::exception& e) {
  err << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-temperature Casimir force laboratory", "casimir_lab"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ForceOptions force;
  auto* force_cmd = app.add_subcommand("force", "Sphere-plane Casimir force on a separation grid");
  force_cmd->add_option("--model", force.model, "Low-frequency model")
      ->check(CLI::IsMember({"drude", "plasma"}))
      ->capture_default_str();
  force_cmd->add_flag("--all-models", force.all_models, "Emit all four models with a model_id column");
  force_cmd->add_option("--temp", force.temperature, "Temperature, K (0 selects the zero-temperature path)")
      ->capture_default_str();
  force_cmd->add_option("--radius", force.radius, "Sphere radius, m")->capture_default_str();
  force_cmd->add_option("--delta-nm", force.delta_nm, "Separation fluctuation correction, nm")->capture_default_str();
  add_grid_flags(force_cmd, force.grid);
  add_material_flags(force_cmd, force.material);
  force_cmd->add_option("-o,--output", force.output, "Output CSV (default stdout)");
  force_cmd->add_option("--manifest", force.manifest, "Manifest path (default <output>.manifest.json)");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate and reduce a virtual measurement campaign");
  sim_cmd->add_option("--config", sim.config, "Campaign JSON or an earlier simulate manifest")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "RNG seed (overrides the config)");
  sim_cmd->add_option("-o,--output", sim.output, "Measurement CSV")->required();
  sim_cmd->add_option("--sweeps-prefix", sim.sweeps_prefix, "Also write <prefix>_dmin.csv and <prefix>_dmax.csv");
  sim_cmd->add_flag("--unbinned", sim.unbinned, "Write one point per record instead of 30 bins");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit V_rms and offset for each theoretical model");
  fit_cmd->add_option("--data", fit.data, "Measurement CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--models", fit.models, "Subset of Drude300K Plasma300K DrudeT0 PlasmaT0");
  fit_cmd->add_flag("--bin", fit.bin, "Bin the data on a log grid before fitting");
  fit_cmd->add_option("--bins", fit.bins, "Number of bins for --bin")->capture_default_str();
  fit_cmd->add_option("--radius", fit.radius, "Sphere radius, m")->capture_default_str();
  fit_cmd->add_option("--temp", fit.temperature, "Temperature of the thermal models, K")->capture_default_str();
  fit_cmd->add_option("--delta-nm", fit.delta_nm, "rms separation fluctuation, nm")->capture_default_str();
  fit_cmd->add_flag("--correction-uncertainty", fit.correction_uncertainty,
                    "Add the fluctuation-correction uncertainty to sigma");
  fit_cmd->add_option("--delta-sigma-nm", fit.delta_sigma_nm, "Uncertainty of delta, nm")->capture_default_str();
  add_material_flags(fit_cmd, fit.material);
  fit_cmd->add_option("-o,--output", fit.output, "Fit report JSON (default stdout)");
  fit_cmd->add_option("--subtract", fit.subtract, "Residual Casimir force CSV per model");
  fit_cmd->add_option("--manifest", fit.manifest, "Manifest path (default <output>.manifest.json)");

  BandOptions band;
  auto* band_cmd = app.add_subcommand("band", "Force envelope over Drude parameter ranges");
  band_cmd->add_option("--family", band.family, "Low-frequency model")
      ->check(CLI::IsMember({"drude", "plasma"}))
      ->capture_default_str();
  band_cmd->add_option("--omega-p-min", band.omega_p_min, "eV")->capture_default_str();
  band_cmd->add_option("--omega-p-max", band.omega_p_max, "eV")->capture_default_str();
  band_cmd->add_option("--gamma-min", band.gamma_min, "eV")->capture_default_str();
  band_cmd->add_option("--gamma-max", band.gamma_max, "eV")->capture_default_str();
  band_cmd->add_option("--omega-p", band.omega_p, "Central plasma frequency, eV")->capture_default_str();
  band_cmd->add_option("--gamma", band.gamma, "Central relaxation frequency, eV")->capture_default_str();
  band_cmd->add_option("--temp", band.temperature, "Temperature, K")->capture_default_str();
  band_cmd->add_option("--radius", band.radius, "Sphere radius, m")->capture_default_str();
  add_grid_flags(band_cmd, band.grid);
  band_cmd->add_option("--optical-table", band.optical_table, "CSV photon_energy_ev,eps_imag")
      ->check(CLI::ExistingFile);
  band_cmd->add_option("--tail-exponent", band.tail_exponent, "High-frequency tail exponent")
      ->capture_default_str();
  band_cmd->add_option("--rel-tol", band.rel_tol, "Relative quadrature tolerance")->capture_default_str();
  band_cmd->add_option("--max-matsubara", band.max_matsubara, "Matsubara terms before giving up")
      ->capture_default_str();
  band_cmd->add_option("-o,--output", band.output, "Output CSV (default stdout)");
  band_cmd->add_option("--manifest", band.manifest, "Manifest path (default <output>.manifest.json)");

  CalibrateOptions calib;
  auto* calib_cmd = app.add_subcommand("calibrate", "Parabolic electrostatic calibration of one sweep");
  calib_cmd->add_option("--sweep", calib.sweep, "Sweep CSV voltage_v,force_n,sigma_n")
      ->required()
      ->check(CLI::ExistingFile);
  calib_cmd->add_option("--radius", calib.radius, "Sphere radius, m")->capture_default_str();
  calib_cmd->add_option("--delta-nm", calib.delta_nm, "rms separation fluctuation, nm")->capture_default_str();
  calib_cmd->add_option("-o,--output", calib.output, "Result JSON (default stdout)");
  calib_cmd->add_option("--manifest", calib.manifest, "Manifest path (default <output>.manifest.json)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*force_cmd) run_force(force, out);
    else if (*sim_cmd) run_simulate(sim, out);
    else if (*fit_cmd) run_fit(fit, out, err);
    else if (*band_cmd) run_band(band, out);
    else if (*calib_cmd) run_calibrate(calib, out);
  } catch (const ConvergenceError& e) {
    return report(err, kConvergence, e);
  } catch (const RankError& e) {
    return report(err, kDegenerate, e);
  } catch (const CalibrationError& e) {
    return report(err, kDegenerate, e);
  } catch (const ValidationError& e) {
    return report(err, kUsage, e);
  } catch (const std::domain_error& e) {
    return report(err, kUsage, e);
  } catch (const std::invalid_argument& e) {
    return report(err, kUsage, e);
  } catch (const std::out_of_range& e) {
    return report(err, kUsage, e);
  } catch (const nlohmann::json::exception& e) {
    return report(err, kUsage, e);
  } catch (const std::exception& e) {
    return report(err, kFailure, e);
  }
  return kOk;
}

}  // namespace casimir::cli
