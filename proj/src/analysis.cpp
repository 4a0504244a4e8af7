#include "casimir/analysis.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/csv.hpp"
#include "casimir/errors.hpp"
#include "casimir/parallel.hpp"

namespace casimir {

namespace {

constexpr double kMicron = 1e-6;
constexpr double kPiconewton = 1e-12;

struct ModelTraits {
  ThermalFamily family;
  bool thermal;
};

ModelTraits traits(ModelId id) {
  switch (id) {
    case ModelId::Drude300K: return {ThermalFamily::Drude, true};
    case ModelId::Plasma300K: return {ThermalFamily::Plasma, true};
    case ModelId::DrudeT0: return {ThermalFamily::Drude, false};
    case ModelId::PlasmaT0: return {ThermalFamily::Plasma, false};
  }
  throw DomainError("unknown model id");
}

bool iequals(std::string_view a, std::string_view b) {
  return std::ranges::equal(a, b, [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

void check_points(const std::vector<MeasurementPoint>& points) {
  for (const auto& p : points) {
    if (!(p.d > 0.0) || !std::isfinite(p.d)) throw DomainError("measurement separation must be positive");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw DomainError("measurement sigma must be positive");
    if (!std::isfinite(p.F)) throw DomainError("measurement force must be finite");
  }
}

}  // namespace

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::Drude300K: return "Drude300K";
    case ModelId::Plasma300K: return "Plasma300K";
    case ModelId::DrudeT0: return "DrudeT0";
    case ModelId::PlasmaT0: return "PlasmaT0";
  }
  return "unknown";
}

ModelId parse_model_id(std::string_view name) {
  for (ModelId id : kAllModels) {
    if (iequals(name, to_string(id))) return id;
  }
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected Drude300K, Plasma300K, DrudeT0 or PlasmaT0)");
}

ForceCurve raw_casimir_curve(ModelId id, const TheoryConfig& theory) {
  const auto [family, thermal] = traits(id);
  auto model = make_material_model(family, theory.material, theory.table, theory.tail_exponent);
  const double temperature = thermal ? theory.temperature : 0.0;
  return [model = std::move(model), temperature, radius = theory.radius, spec = theory.quadrature](double d) {
    return casimir_force(d, temperature, radius, model, spec);
  };
}

ModelCurve make_model_curve(ModelId id, const TheoryConfig& theory, double delta) {
  ForceCurve raw = raw_casimir_curve(id, theory);
  return {id, [raw = std::move(raw), delta](double d) { return fluctuation_corrected_force(raw, d, delta); }};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log grid needs 0 < lo <= hi");
  if (n < 1) throw DomainError("log grid needs at least one point");
  if (n == 1) {
    if (lo != hi) throw DomainError("a one-point grid needs lo == hi");
    return {lo};
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> log_bin_edges(const std::vector<double>& grid) {
  if (grid.size() < 2) throw DomainError("bin edges need at least two grid points");
  std::vector<double> edges;
  edges.reserve(grid.size() + 1);
  edges.push_back(grid[0] * std::sqrt(grid[0] / grid[1]));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) edges.push_back(std::sqrt(grid[i] * grid[i + 1]));
  const std::size_t m = grid.size() - 1;
  edges.push_back(grid[m] * std::sqrt(grid[m] / grid[m - 1]));
  return edges;
}

std::vector<MeasurementPoint> bin_points(const std::vector<MeasurementPoint>& points,
                                         const std::vector<double>& edges) {
  if (edges.size() < 2) throw DomainError("binning needs at least two edges");
  if (!std::ranges::is_sorted(edges, std::less_equal<>{}) || std::ranges::adjacent_find(edges) != edges.end()) {
    throw DomainError("bin edges must be strictly increasing");
  }
  check_points(points);
  const std::size_t nbins = edges.size() - 1;
  struct Acc {
    double w = 0.0, wf = 0.0, wd = 0.0;
  };
  std::vector<Acc> acc(nbins);
  for (const auto& p : points) {
    if (p.d < edges.front() || p.d > edges.back()) {
      throw AssignmentError(fmt::format("point at d = {} m lies outside the bin edges [{}, {}]", p.d,
                                        edges.front(), edges.back()));
    }
    auto it = std::ranges::upper_bound(edges, p.d);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    bin = std::min(bin, nbins - 1);
    const double w = 1.0 / (p.sigma * p.sigma);
    acc[bin].w += w;
    acc[bin].wf += w * p.F;
    acc[bin].wd += w * p.d;
  }
  std::vector<MeasurementPoint> out;
  for (const auto& a : acc) {
    if (a.w == 0.0) continue;
    out.push_back({a.wd / a.w, a.wf / a.w, 1.0 / std::sqrt(a.w)});
  }
  return out;
}

std::vector<MeasurementPoint> add_correction_uncertainty(const std::vector<MeasurementPoint>& points,
                                                         const ForceCurve& raw_curve,
                                                         const FluctuationSpec& spec) {
  std::map<double, double> cache;
  std::vector<MeasurementPoint> out = points;
  for (auto& p : out) {
    auto it = cache.find(p.d);
    if (it == cache.end()) it = cache.emplace(p.d, correction_uncertainty(raw_curve, p.d, spec)).first;
    p.sigma = std::hypot(p.sigma, it->second);
  }
  return out;
}

std::optional<double> FitResult::v_rms() const {
  if (v_rms_sq < 0.0) return std::nullopt;
  return std::sqrt(v_rms_sq);
}

std::optional<double> FitResult::v_rms_sigma() const {
  if (!(v_rms_sq > 0.0)) return std::nullopt;
  return std::sqrt(covariance(0, 0)) / (2.0 * std::sqrt(v_rms_sq));
}

FitResult fit_patch_and_offset(const std::vector<MeasurementPoint>& points, const ModelCurve& curve,
                               double radius, double delta, unsigned threads) {
  if (points.size() < 3) {
    throw ArityError("the patch/offset fit needs at least 3 points, got " + std::to_string(points.size()));
  }
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  if (!(delta >= 0.0)) throw DomainError("separation fluctuation must be non-negative");
  check_points(points);

  std::vector<double> distinct;
  distinct.reserve(points.size());
  for (const auto& p : points) distinct.push_back(p.d);
  std::ranges::sort(distinct);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw RankError("all points share one separation; V_rms and a are degenerate");

  const auto theory = parallel_map(distinct, curve.evaluator, threads);

  const auto n = static_cast<Eigen::Index>(points.size());
  const double k = constants::pi * constants::eps0 * radius;
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    const auto j = static_cast<std::size_t>(std::ranges::lower_bound(distinct, p.d) - distinct.begin());
    const double ratio = delta / p.d;
    const double w = 1.0 / p.sigma;
    A(i, 0) = w * k / p.d * (1.0 + ratio * ratio);
    A(i, 1) = w;
    b(i) = w * (p.F - theory[j]);
  }
  // Column scaling keeps the rank decision independent of units.
  const Eigen::Vector2d scale(A.col(0).norm(), A.col(1).norm());
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
  qr.setThreshold(1e-12);
  if (qr.rank() < 2) throw RankError("normal equations are singular for this separation set");
  const Eigen::Vector2d ps = qr.solve(b);
  const Eigen::Vector2d p = ps.cwiseQuotient(scale);
  const Eigen::Matrix2d cov_s = (As.transpose() * As).inverse();

  FitResult r;
  r.model_id = curve.id;
  r.v_rms_sq = p(0);
  r.a = p(1);
  r.covariance = scale.cwiseInverse().asDiagonal() * cov_s * scale.cwiseInverse().asDiagonal();
  r.chi2_reduced = (As * ps - b).squaredNorm() / static_cast<double>(n - 2);
  r.n_points = static_cast<int>(n);
  return r;
}

std::vector<FitResult> discriminate_models(const std::vector<MeasurementPoint>& points,
                                           const std::vector<ModelCurve>& curves, double radius, double delta,
                                           unsigned threads) {
  std::vector<FitResult> results;
  results.reserve(curves.size());
  for (const auto& c : curves) results.push_back(fit_patch_and_offset(points, c, radius, delta, threads));
  std::ranges::stable_sort(results, {}, &FitResult::chi2_reduced);
  return results;
}

std::vector<MeasurementPoint> load_measurement_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path, {"separation_um", "force_pn", "sigma_pn"});
  std::vector<MeasurementPoint> out;
  out.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const auto where = path.string() + " row " + std::to_string(csv.line_numbers[i]);
    if (!(r[0] > 0.0)) throw ValidationError(where + ": separation_um must be positive");
    if (!(r[2] > 0.0)) throw ValidationError(where + ": sigma_pn must be positive");
    out.push_back({r[0] * kMicron, r[1] * kPiconewton, r[2] * kPiconewton});
  }
  return out;
}

void write_measurement_csv(std::ostream& out, const std::vector<MeasurementPoint>& points) {
  out << "separation_um,force_pn,sigma_pn\n";
  for (const auto& p : points) write_csv_row(out, {p.d / kMicron, p.F / kPiconewton, p.sigma / kPiconewton});
}

std::string summary_line(const FitResult& r) {
  const auto v = r.v_rms();
  const std::string v_text = v ? fmt::format("{:.2f} mV", *v * 1e3) : std::string("undefined");
  return fmt::format("{}: V_rms = {}, a = {:.2f} pN, reduced chi^2 = {:.3g}", to_string(r.model_id), v_text,
                     r.a / kPiconewton, r.chi2_reduced);
}

}  // namespace casimir
