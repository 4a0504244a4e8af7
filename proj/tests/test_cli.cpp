#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "casimir/csv.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using casimir::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result lab(std::vector<std::string> args) {
  args.insert(args.begin(), "casimir_lab");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::vector<double>> rows_of(const std::string& csv, const std::vector<std::string>& header) {
  std::istringstream in(csv);
  return casimir::parse_csv(in, header, "output").rows;
}

const std::vector<std::string> kForceHeader{"separation_um", "force_pn", "f_times_d_pn_um", "f_times_d2_pn_um2"};
const std::vector<std::string> kBandHeader{"separation_um", "f_min_pn", "f_center_pn", "f_max_pn"};
const std::vector<std::string> kPointHeader{"separation_um", "force_pn", "sigma_pn"};

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("casimir_cli_test_" + std::to_string(std::rand()) + "_" +
                                       std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const char* kSmallCampaign = R"({"n_sweeps": 20, "rel_tol": 1e-6})";

}  // namespace

TEST_CASE("force: grid contract and monotone decrease") {
  const auto r = lab({"force", "--model", "drude", "--temp", "300", "--dmin", "0.7", "--dmax", "7", "--points", "30"});
  REQUIRE(r.code == 0);
  CHECK(r.out.back() == '\n');
  const auto rows = rows_of(r.out, kForceHeader);
  REQUIRE(rows.size() == 30);
  CHECK(rows.front()[0] == doctest::Approx(0.7));
  CHECK(rows.back()[0] == doctest::Approx(7.0));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][1] < rows[i - 1][1]);
    CHECK(rows[i][2] == doctest::Approx(rows[i][1] * rows[i][0]));
  }
}

TEST_CASE("force: large-separation thermal asymptote") {
  const auto r = lab({"force", "--model", "drude", "--temp", "300", "--dmin", "50", "--dmax", "50", "--points", "1"});
  REQUIRE(r.code == 0);
  const auto rows = rows_of(r.out, kForceHeader);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0][3] / 97.05 - 1.0) < 0.01);
}

TEST_CASE("force: plasma exceeds Drude at zero temperature") {
  auto at = [](const char* model) {
    const auto r = lab({"force", "--model", model, "--temp", "0", "--dmin", "0.7", "--dmax", "0.7", "--points", "1"});
    REQUIRE(r.code == 0);
    return rows_of(r.out, kForceHeader).at(0)[1];
  };
  CHECK(at("plasma") > at("drude"));
}

TEST_CASE("force: all models and manifest") {
  Scratch tmp;
  const auto path = tmp / "curves.csv";
  const auto r = lab({"force", "--all-models", "--points", "5", "--rel-tol", "1e-6", "-o", path});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(path);
  CHECK(csv.starts_with("model_id,separation_um,force_pn,f_times_d_pn_um,f_times_d2_pn_um2\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  const auto manifest = nlohmann::json::parse(slurp(path + ".manifest.json"));
  CHECK(manifest["command"] == "force");
  CHECK(manifest["outputs"][0] == path);
  CHECK(manifest["seed"].is_null());
  CHECK(manifest.contains("constants_version"));
  CHECK(manifest.contains("tool_version"));
}

TEST_CASE("usage and validation errors exit with 2") {
  CHECK(lab({"force", "--model", "lorentz"}).code == 2);
  CHECK(lab({"force", "--points", "0"}).code == 2);
  CHECK(lab({"force", "--dmin", "-1"}).code == 2);
  CHECK(lab({"force", "--all-models", "--temp", "0"}).code == 2);
  CHECK(lab({"force", "--rel-tol", "0"}).code == 2);
  CHECK(lab({"frobnicate"}).code == 2);
  CHECK(lab({}).code == 2);
  CHECK(lab({"fit"}).code == 2);
  CHECK(lab({"fit", "--data", "/nonexistent/data.csv"}).code == 2);
  CHECK(lab({"fit", "--data", "/dev/null", "--models", "Lorentz300K"}).code == 2);
  CHECK(lab({"--version"}).code == 0);

  Scratch tmp;
  spit(tmp / "bad.json", R"({"n_sweeps": 0})");
  CHECK(lab({"simulate", "--config", tmp / "bad.json", "-o", tmp / "x.csv"}).code == 2);
  spit(tmp / "typo.json", R"({"noise": 1e-12})");
  const auto r = lab({"simulate", "--config", tmp / "typo.json", "-o", tmp / "x.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("noise") != std::string::npos);
  spit(tmp / "bad.csv", "separation_um,force_pn,sigma_pn\n1.0,abc,1\n");
  CHECK(lab({"fit", "--data", tmp / "bad.csv"}).code == 2);
}

TEST_CASE("quadrature failure exits with 3") {
  const auto r = lab({"force", "--max-matsubara", "2", "--points", "2"});
  CHECK(r.code == 3);
  CHECK(r.err.starts_with("error: "));
  CHECK(lab({"band", "--max-matsubara", "2", "--points", "2"}).code == 3);
  CHECK(lab({"force", "--max-matsubara", "0"}).code == 2);
}

TEST_CASE("simulate: default config, seeds and manifests") {
  Scratch tmp;
  const auto a = tmp / "a.csv", b = tmp / "b.csv", c = tmp / "c.csv", d = tmp / "d.csv";
  REQUIRE(lab({"simulate", "--seed", "11", "-o", a}).code == 0);
  const auto rows = rows_of(slurp(a), kPointHeader);
  CHECK(rows.size() == 30);
  const auto manifest = nlohmann::json::parse(slurp(a + ".manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["seed"] == 11);
  CHECK(manifest["config"]["seed"] == 11);
  CHECK(manifest["config"]["binned"] == true);

  spit(tmp / "small.json", kSmallCampaign);
  REQUIRE(lab({"simulate", "--config", tmp / "small.json", "--seed", "5", "-o", b}).code == 0);
  REQUIRE(lab({"simulate", "--config", tmp / "small.json", "--seed", "5", "-o", c}).code == 0);
  CHECK(slurp(b) == slurp(c));

  SUBCASE("omitted seed is drawn and recorded") {
    REQUIRE(lab({"simulate", "--config", tmp / "small.json", "-o", d}).code == 0);
    const auto m = nlohmann::json::parse(slurp(d + ".manifest.json"));
    REQUIRE(m["seed"].is_number_unsigned());
    const auto replay = tmp / "replay.csv";
    REQUIRE(lab({"simulate", "--config", d + ".manifest.json", "-o", replay}).code == 0);
    CHECK(slurp(replay) == slurp(d));
  }
  SUBCASE("unbinned output and sweep files replay from the manifest") {
    const auto u = tmp / "u.csv";
    const auto r = lab({"simulate", "--config", tmp / "small.json", "--seed", "9", "--unbinned", "--sweeps-prefix",
                        tmp / "sw", "-o", u});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("(seed 9)") != std::string::npos);
    CHECK(rows_of(slurp(u), kPointHeader).size() == 20 * 28 + 2 * 20);
    const auto replay = tmp / "u2.csv";
    REQUIRE(lab({"simulate", "--config", u + ".manifest.json", "-o", replay}).code == 0);
    CHECK(slurp(replay) == slurp(u));

    const auto cal = lab({"calibrate", "--sweep", tmp / "sw_dmax.csv", "--delta-nm", "40"});
    REQUIRE(cal.code == 0);
    const auto j = nlohmann::json::parse(cal.out);
    CHECK(j["n_samples"] == 20 * 11);
    CHECK(j["v_m_mv"].get<double>() == doctest::Approx(20.0).epsilon(0.01));
    CHECK(j["d_corrected_um"].get<double>() == doctest::Approx(7.0).epsilon(0.001));
  }
}

TEST_CASE("fit: ranking, report and residuals") {
  Scratch tmp;
  const auto data = tmp / "campaign.csv";
  REQUIRE(lab({"simulate", "--seed", "7", "--unbinned", "-o", data}).code == 0);
  const auto report_path = tmp / "report.json";
  const auto r = lab({"fit", "--data", data, "-o", report_path, "--subtract", tmp / "residual.csv"});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(report_path));
  const auto& results = report["results"];
  REQUIRE(results.size() == 4);
  CHECK(results[0]["model_id"] == "Drude300K");
  const double chi2 = results[0]["chi2_reduced"];
  CHECK(chi2 >= 0.5);
  CHECK(chi2 <= 1.6);
  for (std::size_t i = 1; i < 4; ++i) CHECK(results[i]["chi2_reduced"].get<double>() > 5.0);
  CHECK(results[0]["v_rms_mv"].get<double>() == doctest::Approx(5.4).epsilon(0.05));
  CHECK(r.out.starts_with("Drude300K: V_rms = "));
  CHECK(r.out.find("reduced chi^2 = ") != std::string::npos);

  const std::string residual = slurp(tmp / "residual.csv");
  CHECK(residual.starts_with("model_id,separation_um,force_pn,sigma_pn,theory_pn\n"));
  CHECK(residual.back() == '\n');
  const auto manifest = nlohmann::json::parse(slurp(report_path + ".manifest.json"));
  CHECK(manifest["inputs"][0] == data);
  CHECK(manifest["outputs"].size() == 2);

  const auto binned = lab({"fit", "--data", data, "--bin", "--models", "Drude300K"});
  REQUIRE(binned.code == 0);
  const auto j = nlohmann::json::parse(binned.out);
  CHECK(j["n_points"] == 30);
  CHECK(j["results"].size() == 1);
  CHECK(binned.err.starts_with("Drude300K"));
}

TEST_CASE("fit: noiseless campaign without fluctuations gives zero chi^2") {
  Scratch tmp;
  spit(tmp / "exact.json", R"({"n_sweeps": 10, "noise_sigma": 0, "delta_true": 0, "seed": 1})");
  REQUIRE(lab({"simulate", "--config", tmp / "exact.json", "-o", tmp / "exact.csv"}).code == 0);
  const auto r = lab({"fit", "--data", tmp / "exact.csv", "--models", "Drude300K", "--delta-nm", "0"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"][0]["chi2_reduced"].get<double>() < 1e-3);
  CHECK(j["results"][0]["v_rms_mv"].get<double>() == doctest::Approx(5.4).epsilon(1e-4));
}

TEST_CASE("fit: single separation is degenerate and exits with 4") {
  Scratch tmp;
  spit(tmp / "one.csv", "separation_um,force_pn,sigma_pn\n1.5,120,1\n1.5,121,1\n1.5,119,1\n");
  const auto r = lab({"fit", "--data", tmp / "one.csv", "--models", "Drude300K", "--rel-tol", "1e-6"});
  CHECK(r.code == 4);
}

TEST_CASE("band: ordering, degenerate ranges and width") {
  const auto r = lab({"band", "--dmin", "1", "--dmax", "1", "--points", "1", "--rel-tol", "1e-6"});
  REQUIRE(r.code == 0);
  const auto row = rows_of(r.out, kBandHeader).at(0);
  CHECK(row[1] <= row[2]);
  CHECK(row[2] <= row[3]);
  CHECK((row[3] - row[1]) / row[2] <= 0.05);

  const auto flat = lab({"band", "--points", "4", "--rel-tol", "1e-6", "--omega-p-min", "7.54", "--omega-p-max", "7.54",
                         "--gamma-min", "0.051", "--gamma-max", "0.051"});
  REQUIRE(flat.code == 0);
  for (const auto& f : rows_of(flat.out, kBandHeader)) {
    CHECK(f[1] == f[2]);
    CHECK(f[2] == f[3]);
  }
  CHECK(lab({"band", "--omega-p-min", "9", "--omega-p-max", "7"}).code == 2);
}

TEST_CASE("results do not depend on the thread count") {
  Scratch tmp;
  spit(tmp / "small.json", kSmallCampaign);
  auto run_with = [&](const char* threads, const std::string& tag) {
    setenv("CASIMIR_LAB_THREADS", threads, 1);
    const auto f = lab({"force", "--all-models", "--points", "6"});
    REQUIRE(f.code == 0);
    REQUIRE(lab({"simulate", "--config", tmp / "small.json", "--seed", "3", "-o", tmp / (tag + ".csv")}).code == 0);
    return f.out + slurp(tmp / (tag + ".csv"));
  };
  const auto one = run_with("1", "one");
  const auto many = run_with("4", "many");
  const auto automatic = run_with("0", "auto");
  unsetenv("CASIMIR_LAB_THREADS");
  CHECK(one == many);
  CHECK(one == automatic);
}
