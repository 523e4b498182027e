#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli.hpp"
#include "psdflow/flow/evolution.hpp"
#include "psdflow/io.hpp"

namespace fs = std::filesystem;
using psdflow::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "psdflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("psdflow_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

double bulk_gap(const psdflow::io::CsvTable& t, double phi) {
  std::vector<double> lo, hi;
  for (const auto& r : t.rows) {
    if (psdflow::io::parse_double(r[0]) != phi) continue;
    lo.push_back(psdflow::io::parse_double(r[2]));
    hi.push_back(psdflow::io::parse_double(r[3]));
  }
  return lo.size() < 2 ? 0.0 : lo[1] - hi[0];
}

}  // namespace

TEST_CASE("phase prints the critical lambda") {
  const auto r = call({"phase", "--phi", "1", "--psi", "1", "--mu-rule", "inverse-lambda"});
  CHECK(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 4.0 / 27.0) < 1e-6);
  const auto j = call({"phase", "--phi", "1", "--psi", "1", "--mu-rule", "inverse-lambda", "--format", "json"});
  CHECK(std::abs(nlohmann::json::parse(j.out)["lambda_c"].get<double>() - 4.0 / 27.0) < 1e-6);
}

TEST_CASE("lowrank prints the overlap") {
  const auto r = call({"lowrank", "--lambda", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.5\n");
  CHECK(call({"lowrank", "--lambda", "0.5"}).out == "0\n");
}

TEST_CASE("asymptote sweep is flat below the critical lambda") {
  const auto r = call({"asymptote", "--phi", "1", "--psi", "1", "--mu-rule", "inverse-lambda", "--lambda-grid",
                       "0.05:3:60"});
  REQUIRE(r.code == 0);
  const auto t = psdflow::io::parse_csv(r.out);
  CHECK(t.rows.size() == 60);
  const auto lam = t.numeric_column("lambda");
  const auto mse = t.numeric_column("mse_inf");
  for (std::size_t i = 0; i < lam.size(); ++i) {
    CAPTURE(lam[i]);
    if (lam[i] < 4.0 / 27.0) {
      CHECK(std::abs(mse[i] - 2.0) < 1e-6);
    } else if (lam[i] > 0.2) {
      CHECK(mse[i] < 2.0);
    }
    if (i > 0) CHECK(mse[i] <= mse[i - 1] + 1e-12);
  }
}

TEST_CASE("density sweep writes one file set per phi") {
  const auto dir = scratch("density");
  const auto r = call({"density", "--lambda", "5", "--psi", "1", "--phi-list", "0.05,0.2,0.5", "--points", "801",
                       "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* phi : {"0.05", "0.2", "0.5"}) {
    CHECK(fs::exists(dir / ("density_P_phi" + std::string(phi) + ".csv")));
    CHECK(fs::exists(dir / ("density_Q_phi" + std::string(phi) + ".csv")));
    CHECK(fs::exists(dir / ("edges_phi" + std::string(phi) + ".json")));
  }
  CHECK(fs::exists(dir / "config.json"));
  const auto t = psdflow::io::parse_csv(r.out);
  CHECK(bulk_gap(t, 0.05) > 0.0);
  for (const auto& mass : t.numeric_column("mass_P")) CHECK(std::abs(mass - 1.0) < 1e-4);

  const auto weak = call({"density", "--lambda", "2", "--psi", "1", "--phi", "0.05", "--points", "801"});
  REQUIRE(weak.code == 0);
  CHECK(bulk_gap(psdflow::io::parse_csv(weak.out), 0.05) < bulk_gap(t, 0.05));
  fs::remove_all(dir);
}

TEST_CASE("invalid parameters exit 2 without output files") {
  const auto dir = scratch("invalid");
  const auto r = call({"density", "--phi", "-1", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("phi") != std::string::npos);
  CHECK(!fs::exists(dir));
  CHECK(call({"evolve", "--format", "xml"}).code == 2);
  CHECK(call({"evolve", "--times", "0:1"}).code == 2);
  CHECK(call({"simulate", "--integrator", "leapfrog"}).code == 2);
  CHECK(call({"phase", "--mu-rule", "inverse-lambda", "--mu", "1"}).code == 2);
  CHECK(call({"nothing"}).code == 2);
  CHECK(call({"evolve", "--phi"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit 3") {
  const auto r = call({"evolve", "--times", "0,1000"});
  CHECK(r.code == 3);
  CHECK(r.err.find("NonConvergence") != std::string::npos);
}

TEST_CASE("evolve output round-trips") {
  const auto r = call({"evolve", "--phi", "0.75", "--psi", "0.25", "--times", "0,0.5,1,2"});
  REQUIRE(r.code == 0);
  const auto back = psdflow::flow::parse_curve_csv(r.out);
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0};
  const auto curve = psdflow::flow::mse_curve(psdflow::ModelParams(0.75, 0.25, 1e4, 0.0), times);
  CHECK(back.q == curve.q);
  CHECK(*back.p == *curve.p);
  CHECK(back.times == times);
}

TEST_CASE("simulate is deterministic") {
  const std::vector<std::string> args = {"simulate", "--n", "40", "--trials", "3", "--tmax", "1", "--times",
                                         "0:1:5", "--seed", "9"};
  const auto a = call(args);
  const auto b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto dir = scratch("simulate");
  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", dir.string()});
  REQUIRE(call(with_out).code == 0);
  CHECK(psdflow::io::read_text(dir / "aggregate.csv") == a.out);
  CHECK(psdflow::io::read_csv(dir / "trials.csv").rows.size() == 15);
  const auto cfg = nlohmann::json::parse(psdflow::io::read_text(dir / "config.json"));
  CHECK(cfg["command"] == "simulate");
  CHECK(cfg["seed"] == 9);
  fs::remove_all(dir);
}

TEST_CASE("config file sits under explicit flags") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  psdflow::io::write_text(dir / "run.toml", "phi = 1\npsi = 1\nmu-rule = inverse-lambda\nlambda = 2\n");
  const auto from_file = call({"phase", "--config", (dir / "run.toml").string()});
  CHECK(std::abs(std::stod(from_file.out) - 4.0 / 27.0) < 1e-6);
  CHECK(call({"lowrank", "--config", (dir / "run.toml").string()}).out == "0.5\n");
  CHECK(call({"lowrank", "--config", (dir / "run.toml").string(), "--lambda", "4"}).out == "0.75\n");
  fs::remove_all(dir);
}

TEST_CASE("compare reproduces the q_t curve") {
  const auto r = call({"compare", "--n", "100", "--m", "25", "--d", "75", "--lambda", "1e4", "--mu", "0", "--trials",
                       "10", "--tmax", "3", "--times", "0:3:7"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["pass"] == true);
}

TEST_CASE("compare reproduces the long-time error") {
  const auto dir = scratch("compare");
  const auto r = call({"compare", "--target", "mse_inf", "--phi", "1", "--psi", "1", "--mu-rule", "inverse-lambda",
                       "--lambda-grid", "0.1,0.5,1,2", "--n", "400", "--trials", "10", "--tmax", "50", "--out",
                       dir.string()});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["pass"] == true);
  CHECK(psdflow::io::read_csv(dir / "compare.csv").rows.size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("compare rejects mismatched ratios") {
  const auto r = call({"compare", "--phi", "0.5", "--n", "100", "--d", "75"});
  CHECK(r.code == 2);
}

TEST_CASE("pencil check report") {
  const auto r = call({"pencil-check", "--phi", "1", "--psi", "1", "--lambda", "2", "--mu", "0.5", "--n", "40",
                       "--trials", "2", "--z-re", "0.5", "--z-im", "0.1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["route"] == "literal");
  CHECK(j["closed_form_deviation"].get<double>() < 1e-10);
  CHECK(j["per_block"].size() == 16);
  CHECK(call({"pencil-check", "--route", "sideways"}).code == 2);
}

TEST_CASE("grid parsing") {
  CHECK(psdflow::cli::parse_grid("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(psdflow::cli::parse_grid("0.1, 2") == std::vector<double>{0.1, 2.0});
  CHECK(psdflow::cli::parse_grid("4:9:1") == std::vector<double>{4.0});
  CHECK_THROWS(psdflow::cli::parse_grid("0:1:2.5"));
  CHECK_THROWS(psdflow::cli::parse_grid(""));
}
