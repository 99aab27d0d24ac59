#include <doctest.h>

#include "approx.hpp"

#include <cisim/cisim.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = CONFIG_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("cisim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const TempDir& dir, const std::string& name, const nlohmann::json& doc) {
  const auto p = dir.path / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run simulate(const std::string& args, const TempDir& scratch, const std::string& env = "") {
  const auto out = scratch.path / "stdout.txt", err = scratch.path / "stderr.txt";
  const std::string cmd = env + " '" + std::string(SIMULATE_EXE) + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("c api: config, run and summary") {
  cisim_config* cfg = nullptr;
  REQUIRE(cisim_config_load((kConfigs / "budget_cryogenic.json").c_str(), &cfg) == CISIM_OK);
  cisim_result* r = nullptr;
  REQUIRE(cisim_run(cfg, "budget", &r) == CISIM_OK);
  double t_star = 0.0, xi = 0.0;
  CHECK(cisim_result_scalar(r, "t_star_s", &t_star) == CISIM_OK);
  CHECK(cisim_result_scalar(r, "xi_star_m", &xi) == CISIM_OK);
  CHECK(t_star > 0.0);
  CHECK(xi > 0.0);
  CHECK(cisim_result_scalar(r, "no_such_key", &xi) != CISIM_OK);
  CHECK(cisim_result_artifact_count(r) >= 1);
  bool found = false;
  for (size_t i = 0; i < cisim_result_summary_count(r); ++i)
    if (std::string(cisim_result_summary_key(r, i)) == "regime_air") {
      found = true;
      CHECK(std::isnan(cisim_result_summary_value(r, i)));
      CHECK(std::string(cisim_result_summary_text(r, i)) == "SW");
    }
  CHECK(found);
  cisim_result_free(r);

  CHECK(cisim_config_set_number(cfg, "sphere.radius_um", 2.0) == CISIM_OK);
  CHECK(cisim_config_set_number(cfg, "sphere.radius_nm", 2.0) == CISIM_ERR_PARSE);
  CHECK(std::string(cisim_last_error_kind()) == "parse");
  CHECK(cisim_run(cfg, "bogus", &r) == CISIM_ERR_PARSE);
  CHECK(cisim_config_set_margin(cfg, -1.0) != CISIM_OK);
  cisim_config_free(cfg);
}

TEST_CASE("c api: error codes and helpers") {
  cisim_config* cfg = nullptr;
  CHECK(cisim_config_parse("{\"sphere\": {\"radius_um\": -1}}", &cfg) == CISIM_OK);
  cisim_result* r = nullptr;
  CHECK(cisim_run(cfg, "budget", &r) == CISIM_ERR_DOMAIN);
  CHECK(r == nullptr);
  CHECK(std::string(cisim_last_error()).size() > 0);
  cisim_config_free(cfg);
  CHECK(cisim_config_parse("{\"sphere\": {\"radius_parsec\": 1}}", &cfg) == CISIM_ERR_PARSE);
  CHECK(cisim_config_parse(nullptr, &cfg) == CISIM_ERR_INVALID_ARGUMENT);

  double v = 0.0;
  CHECK(cisim_convert(1.0, "mbar", "Pa", &v) == CISIM_OK);
  CHECK(v == rel_approx(100.0));
  CHECK(cisim_convert(1.0, "mbar", "K", &v) == CISIM_ERR_UNIT);
  CHECK(cisim_sphere_mass(1e-6, 8570.0, &v) == CISIM_OK);
  CHECK(v == rel_approx(4.0 / 3.0 * M_PI * 8570.0 * 1e-18).epsilon(1e-12));
  double g = 0.0, gx = 0.0, gp = 0.0;
  CHECK(cisim_ci_gain(1.0, 1.0, 0.5, &g, &gx, &gp) == CISIM_OK);
  CHECK(g == rel_approx(std::cosh(1.0)).epsilon(1e-12));
  double t = 0.0, xi = 0.0;
  CHECK(cisim_t_lambda(1e-15, 1e3, 0.0, &t, &xi) == CISIM_OK);
  CHECK(std::isinf(t));
  CHECK(cisim_t_lambda(-1.0, 1e3, 1.0, &t, &xi) == CISIM_ERR_DOMAIN);
}

TEST_CASE("cli: artifacts and determinism") {
  TempDir scratch, a, b;
  const auto cfg = (kConfigs / "reference_plan.json").string();
  REQUIRE(simulate("protocol --config '" + cfg + "' --out '" + a.path.string() + "'", scratch).code == 0);
  REQUIRE(simulate("protocol --config '" + cfg + "' --out '" + b.path.string() + "'", scratch).code == 0);
  for (const auto& e : fs::directory_iterator(a.path)) {
    const auto other = b.path / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
  }
  CHECK(fs::exists(a.path / "trace.csv"));
  CHECK(load_json(a.path / "summary.json").contains("visibility"));
}

TEST_CASE("cli: output directory from the environment") {
  TempDir scratch, out;
  const auto cfg = (kConfigs / "budget_cryogenic.json").string();
  const auto r = simulate("budget --config '" + cfg + "'", scratch, "SIMULATE_OUT_DIR='" + out.path.string() + "'");
  CHECK(r.code == 0);
  CHECK(fs::exists(out.path / "budget.txt"));
  CHECK(r.out.find("xi_star_m=") != std::string::npos);
}

TEST_CASE("cli: exit codes and error records") {
  TempDir scratch, out;
  const auto o = " --out '" + out.path.string() + "'";
  auto base = load_json(kConfigs / "budget_cryogenic.json");

  auto unknown = base;
  unknown["sphere"]["colour"] = 1;
  auto r = simulate("budget --config '" + write_config(scratch, "u.json", unknown).string() + "'" + o, scratch);
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error code=2 kind=parse message=\"", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  auto empty_axis = base;
  empty_axis["sweep"] = {{"axes", nlohmann::json::array({{{"key", "sphere.radius_um"}, {"start", 1}, {"stop", 2}, {"count", 0}}})}};
  r = simulate("sweep --config '" + write_config(scratch, "e.json", empty_axis).string() + "'" + o, scratch);
  CHECK(r.code == 2);

  auto capped = base;
  capped["sweep"] = {{"max_points", 10},
                     {"axes", nlohmann::json::array({{{"key", "sphere.radius_um"}, {"start", 1}, {"stop", 2}, {"count", 11}}})}};
  r = simulate("sweep --config '" + write_config(scratch, "c.json", capped).string() + "'" + o, scratch);
  CHECK(r.code == 4);
  CHECK(r.err.find("kind=resolution") != std::string::npos);

  auto domain = base;
  domain["sphere"]["radius_um"] = -1.0;
  r = simulate("budget --config '" + write_config(scratch, "d.json", domain).string() + "'" + o, scratch);
  CHECK(r.code == 3);
  CHECK(r.err.find("kind=domain") != std::string::npos);

  const auto cfg = (kConfigs / "budget_cryogenic.json").string();
  CHECK(simulate("teleport --config '" + cfg + "'" + o, scratch).code == 2);
  CHECK(simulate("budget --config /nonexistent.json" + o, scratch).code == 2);
  CHECK(simulate("budget --config '" + cfg + "' --margin -3" + o, scratch).code == 2);
}

TEST_CASE("cli: parallel and serial sweeps are byte-identical") {
  TempDir scratch, serial, parallel;
  const auto cfg = (kConfigs / "sweep_radius.json").string();
  REQUIRE(simulate("sweep --config '" + cfg + "' --workers 1 --out '" + serial.path.string() + "'", scratch).code == 0);
  REQUIRE(simulate("sweep --config '" + cfg + "' --workers 4 --out '" + parallel.path.string() + "'", scratch).code == 0);
  const auto s = slurp(serial.path / "sweep.csv");
  CHECK(s == slurp(parallel.path / "sweep.csv"));
  CHECK(read_csv(serial.path / "sweep.csv").size() == 1 + 3 * 4);
}

TEST_CASE("cli: a one-point sweep equals a single run") {
  TempDir scratch, single, swept;
  auto doc = load_json(kConfigs / "budget_cryogenic.json");
  const auto plain = write_config(scratch, "plain.json", doc);
  doc["sweep"] = {{"axes", nlohmann::json::array({{{"key", "sphere.radius_um"}, {"start", 1.0}, {"stop", 1.0}, {"count", 1}}})}};
  const auto one = write_config(scratch, "one.json", doc);
  REQUIRE(simulate("budget --config '" + plain.string() + "' --out '" + single.path.string() + "'", scratch).code == 0);
  REQUIRE(simulate("sweep --config '" + one.string() + "' --out '" + swept.path.string() + "'", scratch).code == 0);
  const auto b = read_csv(single.path / "budget.csv");
  const auto s = read_csv(swept.path / "sweep.csv");
  REQUIRE(s.size() == 2);
  REQUIRE(s[0].size() == b[0].size() + 1);
  CHECK(std::vector<std::string>(s[0].begin() + 1, s[0].end()) == b[0]);
  CHECK(std::vector<std::string>(s[1].begin() + 1, s[1].end()) == b[1]);
}

TEST_CASE("cli: coherence length follows R^-7/2 across a radius sweep") {
  // 1/gamma of air sets t_star here and the free expansion is far from t_Lambda.
  TempDir scratch, out;
  nlohmann::json doc = {
      {"sphere", {{"radius_um", 1.0}, {"density_kg_per_m3", 8570}}},
      {"trap", {{"frequency_Hz", 1e5}}},
      {"environment", {{"temperature_K", 0.1}, {"pressure_mbar", 1e-14}}},
      {"sweep", {{"axes", nlohmann::json::array({{{"key", "sphere.radius_um"}, {"start", 0.5}, {"stop", 2.0}, {"count", 3}, {"spacing", "log"}}})}}}};
  REQUIRE(simulate("sweep --config '" + write_config(scratch, "r.json", doc).string() + "' --out '" + out.path.string() + "'",
                   scratch).code == 0);
  const auto rows = read_csv(out.path / "sweep.csv");
  REQUIRE(rows.size() == 4);
  const auto ic = column(rows[0], "xi_star_m"), ir = column(rows[0], "sphere.radius_um");
  const double r0 = std::stod(rows[1][ir]), x0 = std::stod(rows[1][ic]);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double expected = x0 * std::pow(std::stod(rows[i][ir]) / r0, -3.5);
    CHECK(std::stod(rows[i][ic]) == rel_approx(expected).epsilon(0.01));
  }
}
