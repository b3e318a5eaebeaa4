#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "ghost/config.hpp"
#include "ghost/figures.hpp"
#include "ghost/io.hpp"

using namespace ghost;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "ghost_unit_cli";

int run(const std::string& args) {
  fs::create_directories(kDir);
  const std::string cmd = std::string("\"") + GHOST_CLI_PATH + "\" " + args + " > \"" +
                          (kDir / "stdout.txt").string() + "\" 2> \"" +
                          (kDir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string out() { return slurp(kDir / "stdout.txt"); }

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.models = {"autocatalytic"};
  c.seed = 11;
  c.seed_given = true;
  c.omega = 60;
  c.replicates = 8;
  c.t_max = 1e3;
  c.phi_s_grid = "1e-3:1e-1:3log";
  c.probe_offsets = "-0.1:0.1:5";
  c.probe_replicates = 8;
  c.bisection_steps = 1;
  c.phi_grid = "1e-3:1e-1:3log";
  c.tol = 1e-9;
  c.ensemble.n_p0 = 6;
  c.fig2_x_grid = "0.05:2:20";
  c.fig3_phis = {1e-2};
  c.fig3_p0_grid = "-0.04:0.04:5";
  return c;
}

}  // namespace

TEST_CASE("cli models lists both critical points") {
  REQUIRE(run("models") == 0);
  const auto j = json::parse(out());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["name"] == "hill");
  CHECK(j[0]["eps_c"].get<double>() == doctest::Approx(0.5));
  CHECK(j[1]["x_c"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("cli exit codes") {
  CHECK(run("--version") == 0);
  CHECK(run("") == 2);
  CHECK(run("ssa run --omega 0 --seed 1") == 2);
  CHECK(run("ssa sweep --phi-grid 1:2 --eps-bar-s 0.2 --seed 1") == 2);
  CHECK(run("models --model lotka") == 2);
  CHECK(run("scaling flight --phi-grid 0,1e-3") == 2);
  CHECK(run("figures fig2 --models nope --out-dir " + (kDir / "x").string()) == 2);

  const auto flat = kDir / "flat.csv";
  write_text(flat, "phi,value\r\n1e-4,5\r\n1e-3,5\r\n1e-2,5\r\n1e-1,5\r\n");
  CHECK(run("scaling bend --in " + flat.string()) == 3);
  CHECK(run("wkb flight --nonsense") == 2);
}

TEST_CASE("cli ssa run writes json") {
  REQUIRE(run("ssa run --model autocatalytic --omega 50 --replicates 20 --phi 0.1 --seed 3") == 0);
  const auto j = json::parse(out());
  CHECK(j["replicates"] == 20);
  CHECK(j["n_censored"] == 0);
  CHECK(j["mean_TE"].get<double>() > 0.0);
}

TEST_CASE("cli fit recovers a slope and writes run manifests") {
  const auto curve = kDir / "pow.csv";
  std::string csv = "phi,value\r\n";
  for (double phi : {1e-5, 1e-4, 1e-3, 1e-2}) csv += format_number(phi) + "," +
                                               format_number(2.0 * std::pow(phi, -0.5)) + "\r\n";
  write_text(curve, csv);
  REQUIRE(run("scaling fit --in " + curve.string() + " --window 1e-5:1e-2") == 0);
  CHECK(json::parse(out())["slope"].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));

  const auto weights = kDir / "w.csv";
  REQUIRE(run("wkb weights --model hill --phi 1e-2 --p0-grid -0.01,0,0.01 --out " +
              weights.string()) == 0);
  const auto m = json::parse(slurp(weights.string() + ".manifest.json"));
  CHECK(m["outputs"][0]["sha256"] == sha256_file(weights));
  CHECK(read_csv(weights).rows.size() == 3);
}

TEST_CASE("figure 2 and 3 files and manifest") {
  const auto dir = kDir / "fig23";
  fs::remove_all(dir);
  const auto manifest = run_figures(tiny_config(), dir, {2, 3});
  CHECK(manifest.status == "ok");
  CHECK(manifest.outputs.size() == 4);
  for (const auto& o : manifest.outputs) CHECK(sha256_file(dir / o.file) == o.sha256);
  const auto t = read_csv(dir / "fig2_autocatalytic_0.csv");
  CHECK(t.header == std::vector<std::string>{"x", "p_H", "p_1", "p_2"});
  CHECK(t.rows.size() == 20);
  const auto w = read_csv(dir / "fig3_autocatalytic_0.csv");
  CHECK(w.rows.size() == 5);
  const auto j = json::parse(slurp(dir / "manifest.json"));
  CHECK(j["status"] == "ok");
  CHECK(j["seed"] == 11);
}

TEST_CASE("figure 1 is reproducible across thread counts") {
  auto c = tiny_config();
  c.threads = 1;
  const auto a = kDir / "fig1_a";
  const auto b = kDir / "fig1_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_figures(c, a, {1});
  c.threads = 3;
  run_figures(c, b, {1});
  for (const char* f : {"fig1_top.csv", "fig1_bottom.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(!read_csv(a / f).rows.empty());
  }
}

TEST_CASE("invalid figure configs fail before writing") {
  auto c = tiny_config();
  c.omega = 0;
  const auto dir = kDir / "bad";
  fs::remove_all(dir);
  CHECK_THROWS_AS(run_figures(c, dir, {2}), ConfigError);
  CHECK(!fs::exists(dir / "manifest.json"));
  CHECK_THROWS_AS(run_figures(tiny_config(), dir, {4}), ConfigError);
}
