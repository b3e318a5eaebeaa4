#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "ghost/config.hpp"
#include "ghost/errors.hpp"
#include "ghost/io.hpp"

using namespace ghost;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ghost_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream(path) << j.dump();
}

}  // namespace

TEST_CASE("grid specifications") {
  const auto lin = parse_grid("0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[0] == 0.0);
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK(lin[4] == 1.0);

  const auto lg = parse_grid("1e-5:1e-1:5log");
  REQUIRE(lg.size() == 5);
  CHECK(lg.front() == 1e-5);
  CHECK(lg.back() == 1e-1);
  CHECK(lg[2] == doctest::Approx(1e-3).epsilon(1e-12));

  const auto list = parse_grid(" 0.1, 0.2 ,0.4");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 0.2);

  const auto sym = parse_grid("-0.08:0.08:81");
  CHECK(sym[40] == 0.0);
  for (std::size_t i = 0; i < sym.size(); ++i) CHECK(sym[i] == -sym[sym.size() - 1 - i]);

  CHECK(parse_grid("3:7:1") == std::vector<double>{3.0});
}

TEST_CASE("malformed grids are config errors") {
  for (const char* bad : {"", "  ", "1:2", "1:2:3:4", "a:1:3", "0:1:0", "0:1:xlog", "0:1:5log",
                          "-1:1:3log", "1,,2", "1,x", "0:1:-2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_grid(bad), ConfigError);
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-3, 9.99e-4, 1.127e-5, 123456.789, 1e300, -3e-200}) {
    const auto s = format_number(v);
    CAPTURE(s);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_number(1e-5) == "1e-05");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(0.0) == "0");
}

TEST_CASE("csv writes CRLF and quotes only when needed") {
  CsvTable t{{"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", "plain"}}};
  const auto s = t.to_string();
  CHECK(s == "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",plain\r\n");

  const auto path = scratch("round.csv");
  write_text(path, s);
  const auto back = read_csv(path);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}

TEST_CASE("csv reader accepts bare LF and skips blank lines") {
  const auto path = scratch("lf.csv");
  write_text(path, "phi,value\n1e-3,5\n\n1e-2,4\n");
  const auto t = read_csv(path);
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "4");
  write_text(path, "");
  CHECK_THROWS_AS(read_csv(path), ConfigError);
  CHECK_THROWS_AS(read_csv(scratch("missing.csv")), ConfigError);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto path = scratch("abc.txt");
  write_text(path, "abc");
  CHECK(sha256_file(path) == sha256_hex("abc"));
}

TEST_CASE("table schemas") {
  ScalingCurve c;
  c.provenance = Provenance::SSA;
  c.model = "hill";
  c.points.push_back({.phi = 1e-3, .value = 10.0, .spread = 0.5, .n = 7, .n_censored = 3});
  CHECK(curve_table(c).header ==
        std::vector<std::string>{"phi", "value", "spread", "n", "provenance", "model"});
  const auto ssa = ssa_sweep_table(c);
  CHECK(ssa.header == std::vector<std::string>{"phi_s", "mean_TE", "sem", "n", "n_censored"});
  CHECK(ssa.rows[0] == std::vector<std::string>{"0.001", "10", "0.5", "7", "3"});
  CHECK(orbit_table({}).header == std::vector<std::string>{"t", "x", "p", "S"});
  CHECK(phase_curves_table({}).header == std::vector<std::string>{"x", "p_H", "p_1", "p_2"});
  CHECK(weights_table({}).header ==
        std::vector<std::string>{"p0", "action", "log_weight", "weight"});
}

TEST_CASE("weights table leaves underflowed weights empty") {
  std::vector<PathWeightSample> s(2);
  s[0].p0 = -0.01;
  s[0].action = 0.5;
  s[0].log_weight = -500.0;
  s[0].weight = std::nullopt;
  s[1].p0 = 0.0;
  s[1].action = 0.0;
  s[1].log_weight = 0.0;
  s[1].weight = 1.0;
  const auto t = weights_table(s);
  CHECK(t.rows[0][3].empty());
  CHECK(t.rows[0][2] == "-500");
  CHECK(t.rows[1][3] == "1");
}

TEST_CASE("curves read back from both schemas") {
  ScalingCurve c;
  c.provenance = Provenance::HamiltonianEnsemble;
  c.model = "autocatalytic";
  for (double phi : {1e-4, 1e-3, 1e-2}) {
    c.points.push_back({.phi = phi, .value = 1.0 / std::sqrt(phi), .spread = 0.1, .n = 4});
  }
  const auto p1 = scratch("curve.csv");
  write_text(p1, curve_table(c).to_string());
  const auto r1 = read_curve(p1);
  CHECK(r1.model == "autocatalytic");
  CHECK(r1.provenance == Provenance::HamiltonianEnsemble);
  REQUIRE(r1.points.size() == 3);
  CHECK(r1.points[1].value == c.points[1].value);

  const auto p2 = scratch("sweep.csv");
  write_text(p2, ssa_sweep_table(c).to_string());
  const auto r2 = read_curve(p2);
  CHECK(r2.provenance == Provenance::SSA);
  CHECK(r2.points[2].phi == 1e-2);

  write_text(p2, "x,y\r\n1,2\r\n");
  CHECK_THROWS_AS(read_curve(p2), ConfigError);
  write_text(p2, "phi,value\r\n1,2,3\r\n");
  CHECK_THROWS_AS(read_curve(p2), ConfigError);
}

TEST_CASE("default config is valid and round-trips through json") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.seed = 42;
  c.omega = 250;
  c.fig3_phis = {1e-3};
  const json j = c;
  ExperimentConfig back;
  from_json(j, back);
  CHECK(back.seed == 42);
  CHECK(back.seed_given);
  CHECK(back.omega == 250);
  CHECK(back.fig3_phis == std::vector<double>{1e-3});
  CHECK(back.models == c.models);
  CHECK(json(back) == j);
}

TEST_CASE("config files") {
  const auto path = scratch("cfg.json");
  write_json(path, {{"model", {{"name", "hill"}, {"A", 2.0}}},
                    {"seed", 7},
                    {"ssa", {{"omega", 300}, {"phi_s_grid", "1e-3:1e-1:3log"}}}});
  const auto c = load_config(path);
  CHECK(c.models == std::vector<std::string>{"hill"});
  CHECK(c.params.A == 2.0);
  CHECK(c.omega == 300);
  CHECK(c.replicates == 100);
  CHECK(c.seed_given);
  const auto m = load_model_config(path);
  CHECK(m.name == "hill");
  CHECK(m.params.A == 2.0);

  write_json(path, {{"ssa", {{"omegaa", 300}}}});
  CHECK_THROWS_AS(load_config(path), ConfigError);
  write_json(path, {{"extra", 1}});
  CHECK_THROWS_AS(load_config(path), ConfigError);
  write_json(path, {{"ssa", {{"omega", "big"}}}});
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
  CHECK_THROWS_AS(load_config(scratch("nope.json")), ConfigError);
}

TEST_CASE("config validation") {
  auto invalid = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  invalid([](ExperimentConfig& c) { c.models.clear(); });
  invalid([](ExperimentConfig& c) { c.models = {"lotka"}; });
  invalid([](ExperimentConfig& c) { c.omega = 0; });
  invalid([](ExperimentConfig& c) { c.omega = -5; });
  invalid([](ExperimentConfig& c) { c.replicates = 0; });
  invalid([](ExperimentConfig& c) { c.x0_fraction = 0.0; });
  invalid([](ExperimentConfig& c) { c.t_max = -1.0; });
  invalid([](ExperimentConfig& c) { c.tol = 1e-4; });
  invalid([](ExperimentConfig& c) { c.phi_s_grid = "0,1e-3"; });
  invalid([](ExperimentConfig& c) { c.phi_s_grid = "-1e-3,1e-2"; });
  invalid([](ExperimentConfig& c) { c.phi_grid = "1e-2,1e-3"; });
  invalid([](ExperimentConfig& c) { c.phi_grid = ""; });
  invalid([](ExperimentConfig& c) { c.probe_offsets = "0.01"; });
  invalid([](ExperimentConfig& c) { c.fig2_offsets.clear(); });
  invalid([](ExperimentConfig& c) { c.fig3_phis = {0.0}; });
  invalid([](ExperimentConfig& c) { c.fig3_omega = 0.0; });
  invalid([](ExperimentConfig& c) { c.params.k = -1.0; });
}

TEST_CASE("full-scale settings") {
  ExperimentConfig c;
  c.apply_paper_scale();
  CHECK(c.omega == 1000);
  CHECK(c.replicates == 1000);
  CHECK(c.probe_replicates == 1000);
  CHECK_NOTHROW(c.validate());
}
