#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratvote/cli.hpp"
#include "stratvote/config.hpp"
#include "stratvote/errors.hpp"
#include "stratvote/serialization.hpp"

using namespace stratvote;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "stratvote");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "stratvote_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string field_of(const json& layer, bool require_alpha) {
  try {
    resolve_config(layer, require_alpha);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("figure presets") {
  const ResolvedConfig fig1a = resolve_config(preset_layer("fig1a"), true);
  CHECK(fig1a.simulation.population.n() == 200);
  CHECK(fig1a.simulation.population.n_e == 100);
  CHECK(fig1a.simulation.env.mu == 0.0);
  CHECK(fig1a.simulation.env.sigma == 10.0);
  CHECK(fig1a.simulation.alpha == 0.5);
  CHECK(fig1a.simulation.principle == GroupPrinciple::B);
  CHECK(fig1a.simulation.initial_capital == 700.0);

  const ResolvedConfig fig4 = resolve_config(preset_layer("fig4"), false);
  CHECK(fig4.simulation.population.n() == 450);
  CHECK(fig4.simulation.population.n_e == 225);
  CHECK(fig4.simulation.initial_capital == 3000.0);
  CHECK(fig4.simulation.steps == 1000);
  CHECK(fig4.alpha_grid.size() == 101);
  CHECK(fig4.alpha_grid[7] == 0.07);

  CHECK(resolve_config(preset_layer("fig2b"), true).simulation.population.n_e == 16);
  CHECK(resolve_config(preset_layer("fig5"), false).simulation.population.n_e == 414);
  for (const std::string& name : preset_names()) {
    CHECK_NOTHROW(resolve_config(preset_layer(name), false));
  }
  CHECK_THROWS_AS(preset_layer("fig9"), ValidationError);
}

TEST_CASE("validation errors name the field") {
  json layer = preset_layer("fig1a");
  layer["alpha"] = 1.5;
  CHECK(field_of(layer, true) == "alpha");
  layer = preset_layer("fig1a");
  layer["sigma"] = 0.0;
  CHECK(field_of(layer, true) == "sigma");
  CHECK(field_of(json{{"n", 10}, {"n_e", 4}, {"n_g", 5}, {"mu", 0}, {"sigma", 1}, {"alpha", 0.5}}, true) == "n");
  CHECK(field_of(json{{"n", 10}, {"two_beta", 0.5}, {"sigma", 1}, {"alpha", 0.5}}, true) == "mu");
  CHECK(field_of(json{{"n", 10}, {"two_beta", 0.5}, {"mu", 0}, {"sigma", 1}}, true) == "alpha");
  CHECK(field_of(json{{"n", 10}, {"mu", 0}, {"sigma", 1}, {"alpha", 0.5}}, true) == "n_e");
  CHECK(field_of(json{{"n", 10}, {"two_beta", 0.5}, {"mu", 0}, {"sigma", 1}, {"alpah", 0.5}}, true) == "alpah");
}

TEST_CASE("later layers replace the population split") {
  const json merged = merge_layers(preset_layer("fig1a"), json{{"n_e", 30}, {"n_g", 170}});
  const ResolvedConfig c = resolve_config(merged, true);
  CHECK(c.simulation.population.n_e == 30);
  CHECK(c.simulation.population.n() == 200);
  CHECK(c.simulation.alpha == 0.5);
}

TEST_CASE("alpha grid forms") {
  CHECK(expand_alpha_range(0.0, 0.3, 0.1) == std::vector<double>{0.0, 0.1, 0.2, 0.3});
  json layer = preset_layer("fig4");
  layer["alpha_grid"] = json::array({0.7, 0.2});
  CHECK(resolve_config(layer, false).alpha_grid == std::vector<double>{0.2, 0.7});
  layer["alpha_grid"] = json{{"start", 0.0}, {"stop", 1.0}};
  CHECK(field_of(layer, false) == "alpha_grid.step");
}

TEST_CASE("canonical form resolves to the same configuration") {
  json layer = preset_layer("fig2b");
  layer["migration"] = json{{"mode", "increments"}, {"s1", 4}};
  const ResolvedConfig a = resolve_config(layer, true);
  const ResolvedConfig b = resolve_config(canonical_json(a), true);
  CHECK(canonical_json(a) == canonical_json(b));
  REQUIRE(b.simulation.migration);
  CHECK(b.simulation.migration->s1 == 4);
  CHECK(b.simulation.migration->mode == MigrationMode::CapitalIncrements);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(700.0) == "700");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-1.25e-7) == "-1.25e-07");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("simulate writes a manifest and a fixed header") {
  const Run r = cli({"simulate", "--preset", "fig1a", "--steps", "5", "--seed", "3"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first.rfind("# manifest: ", 0) == 0);
  CHECK(second == kTrajectoryCsvHeader);
  const json manifest = json::parse(first.substr(12));
  CHECK(manifest["tool"] == "stratvote");
  CHECK(manifest["master_seed"] == 3);
  CHECK(manifest["config"]["n_e"] == 100);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("re-running from an output manifest reproduces it byte for byte") {
  const auto first = scratch("first.csv");
  const auto second = scratch("second.csv");
  REQUIRE(cli({"simulate", "--preset", "fig2b", "--steps", "40", "--seed", "11", "--out", first.string()}).code == 0);
  REQUIRE(cli({"simulate", "--config", first.string(), "--out", first.string()}).code == 0);
  REQUIRE(cli({"simulate", "--config", first.string(), "--out", second.string()}).code == 0);
  const std::string a = slurp(first);
  const std::string b = slurp(second);
  // Only the recorded output path differs.
  CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
  const Run stdout_a = cli({"simulate", "--config", first.string()});
  const Run stdout_b = cli({"simulate", "--config", second.string()});
  CHECK(stdout_a.out == stdout_b.out);
}

TEST_CASE("flags override the config file, which overrides the preset") {
  const auto path = scratch("layer.json");
  std::ofstream(path) << R"({"preset": "fig1a", "alpha": 0.3, "steps": 4})";
  const Run r = cli({"simulate", "--config", path.string(), "--steps", "2"});
  REQUIRE(r.code == 0);
  const json manifest = json::parse(r.out.substr(12, r.out.find('\n') - 12));
  CHECK(manifest["config"]["alpha"] == 0.3);
  CHECK(manifest["config"]["steps"] == 2);
  CHECK(manifest["config"]["initial_capital"] == 700.0);
}

TEST_CASE("exit codes") {
  CHECK(cli({"simulate", "--preset", "fig1a", "--alpha", "1.5"}).code == kExitValidation);
  CHECK(cli({"simulate", "--mu", "0", "--sigma", "1", "--alpha", "0.5"}).code == kExitValidation);
  CHECK(cli({"frobnicate"}).code == kExitValidation);
  CHECK(cli({"predict", "--preset", "fig4", "--principle", "A'"}).code == kExitUnsupported);
  CHECK(cli({"predict", "--preset", "fig6c", "--principle", "A"}).code == kExitUnsupported);
  CHECK(cli({"simulate", "--preset", "fig1a", "--steps", "2", "--out", "/nonexistent-dir/x.csv"}).code == kExitIo);
  CHECK(cli({"simulate", "--config", "/nonexistent-dir/c.json"}).code == kExitIo);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"preset": "fig1a", "colour": 3})";
  const Run unknown = cli({"simulate", "--config", bad.string()});
  CHECK(unknown.code == kExitValidation);
  CHECK(unknown.err.find("colour") != std::string::npos);
}

TEST_CASE("predict reports zones and per-zone expectations") {
  const Run r = cli({"predict", "--preset", "fig4"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["zones"]["boundaries"][0].get<double>() == doctest::Approx(0.2));
  CHECK(doc["zones"]["boundaries"][3].get<double>() == doctest::Approx(0.8));
  CHECK(doc["zones"]["zone3_exists"] == true);
  CHECK(doc["neutral"]["zone3"]["B"]["group"]["expected_increment"].get<double>() ==
        doctest::Approx(10.0 * 1000 / std::sqrt(2.0 * std::numbers::pi * 225)));
  CHECK(doc["neutral"]["alpha_eq_beta"]["A"]["acceptance_probability"] == 0.75);
  CHECK(cli({"predict", "--preset", "fig4", "--format", "csv"}).code == kExitValidation);
}

TEST_CASE("sweep and compare") {
  const Run sweep = cli({"sweep", "--preset", "fig4", "--alpha-grid", "0.1,0.95", "--replications", "3", "--steps",
                         "20", "--format", "json"});
  REQUIRE(sweep.code == 0);
  const json doc = json::parse(sweep.out);
  CHECK(doc["rows"].size() == 6);
  CHECK(doc["rows"][0]["prediction"].is_null());

  const Run compare =
      cli({"compare", "--preset", "fig4", "--alpha-grid", "0.95:0.99:0.02", "--replications", "3", "--steps", "20"});
  CHECK(compare.code == 0);
  CHECK(compare.out.find(kSweepCsvHeader) != std::string::npos);
  CHECK(compare.out.find("exact_static") != std::string::npos);
}

TEST_CASE("compare exits nonzero when a cell misses its tolerance") {
  // Zone 1 with mu != 0: a single one-step replication cannot land inside
  // the 10% band around mu s, and its gap row has no spread to hide behind.
  const Run r = cli({"compare", "--preset", "fig6c", "--alpha-grid", "0.01", "--replications", "1", "--steps", "1",
                     "--seed", "4"});
  CHECK(r.code == kExitCompareFailed);
}

TEST_CASE("dispossession demo") {
  const Run r = cli({"dispossess-demo"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["runs"][0]["accepted"] == 3);
  CHECK(doc["runs"][0]["all_below_start"] == true);
  CHECK(doc["runs"][1]["accepted"] == 0);
  CHECK(cli({"dispossess-demo", "--n", "2"}).code == kExitValidation);
}

}  // TEST_SUITE
