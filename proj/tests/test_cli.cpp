#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/cli/commands.hpp"
#include "lp2/eval/dataset.hpp"
#include "lp2/eval/statistics.hpp"

namespace fs = std::filesystem;
using lp2::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result lp2_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs with the working directory set to `dir` so manifests hold relative paths.
class ScopedCwd {
 public:
  explicit ScopedCwd(const fs::path& dir) : saved_(fs::current_path()) { fs::current_path(dir); }
  ~ScopedCwd() { fs::current_path(saved_); }

 private:
  fs::path saved_;
};

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lp2_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// CSV rows below the manifest comment and the header line.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::vector<std::string> ade_row(const fs::path& dir, const std::string& method, const std::string& n) {
  for (auto& row : csv_rows(slurp(dir / "ade.csv"))) {
    if (row[0] == method && row[1] == n) return row;
  }
  FAIL("no ade row for " << method);
  return {};
}

nlohmann::json json_file(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("describe: minimal scene text") {
  ScopedCwd cwd(LP2_TEST_GOLDEN);
  const auto sem = lp2_run({"describe", "--scene", "minimal_scene.json"});
  REQUIRE(sem.code == 0);
  CHECK(sem.out ==
        "In the environment, there are the rooms: kitchen.\n"
        "room connections: none.\n"
        "These objects are in the environment:\n"
        "In the kitchen, there is 1 cup.\n"
        "In the kitchen, there is 1 sink.\n");
  const auto inst = lp2_run({"describe", "--scene", "minimal_scene.json", "--granularity", "instance"});
  REQUIRE(inst.code == 0);
  CHECK(inst.out != sem.out);
  CHECK(inst.out.find("cup_1 (cup)") != std::string::npos);
  CHECK(inst.out.find("sink_1 (sink)") != std::string::npos);
  CHECK(lp2_run({"describe", "--scene", "minimal_scene.json"}).out == sem.out);
}

TEST_CASE("exit codes") {
  ScopedCwd cwd(LP2_TEST_GOLDEN);
  CHECK(lp2_run({"describe"}).code == 1);
  CHECK(lp2_run({"describe", "--scene", "minimal_scene.json", "--no-such-flag"}).code == 1);
  CHECK(lp2_run({"describe", "--scene", "minimal_scene.json", "--sigma", "-1"}).code == 1);
  CHECK(lp2_run({"describe", "--scene", "minimal_scene.json", "--gt-semantic", "--gt-instance"}).code == 1);
  CHECK(lp2_run({"describe", "--scene", "missing_scene.json"}).code == 2);
  CHECK(lp2_run({"describe", "--scene", "minimal_fixture.json"}).code == 2);
  const auto out = fresh_dir("codes");
  CHECK(lp2_run({"predict", "--scene", "minimal_scene.json", "--fixture", "minimal_fixture.json", "--out",
                 out.string()})
            .code == 1);
  const auto wire = lp2_run({"predict", "--scene", "minimal_scene.json", "--predictor", "wire", "--endpoint",
                             "http://127.0.0.1:1/v1/chat/completions", "--max-retries", "0", "--timeout", "2",
                             "--start", "1,0", "--out", out.string()});
  CHECK(wire.code == 3);
  CHECK(wire.err.find("transport") != std::string::npos);
  CHECK(lp2_run({"--help"}).code == 0);
}

TEST_CASE("predict: golden outputs for the minimal scene") {
  ScopedCwd cwd(LP2_TEST_GOLDEN);
  const std::vector<std::string> args{"predict", "--scene", "minimal_scene.json", "--fixture",
                                      "minimal_fixture.json", "--start", "1,0", "--out"};
  for (const char* run_name : {"golden_a", "golden_b"}) {
    const auto out = fresh_dir(run_name);
    auto full = args;
    full.push_back(out.string());
    const auto r = lp2_run(full);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("sequences 4") != std::string::npos);
    for (const char* file : {"tree.json", "density.csv", "trajectories.csv"}) {
      INFO(file);
      CHECK(slurp(out / file) == slurp(fs::path("predict") / file));
    }
    const auto hash = json_file(out / "manifest.json")["hash"].get<std::string>();
    CHECK(slurp(out / "density.csv").starts_with("# manifest " + hash + "\n"));
  }
}

TEST_CASE("predict: tree export respects the sequence bound") {
  ScopedCwd cwd(LP2_TEST_DATA);
  const auto out = fresh_dir("bound");
  const auto r = lp2_run({"predict", "--scene", "home_scene.json", "--fixture", "fixture.json", "--start",
                          "2,1.5", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto tree = json_file(out / "tree.json");
  std::size_t leaves = 0;
  for (const auto& n : tree["nodes"]) {
    if (n["kind"] == "interaction" && n["children"].empty()) ++leaves;
  }
  CHECK(leaves == tree["sequences"].get<std::size_t>());
  CHECK(leaves > 1);
  CHECK(leaves <= 324);
  const auto manifest = json_file(out / "manifest.json")["manifest"];
  CHECK(manifest["tree"]["width"] == 6);
  CHECK(manifest["tree"]["depth"] == 2);
  CHECK(manifest["tree"]["instances"] == 3);
}

TEST_CASE("export-grid: every slice integrates to one") {
  ScopedCwd cwd(LP2_TEST_GOLDEN);
  const double res = 0.05;
  const auto r = lp2_run({"export-grid", "--scene", "minimal_scene.json", "--fixture", "minimal_fixture.json",
                          "--start", "1,0", "--grid-margin", "3", "--grid-resolution", "0.05",
                          "--grid-times", "0,5,20,60"});
  REQUIRE(r.code == 0);
  std::map<std::string, double> mass;
  for (const auto& row : csv_rows(r.out)) mass[row[2]] += std::stod(row[3]) * res * res;
  REQUIRE(mass.size() == 4);
  for (const auto& [t, m] : mass) {
    INFO("t = " << t);
    CHECK(std::abs(m - 1.0) < 1e-3);
  }
}

TEST_CASE("evaluate: ground-truth identity and report files") {
  ScopedCwd cwd(LP2_TEST_DATA);
  const auto out = fresh_dir("identity");
  const auto r = lp2_run({"evaluate", "--dataset", "records.json", "--gt-instance", "--deterministic-walk",
                          "--trajectories", "1", "--depth", "3", "--jobs", "2", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("records 3 evaluated, 0 failed, 0 filtered") != std::string::npos);
  const auto row = ade_row(out, "lp2-deterministic-walk", "1");
  REQUIRE(row.size() == 5);
  for (std::size_t w = 2; w < 5; ++w) CHECK(std::stod(row[w]) <= 1.0 * 1.4);
  for (const char* f : {"nll_curve.csv", "nll_windows.csv", "ade.csv", "accuracy.csv", "records.csv"}) {
    CHECK(fs::exists(out / f));
  }
  const auto m = json_file(out / "manifest.json");
  CHECK(m["records"]["evaluated"] == 3);
  CHECK(slurp(out / "records.csv").starts_with("# manifest " + m["hash"].get<std::string>()));
}

TEST_CASE("evaluate: constant velocity on a straight line") {
  const auto dir = fresh_dir("straight");
  nlohmann::json positions = nlohmann::json::array();
  for (int k = 0; k <= 120; ++k) positions.push_back({0.03 * k, 0.0});
  const nlohmann::json doc{
      {"name", "straight"},
      {"scene", (fs::path(LP2_TEST_GOLDEN) / "minimal_scene.json").string()},
      {"rate_hz", 1.0},
      {"positions", positions},
      {"interactions", nlohmann::json::array()}};
  std::ofstream(dir / "straight.json") << doc.dump();
  const auto out = dir / "report";
  const auto r = lp2_run({"evaluate", "--dataset", (dir / "straight.json").string(), "--fixture",
                          (fs::path(LP2_TEST_GOLDEN) / "minimal_fixture.json").string(), "--constant-velocity",
                          "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto row = ade_row(out, "constant-velocity", "1");
  for (std::size_t w = 2; w < 5; ++w) CHECK(std::stod(row[w]) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("evaluate: subset flags reduce record counts") {
  // the sample records plus one whose split falls inside an interaction
  const auto dir = fresh_dir("subsets");
  auto doc = json_file(fs::path(LP2_TEST_DATA) / "records.json");
  const auto scene = (fs::path(LP2_TEST_DATA) / "home_scene.json").string();
  for (auto& rec : doc["records"]) rec["scene"] = scene;
  nlohmann::json positions = nlohmann::json::array();
  for (int k = 0; k <= 100; ++k) positions.push_back({1.0, 1.0 + 0.02 * k});
  doc["records"].push_back({{"name", "busy"},
                            {"scene", scene},
                            {"rate_hz", 1.0},
                            {"positions", positions},
                            {"interactions", {{{"object", "o_cup1"}, {"action", "pick up"},
                                               {"t_start", 30.0}, {"t_end", 50.0}}}}});
  std::ofstream(dir / "records.json") << doc.dump();
  const auto dataset = lp2::eval::load_dataset(dir / "records.json");
  REQUIRE(dataset.records.size() == 4);
  for (const auto& [flag, subset] :
       {std::pair{std::string("walking_at_start"), lp2::eval::Subset::walking_at_start},
        std::pair{std::string("future_distance_upper_quartile"),
                  lp2::eval::Subset::future_distance_upper_quartile}}) {
    INFO(flag);
    const auto out = dir / flag;
    const auto r = lp2_run({"evaluate", "--dataset", (dir / "records.json").string(), "--gt-semantic", "--subset",
                            flag, "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto m = json_file(out / "manifest.json");
    const auto expected = lp2::eval::subset_filter(dataset, subset).records.size();
    CHECK(m["records"]["loaded"] == 4);
    CHECK(m["records"]["selected"] == expected);
    CHECK(expected < 4);
    CHECK(expected > 0);
  }
  const auto walking = lp2::eval::subset_filter(dataset, lp2::eval::Subset::walking_at_start);
  CHECK(walking.records.size() == 3);
  for (const auto& rec : walking.records) CHECK(rec.name != "busy");
}

TEST_CASE("stats: summary table") {
  ScopedCwd cwd(LP2_TEST_DATA);
  const auto r = lp2_run({"stats", "--dataset", "records.json"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][0] == "distance_m");
  CHECK(rows[4][0] == "normalized_levenshtein");
  CHECK(rows[4][3] == "3");
}

TEST_CASE("config file: command line wins over file, file over defaults") {
  ScopedCwd cwd(LP2_TEST_GOLDEN);
  const auto dir = fresh_dir("config");
  std::ofstream(dir / "run.ini") << "sigma=0.7\nwidth=3\nhorizon=30\n";
  const auto out = dir / "out";
  const auto r = lp2_run({"predict", "--config", (dir / "run.ini").string(), "--width", "2", "--scene",
                          "minimal_scene.json", "--fixture", "minimal_fixture.json", "--start", "1,0", "--out",
                          out.string()});
  REQUIRE(r.code == 0);
  const auto m = json_file(out / "manifest.json")["manifest"];
  CHECK(m["motion"]["sigma"] == 0.7);
  CHECK(m["motion"]["horizon"] == 30.0);
  CHECK(m["tree"]["width"] == 2);
  CHECK(m["motion"]["dt"] == 1.0);
}
