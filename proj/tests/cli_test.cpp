#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "carleman/config.hpp"
#include "carleman/csv.hpp"
#include "carleman/runner.hpp"

using namespace carleman;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("carleman-lab-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json base_config() {
  return json::parse(R"({
    "coefficients": {"plus": [4, 1], "minus": [1, 1]},
    "weight": {"alpha_plus": 3, "alpha_minus": 1, "beta": 1},
    "grid": {"x_min": -0.3, "x_max": 0.3, "n": 101},
    "sweep": {"tau": [50, 100, 200]},
    "estimate": {"tau": [50, 100], "samples": 20},
    "seed": 7
  })");
}

int run_in(const fs::path& dir, const std::string& cmd, const json& config, int threads,
           std::string* log = nullptr) {
  RunOptions opt;
  opt.subcommand = cmd;
  opt.config_path = write_config(dir, config);
  opt.out_dir = dir.string();
  opt.threads = threads;
  std::ostringstream err;
  const int code = run(opt, err);
  if (log) *log = err.str();
  return code;
}

}  // namespace

TEST_CASE("config round trip is canonical") {
  const ExperimentConfig c = parse_config(base_config());
  const json canon = to_json(c);
  const ExperimentConfig again = parse_config(canon);
  CHECK(to_json(again) == canon);
  CHECK(again.coefficients.a_plus(0, 0) == 4.0);
  CHECK(again.alpha_plus == 3.0);
  CHECK(again.sweep_tau == std::vector<double>{50, 100, 200});
  CHECK(again.seed == 7);

  json autobeta = base_config();
  autobeta["weight"]["beta"] = "auto";
  const ExperimentConfig a = parse_config(autobeta);
  CHECK_FALSE(a.beta);
  CHECK(parse_config(to_json(a)).beta == a.beta);
  CHECK(a.weight().beta >= 1.0);

  json geometric = base_config();
  geometric["sweep"]["tau"] = json::parse(R"({"min": 10, "max": 1000, "count": 3})");
  const auto taus = parse_config(geometric).sweep_tau;
  REQUIRE(taus.size() == 3);
  CHECK(taus[1] == doctest::Approx(100.0));
}

TEST_CASE("config errors name the offending field") {
  auto field_of = [](const json& j) {
    try {
      parse_config(j);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  json j = base_config();
  j["weight"]["alpha_minus"] = -1.0;
  CHECK(field_of(j) == "weight.alpha_minus");
  j = base_config();
  j["grid"]["n"] = 100;
  CHECK(field_of(j).rfind("grid", 0) == 0);
  j = base_config();
  j["grid"]["colour"] = 1;
  CHECK(field_of(j) == "grid.colour");
  j = base_config();
  j["coefficients"]["minus"] = json::parse("[[1, 2], [2, 1]]");
  CHECK(field_of(j) == "coefficients.minus");
  j = base_config();
  j.erase("weight");
  CHECK(field_of(j) == "weight");
}

TEST_CASE("csv cells") {
  CHECK(format_cell(1.0) == "1.0000000000000000e+00");
  CHECK(format_cell(-0.125) == "-1.2500000000000000e-01");
  CHECK(format_cell(std::int64_t{601}) == "601");
  CHECK(format_cell(true) == "true");
  CHECK(format_cell(std::string("direct")) == "direct");
  CsvTable t({"a", "b"});
  t.add_row({1.5, std::int64_t{2}});
  std::ostringstream out;
  t.write(out);
  CHECK(out.str() == "a,b\n1.5000000000000000e+00,2\n");
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("negative alpha_minus exits with a validation error") {
  const fs::path dir = scratch("negative");
  json j = base_config();
  j["weight"]["alpha_minus"] = -1.0;
  std::string log;
  CHECK(run_in(dir, "check-condition", j, 1, &log) == kExitValidation);
  CHECK(log.find("weight.alpha_minus") != std::string::npos);

  const std::string cmd = std::string(CARLEMAN_LAB_EXE) + " check-condition --config " +
                          (dir / "config.json").string() + " --out " + dir.string() + " 2>" +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(slurp(dir / "stderr.txt").find("weight.alpha_minus") != std::string::npos);
}

TEST_CASE("check-condition on an isotropic pair") {
  const fs::path dir = scratch("isotropic");
  json j = base_config();
  j["coefficients"] = json::parse(R"({"plus": [2, 2], "minus": [5, 5]})");
  j["weight"] = json::parse(R"({"alpha_plus": 1.5, "alpha_minus": 1})");
  REQUIRE(run_in(dir, "check-condition", j, 1) == kExitOk);
  const std::string csv = slurp(dir / "check-condition.csv");
  CHECK(csv.rfind("satisfied,", 0) == 0);
  CHECK(csv.find("\ntrue,") != std::string::npos);
}

TEST_CASE("sweep-carleman csv layout") {
  const fs::path dir = scratch("sweep");
  REQUIRE(run_in(dir, "sweep-carleman", base_config(), 2) == kExitOk);
  std::istringstream csv(slurp(dir / "sweep-carleman.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "tau,xi_abs,sigma_min,sigma_over_tau32,N,h,mode");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.find(",101,") != std::string::npos);
    CHECK(line.substr(line.size() - 7) == ",direct");
  }
  CHECK(rows == 3);
  CHECK(slurp(dir / "sweep-carleman-fit.csv").rfind("slope,intercept,r2\n", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  for (const std::string cmd : {"sweep-carleman", "estimate-ratio", "check-condition"}) {
    const fs::path a = scratch("det-a"), b = scratch("det-b");
    REQUIRE(run_in(a, cmd, base_config(), 1) == kExitOk);
    REQUIRE(run_in(b, cmd, base_config(), 3) == kExitOk);
    CHECK(slurp(a / (cmd + ".csv")) == slurp(b / (cmd + ".csv")));
    const fs::path c = scratch("det-c");
    REQUIRE(run_in(c, cmd, base_config(), 1) == kExitOk);
    CHECK(slurp(a / (cmd + ".csv")) == slurp(c / (cmd + ".csv")));
  }
}

TEST_CASE("seed override changes the Monte-Carlo table") {
  const fs::path a = scratch("seed-a"), b = scratch("seed-b");
  RunOptions opt;
  opt.subcommand = "estimate-ratio";
  opt.config_path = write_config(a, base_config());
  opt.out_dir = a.string();
  std::ostringstream log;
  REQUIRE(run(opt, log) == kExitOk);
  opt.out_dir = b.string();
  opt.seed = 99;
  REQUIRE(run(opt, log) == kExitOk);
  CHECK(slurp(a / "estimate-ratio.csv") != slurp(b / "estimate-ratio.csv"));
}

TEST_CASE("unknown subcommand and missing config") {
  const fs::path dir = scratch("misc");
  std::ostringstream log;
  RunOptions opt;
  opt.subcommand = "check-condition";
  opt.config_path = (dir / "absent.json").string();
  opt.out_dir = dir.string();
  CHECK(run(opt, log) == kExitValidation);
  CHECK(subcommands().size() == 7);
}
