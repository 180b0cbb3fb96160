#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string log;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bht");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log;
  const int code = bht::cli_main(static_cast<int>(argv.size()), argv.data(), log);
  return {code, log.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  const fs::path d = fs::temp_directory_path() / "bht_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("quench writes a trajectory") {
  const fs::path out = workdir() / "q.json";
  fs::remove(out);
  const Result r = run({"quench", "--tmax", "5", "--dt", "0.5", "--out", out.string()});
  CHECK(r.code == 0);
  REQUIRE(fs::exists(out));
  const json j = json::parse(slurp(out));
  CHECK(j["times"].size() == 11);
  CHECK(j["site_density"][0].size() == 6);
  // Progress only: the log never contains the result arrays.
  CHECK(r.log.find("\"times\"") == std::string::npos);
}

TEST_CASE("identical invocations give byte-identical files") {
  const fs::path a = workdir() / "a.csv";
  const fs::path b = workdir() / "b.csv";
  const std::vector<std::string> common = {"sweep", "--tmax", "4", "--L", "6", "--N", "2", "--h", "10"};
  auto with = [&](const fs::path& p) {
    auto args = common;
    args.insert(args.end(), {"--out", p.string(), "--config", (workdir() / "grid.cfg").string()});
    return args;
  };
  {
    std::ofstream cfg(workdir() / "grid.cfg");
    cfg << "U_min = 1.0\nU_max = 1.1\nU_step = 0.05\nsweep_dt = 1\n";
  }
  CHECK(run(with(a)).code == 0);
  CHECK(run(with(b)).code == 0);
  const std::string sa = slurp(a);
  CHECK(sa == slurp(b));
  CHECK(sa.rfind("U,t,dn\n", 0) == 0);
  CHECK(std::count(sa.begin(), sa.end(), '\n') == 1 + 3 * 5);
}

TEST_CASE("overlap on the angled barrier") {
  const fs::path out = workdir() / "ov.json";
  const Result r = run({"overlap", "--U", "1.42", "--barrier", "angled", "--out", out.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(out));
  double best = 0.0;
  for (const auto& e : j["eigenstates"]) best = std::max(best, e["overlap"].get<double>());
  CHECK(best >= 0.85);
  CHECK(run({"overlap", "--format", "csv", "--out", out.string()}).code == 1);
}

TEST_CASE("windows and coherent subcommands") {
  const fs::path cfg = workdir() / "w.cfg";
  {
    std::ofstream f(cfg);
    f << "U_min = 1.4\nU_max = 1.44\nU_step = 0.02\nsweep_dt = 0.25\nwindow_threshold = 0.5\n";
  }
  const fs::path wout = workdir() / "w.json";
  CHECK(run({"windows", "--config", cfg.string(), "--out", wout.string()}).code == 0);
  const json w = json::parse(slurp(wout));
  CHECK(w["windows"].size() == 1);

  const fs::path ccfg = workdir() / "c.cfg";
  {
    std::ofstream f(ccfg);
    f << "coherent_n = 0.5, 0.5, 0, 0, 0, 0\n";
  }
  const fs::path cout = workdir() / "c.csv";
  CHECK(run({"coherent", "--config", ccfg.string(), "--tmax", "2", "--dt", "1", "--format", "csv", "--out",
             cout.string()})
            .code == 0);
  const std::string csv = slurp(cout);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("validation failures exit with 1") {
  const Result odd = run({"quench", "--L", "7"});
  CHECK(odd.code == 1);
  CHECK(odd.log.find("L") != std::string::npos);
  CHECK(run({"quench", "--barrier", "diagonal"}).code == 1);
  CHECK(run({"quench", "--U", "abc"}).code == 1);
  CHECK(run({"quench", "--config", "/nonexistent/file.cfg"}).code == 1);
  CHECK(run({"teleport"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"quench", "--bogus", "1"}).code == 1);

  const fs::path bad = workdir() / "bad.cfg";
  {
    std::ofstream f(bad);
    f << "L = 6\nnot a setting\n";
  }
  const Result parse = run({"quench", "--config", bad.string()});
  CHECK(parse.code == 1);
  CHECK(parse.log.find("2") != std::string::npos);
}

TEST_CASE("runtime failures exit with 2") {
  const fs::path out = workdir() / "missing-dir" / "x.json";
  fs::remove_all(workdir() / "missing-dir");
  CHECK(run({"quench", "--tmax", "1", "--out", out.string()}).code == 2);
}

TEST_CASE("flags override the config file") {
  const fs::path cfg = workdir() / "o.cfg";
  {
    std::ofstream f(cfg);
    f << "L = 7\ntmax = 1\ndt = 0.5\n";
  }
  const fs::path out = workdir() / "o.json";
  CHECK(run({"quench", "--config", cfg.string(), "--L", "4", "--N", "2", "--out", out.string()}).code == 0);
  CHECK(json::parse(slurp(out))["site_density"][0].size() == 4);
}

TEST_CASE("help") { CHECK(run({"--help"}).code == 0); }
