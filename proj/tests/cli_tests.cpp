#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Runs the installed CLI with the given argument string, capturing both streams.
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const std::string tag = std::to_string(counter++) + "_" + std::to_string(::getpid());
  const fs::path out_path = dir / ("cli_out_" + tag);
  const fs::path err_path = dir / ("cli_err_" + tag);

  const std::string cmd = std::string(DISTREP_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());

  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

// Fresh scratch directory per test case.
fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("distrep_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Single-line JSON object on stderr is the error contract.
json parse_error(const RunResult& r) {
  REQUIRE(!r.err.empty());
  const std::string line = r.err.substr(0, r.err.find('\n'));
  CHECK(r.err.find('\n') == r.err.size() - 1);  // exactly one line
  json j = json::parse(line, nullptr, false);
  REQUIRE(!j.is_discarded());
  REQUIRE(j.contains("error"));
  REQUIRE(j.contains("message"));
  return j;
}

json parse_stdout(const RunResult& r) {
  json j = json::parse(r.out, nullptr, false);
  REQUIRE(!j.is_discarded());
  return j;
}

}  // namespace

TEST_CASE("help and version exit zero") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
  const RunResult v = run_cli("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit 2 with json on stderr") {
  const RunResult unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code == 2);
  CHECK(parse_error(unknown)["error"] == "usage");

  CHECK(run_cli("").exit_code == 2);

  // --seed is required on every randomized subcommand.
  const RunResult no_seed = run_cli("cluster --quantiles nowhere.csv -k 2");
  CHECK(no_seed.exit_code == 2);
  CHECK(parse_error(no_seed)["error"] == "usage");

  // Flag value validation fires before any file is touched.
  const RunResult bad_kernel =
      run_cli("density --input nowhere.csv --kernel box --out /tmp/never_written.csv");
  CHECK(bad_kernel.exit_code == 2);
  CHECK(parse_error(bad_kernel)["error"] == "usage");

  CHECK(run_cli("anova --no-such-flag 1").exit_code == 2);
}

TEST_CASE("data errors exit 1 with a structured code") {
  const fs::path dir = scratch_dir("badcsv");
  const RunResult missing =
      run_cli("quantile --input /definitely/not/here.csv --out " + (dir / "q.csv").string());
  CHECK(missing.exit_code == 1);
  CHECK(parse_error(missing)["error"] == "io_failure");

  const fs::path bad = dir / "bad.csv";
  std::ofstream(bad) << "who,when,how_much\nA,2024-01-01T00:00:00Z,100\n";
  const RunResult mh = run_cli("ingest --input " + bad.string());
  CHECK(mh.exit_code == 1);
  CHECK(parse_error(mh)["error"] == "malformed_header");
  fs::remove_all(dir);
}

TEST_CASE("simulate is byte-stable for a fixed seed") {
  const fs::path dir = scratch_dir("sim");
  const std::string base = "simulate --subjects 4 --days 2 --seed 11 --out-dir ";
  CHECK(run_cli(base + (dir / "a").string()).exit_code == 0);
  CHECK(run_cli(base + (dir / "b").string()).exit_code == 0);
  const std::string cgm_a = slurp(dir / "a" / "cgm.csv");
  CHECK(!cgm_a.empty());
  CHECK(cgm_a == slurp(dir / "b" / "cgm.csv"));
  CHECK(slurp(dir / "a" / "biomarkers.csv") == slurp(dir / "b" / "biomarkers.csv"));
  CHECK(fs::exists(dir / "a" / "cgm.csv.manifest.json"));
  CHECK(fs::exists(dir / "a" / "biomarkers.csv.manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("simulate to analysis pipeline round-trips through files") {
  const fs::path dir = scratch_dir("pipe");
  const std::string cgm = (dir / "cgm.csv").string();
  const std::string bio = (dir / "biomarkers.csv").string();
  const std::string quant = (dir / "q.csv").string();

  const RunResult sim =
      run_cli("simulate --subjects 12 --days 2 --seed 33 --out-dir " + dir.string());
  CHECK(sim.exit_code == 0);
  const json sj = parse_stdout(sim);
  CHECK(sj["subjects"] == 12);
  CHECK(sj["records"] == 12 * 2 * (86400 / 300));

  CHECK(run_cli("quantile --input " + cgm + " --grid-points 120 --out " + quant).exit_code ==
        0);

  const RunResult cl = run_cli("cluster --quantiles " + quant + " -k 2 --seed 5");
  CHECK(cl.exit_code == 0);
  const json cj = parse_stdout(cl);
  CHECK(cj["manifest"]["command"] == "cluster");
  REQUIRE(cj["labels"].is_object());
  CHECK(cj["labels"].size() == 12);
  for (const auto& [id, label] : cj["labels"].items()) {
    CHECK(label.get<int>() >= 1);
    CHECK(label.get<int>() <= 2);
  }

  // Archetype labels from the truth sidecar drive a grouped test.
  const RunResult an = run_cli("anova --quantiles " + quant + " --table " + bio +
                               " --groups archetype --reps 60 --seed 9");
  CHECK(an.exit_code == 0);
  const json aj = parse_stdout(an);
  CHECK(aj["p_value"].get<double>() >= 0.0);
  CHECK(aj["p_value"].get<double>() <= 1.0);
  CHECK(aj["manifest"]["parameters"].contains("reps"));
  CHECK(aj["groups"].size() == 3);

  const RunResult en = run_cli("energy-test --quantiles " + quant + " --table " + bio +
                               " --groups archetype --reps 99 --seed 4");
  CHECK(en.exit_code == 0);
  CHECK(parse_stdout(en)["variant"] == "k_sample");

  const RunResult tir = run_cli("tir --input " + cgm + " --cutoffs ada --out " +
                                (dir / "comps.csv").string());
  CHECK(tir.exit_code == 0);
  const json tj = parse_stdout(tir);
  CHECK(tj["boundaries"] == json::array({54.0, 70.0, 181.0, 251.0}));
  CHECK(tj["closure"] == "left_closed");
  CHECK(fs::exists(dir / "comps.csv"));

  fs::remove_all(dir);
}

TEST_CASE("stdout stays machine-parseable when a file sink is used") {
  const fs::path dir = scratch_dir("sink");
  CHECK(run_cli("simulate --subjects 4 --days 2 --seed 2 --out-dir " + dir.string())
            .exit_code == 0);
  const std::string cgm = (dir / "cgm.csv").string();
  const std::string quant = (dir / "q.csv").string();
  CHECK(run_cli("quantile --input " + cgm + " --grid-points 80 --out " + quant).exit_code == 0);

  const RunResult dm = run_cli("distmat --quantiles " + quant + " --out " +
                               (dir / "d.csv").string() + " --binary-out " +
                               (dir / "d.dstm").string());
  CHECK(dm.exit_code == 0);
  const json j = parse_stdout(dm);
  CHECK(j["subjects"] == 4);
  CHECK(fs::exists(dir / "d.csv"));
  CHECK(fs::exists(dir / "d.csv.manifest.json"));
  CHECK(fs::exists(dir / "d.dstm"));
  CHECK(slurp(dir / "d.dstm").substr(0, 4) == "DSTM");
  fs::remove_all(dir);
}

TEST_CASE("outputs are identical across thread counts") {
  const fs::path dir = scratch_dir("threads");
  CHECK(run_cli("simulate --subjects 6 --days 2 --seed 8 --threads 1 --out-dir " +
                (dir / "t1").string())
            .exit_code == 0);
  CHECK(run_cli("simulate --subjects 6 --days 2 --seed 8 --threads 4 --out-dir " +
                (dir / "t4").string())
            .exit_code == 0);
  CHECK(slurp(dir / "t1" / "cgm.csv") == slurp(dir / "t4" / "cgm.csv"));
  // The manifest records inputs and parameters, never the thread count.
  CHECK(slurp(dir / "t1" / "cgm.csv.manifest.json") ==
        slurp(dir / "t4" / "cgm.csv.manifest.json"));
  fs::remove_all(dir);
}
