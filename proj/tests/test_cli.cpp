#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rloco/cli.hpp"
#include "rloco/csv.hpp"

using namespace rloco;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("rloco_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  std::string cmd = std::string(RLOCO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("csv ingestion round-trip") {
  fs::path dir = temp_dir("csv");
  write_file(dir / "ok.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  Dataset d = ingest_csv((dir / "ok.csv").string(), "y", TaskKind::Regression);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.features(1, 1) == 5.0);
  CHECK(d.target[2] == 9.0);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("csv errors carry their location and kind") {
  fs::path dir = temp_dir("csv_err");

  write_file(dir / "nan.csv", "a,b,y\n1,NaN,3\n");
  try {
    ingest_csv((dir / "nan.csv").string(), "y", TaskKind::Regression);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.kind == CsvError::Kind::NonNumericCell);
    CHECK(e.line == 2);
    CHECK(e.column == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }

  write_file(dir / "noheader.csv", "1,2,3\n4,5,6\n");
  try {
    ingest_csv((dir / "noheader.csv").string(), "y", TaskKind::Regression);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.kind == CsvError::Kind::MissingHeader);
  }

  write_file(dir / "notarget.csv", "a,b\n1,2\n");
  try {
    ingest_csv((dir / "notarget.csv").string(), "z", TaskKind::Regression);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.kind == CsvError::Kind::MissingTarget);
  }
}

TEST_CASE("large csv ingests quickly") {
  fs::path dir = temp_dir("csv_big");
  std::ostringstream os;
  os << "a,b,c,y\n";
  const int rows = 20640;
  for (int i = 0; i < rows; ++i)
    os << i << "," << i * 0.5 << "," << -i << "," << i % 7 << "\n";
  write_file(dir / "big.csv", os.str());
  auto start = std::chrono::steady_clock::now();
  Dataset d = ingest_csv((dir / "big.csv").string(), "y", TaskKind::Regression);
  auto elapsed = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  CHECK(d.n() == static_cast<std::size_t>(rows));  // line-count oracle
  CHECK(elapsed < 2.0);
}

TEST_CASE("cli: synth then explain wiring") {
  fs::path dir = temp_dir("cli_synth");
  int code = cli::run({"synth", "--model", "first-order", "--n", "400",
                       "--seed", "5", "--out", (dir / "s").string()});
  CHECK(code == cli::kExitOk);
  CHECK(fs::exists(dir / "s" / "data.csv"));
  CHECK(fs::exists(dir / "s" / "ground_truth.json"));
  CHECK(fs::exists(dir / "s" / "model.json"));
  CHECK(fs::exists(dir / "s" / "manifest.json"));

  int code2 = cli::run({"explain", "--method", "rloco-kmeans-2", "--input",
                        (dir / "s" / "data.csv").string(), "--target", "y",
                        "--point-index", "12", "--trees", "30", "--seed", "5",
                        "--out", (dir / "e").string()});
  CHECK(code2 == cli::kExitOk);
  std::string expl = read_file(dir / "e" / "explanation.json");
  CHECK(expl.find("\"cluster\"") != std::string::npos);
  CHECK(expl.find("\"undecidable\"") != std::string::npos);
  CHECK(expl.find("\"target_mode\"") != std::string::npos);
  CHECK(fs::exists(dir / "e" / "partition.json"));
  CHECK(fs::exists(dir / "e" / "importance.tsv"));
}

TEST_CASE("cli: bench determinism (rerun and diff)") {
  fs::path dir = temp_dir("cli_bench");
  std::string common =
      "bench --model first-order --runs 2 --n 800 --seed 7 --trees 30 "
      "--methods loco,rloco-kmeans-2 --threads 2";
  CHECK(cli::run({}) == cli::kExitUsage);
  int c1 = run_binary(common + " --out " + (dir / "a").string());
  int c2 = run_binary(common + " --out " + (dir / "b").string());
  CHECK(c1 == 0);
  CHECK(c2 == 0);
  CHECK(read_file(dir / "a" / "bench.tsv") == read_file(dir / "b" / "bench.tsv"));
  CHECK(read_file(dir / "a" / "bench.json") == read_file(dir / "b" / "bench.json"));
  CHECK(!read_file(dir / "a" / "bench.tsv").empty());
}

TEST_CASE("cli: verify suite emits a report") {
  fs::path dir = temp_dir("cli_verify");
  int code = cli::run({"verify", "--suite", "theorem1", "--trials", "10",
                       "--seed", "3", "--out", (dir / "v").string()});
  CHECK(code == cli::kExitOk);
  std::string report = read_file(dir / "v" / "report.json");
  CHECK(report.find("max_discrepancy") != std::string::npos);
  CHECK(fs::exists(dir / "v" / "manifest.json"));
}

TEST_CASE("cli: exit codes for data errors") {
  fs::path dir = temp_dir("cli_codes");
  write_file(dir / "nan.csv", "a,b,y\n1,NaN,3\n");
  write_file(dir / "nohdr.csv", "1,2,3\n");
  write_file(dir / "ok.csv", "a,b,y\n1,2,3\n2,1,0\n");

  int nan_code = cli::run({"explain", "--input", (dir / "nan.csv").string(),
                           "--target", "y", "--point-index", "0", "--out",
                           (dir / "o1").string()});
  CHECK(nan_code == cli::kExitCsvCell);

  int hdr_code = cli::run({"explain", "--input", (dir / "nohdr.csv").string(),
                           "--target", "y", "--point-index", "0", "--out",
                           (dir / "o2").string()});
  CHECK(hdr_code == cli::kExitCsvHeader);

  int tgt_code = cli::run({"explain", "--input", (dir / "ok.csv").string(),
                           "--target", "zzz", "--point-index", "0", "--out",
                           (dir / "o3").string()});
  CHECK(tgt_code == cli::kExitCsvTarget);

  int usage = cli::run({"explain", "--input", (dir / "ok.csv").string(),
                        "--target", "y", "--point-index", "99", "--out",
                        (dir / "o4").string()});
  CHECK(usage == cli::kExitUsage);

  int unknown_flag = run_binary("bench --no-such-flag");
  CHECK(unknown_flag == cli::kExitUsage);
}

TEST_CASE("cli: config file with flags winning") {
  fs::path dir = temp_dir("cli_config");
  write_file(dir / "cfg.ini",
             "[verify]\nsuite=theorem1\ntrials=5\nseed=11\nout=" +
                 (dir / "from_file").string() + "\n");
  int code = cli::run({"--config", (dir / "cfg.ini").string(), "verify",
                       "--trials", "6", "--out", (dir / "v").string()});
  CHECK(code == cli::kExitOk);
  CHECK(fs::exists(dir / "v" / "manifest.json"));
  std::string manifest = read_file(dir / "v" / "manifest.json");
  CHECK(manifest.find("\"trials\": 6") != std::string::npos);  // flag won
  CHECK(manifest.find("\"seed\": 11") != std::string::npos);   // file applied
}

TEST_CASE("cli: seed env override is echoed") {
  fs::path dir = temp_dir("cli_env");
  setenv("RLOCO_SEED", "4242", 1);
  int code = cli::run({"verify", "--suite", "contamination", "--out",
                       (dir / "v").string()});
  unsetenv("RLOCO_SEED");
  CHECK(code == cli::kExitOk);
  std::string manifest = read_file(dir / "v" / "manifest.json");
  CHECK(manifest.find("\"seed\": 4242") != std::string::npos);
  CHECK(manifest.find("env:RLOCO_SEED") != std::string::npos);
}

TEST_CASE("cli: mask-eval on synthetic data") {
  fs::path dir = temp_dir("cli_mask");
  int code = cli::run({"mask-eval", "--model", "first-order", "--n", "800",
                       "--trees", "30", "--methods", "loco,rloco-kmeans-2",
                       "--k-grid", "0,1,2", "--seed", "13", "--svg", "--out",
                       (dir / "m").string()});
  CHECK(code == cli::kExitOk);
  CHECK(fs::exists(dir / "m" / "masking.tsv"));
  CHECK(fs::exists(dir / "m" / "masking.json"));
  CHECK(fs::exists(dir / "m" / "masking.svg"));
  std::string tsv = read_file(dir / "m" / "masking.tsv");
  CHECK(tsv.find("LOCO\t0\t0.0000\t0.0000") != std::string::npos);
}
