#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "congesta/artifacts.hpp"

using namespace congesta;
namespace fs = std::filesystem;

namespace {

const fs::path kBench = CONGESTA_BENCH_DIR;

struct Result {
  int code = -1;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("congesta_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI, returns its exit code and stderr.
Result cli(const std::string& args, const std::string& env = "") {
  const fs::path err = fs::temp_directory_path() / "congesta_test_cli_stderr";
  const std::string cmd = env + " " + CONGESTA_EXE + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::string small_config(const std::string& extra_scheme = "") {
  return "[domain]\ndim = 1\n[boundary]\nu_left = 0\nu_right = 0\nrho_B = 1\n"
         "[initial]\nrho = uniform\nrho_mean = 0.5\nvelocity = sine\nu_amp = 0.5\n"
         "[potential]\nmu0 = 1\neta0 = 0.1\nq = 2\n"
         "[scheme]\nresolution = 32\nmodes = 3\ndt = 2e-3\nT = 0.01\n" +
         extra_scheme + "[congestion]\nalpha = 10\n";
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("run on the uniform benchmark writes three CSVs and a JSON summary") {
  const fs::path out = scratch("uniform");
  const Result r = cli("run " + (kBench / "uniform.cfg").string() + " --out " + out.string());
  CHECK(r.code == 0);
  for (const char* f : {"continuity.csv", "momentum.csv", "energy.csv", "summary.json"}) CHECK(fs::exists(out / f));
  const RunConfig cfg = parse_run_config((kBench / "uniform.cfg").string());
  CHECK(slurp(out / "summary.json").find(hex64(cfg.hash)) != std::string::npos);
  CHECK(slurp(out / "summary.json").find(version()) != std::string::npos);
}

TEST_CASE("config errors exit 2 with a line-anchored message") {
  const fs::path dir = scratch("badcfg");
  std::string text = small_config();
  text.erase(text.find("[potential]"), std::string("[potential]\nmu0 = 1\neta0 = 0.1\nq = 2\n").size());
  const Result r = cli("run " + write_cfg(dir, text).string() + " --out " + (dir / "o").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("run.cfg:") != std::string::npos);
  CHECK(r.err.find("[potential]") != std::string::npos);

  const Result typo = cli("run " + write_cfg(dir, small_config("tol = fast\n")).string());
  CHECK(typo.code == 2);
  CHECK(typo.err.find("run.cfg:21:") != std::string::npos);

  std::string ladder = small_config();
  ladder.replace(ladder.find("alpha = 10"), 10, "ladder = 40, 10");
  CHECK(cli("run " + write_cfg(dir, ladder).string()).code == 2);

  std::string full = small_config();
  full.replace(full.find("rho_mean = 0.5"), 14, "rho_mean = 1");
  CHECK(cli("run " + write_cfg(dir, full).string()).code == 2);

  CHECK(cli("run " + (dir / "absent.cfg").string()).code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("solver failure after retries exits 4") {
  const fs::path dir = scratch("solver");
  const Result r = cli("run " + write_cfg(dir, small_config("max_iter = 1\nmax_halvings = 0\ntol = 1e-14\n")).string() +
                       " --out " + (dir / "o").string());
  CHECK(r.code == 4);
}

TEST_CASE("output directory: --out beats CONGESTA_OUT") {
  const fs::path dir = scratch("outdir");
  const fs::path cfg = write_cfg(dir, small_config());
  CHECK(cli("run " + cfg.string(), "CONGESTA_OUT=" + (dir / "env").string()).code == 0);
  CHECK(fs::exists(dir / "env" / "summary.json"));
  CHECK(cli("run " + cfg.string() + " --out " + (dir / "flag").string(), "CONGESTA_OUT=" + (dir / "env2").string())
            .code == 0);
  CHECK(fs::exists(dir / "flag" / "summary.json"));
  CHECK_FALSE(fs::exists(dir / "env2"));
}

TEST_CASE("verify: soft verdicts exit 0, damaged artifacts exit 2") {
  const fs::path dir = scratch("verify");
  const fs::path cfg = write_cfg(dir, small_config());
  REQUIRE(cli("run " + cfg.string() + " --out " + (dir / "o").string()).code == 0);
  CHECK(cli("verify " + (dir / "o").string()).code == 0);
  CHECK(slurp(dir / "o" / "verify.json") == slurp(dir / "o" / "report.json"));

  // stress column scaled by 2: the energy verdict fails, the exit code does not
  const std::string energy = (dir / "o" / "energy.csv").string();
  CsvTable t = read_csv(energy);
  for (const char* col : {"dissipation_dual", "dissipation_pairing"})
    for (auto& row : t.rows) row[t.column(col)] *= 2.0;
  write_csv(energy, t.provenance, t.header, t.rows);
  CHECK(cli("verify " + (dir / "o").string()).code == 0);
  CHECK(slurp(dir / "o" / "verify.json").find("\"pass\": false") != std::string::npos);

  const std::string cont = slurp(dir / "o" / "continuity.csv");
  std::ofstream(dir / "o" / "continuity.csv") << cont.substr(0, cont.size() / 2);
  const Result r = cli("verify " + (dir / "o").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("continuity.csv") != std::string::npos);
  CHECK(cli("verify " + (dir / "missing").string()).code == 2);
}

TEST_CASE("ladder run writes one directory per alpha and a congestion table") {
  const fs::path dir = scratch("ladder");
  std::string text = small_config();
  text.replace(text.find("alpha = 10"), 10, "ladder = 10, 40");
  REQUIRE(cli("run " + write_cfg(dir, text).string() + " --out " + (dir / "o").string()).code == 0);
  CHECK(fs::exists(dir / "o" / "alpha_10" / "report.json"));
  CHECK(fs::exists(dir / "o" / "alpha_40" / "report.json"));
  const CsvTable t = read_csv((dir / "o" / "congestion.csv").string());
  CHECK(t.rows.size() == 10u);
  CHECK(cli("verify " + (dir / "o").string()).code == 0);
  CHECK(slurp(dir / "o" / "alpha_40" / "verify.json") == slurp(dir / "o" / "alpha_40" / "report.json"));
}

TEST_CASE("sweep writes points and fits; --workers does not change results") {
  const fs::path dir = scratch("sweep");
  std::string text = small_config() + "[sweep]\nalpha = 10, 20, 40\n";
  const fs::path cfg = write_cfg(dir, text);
  REQUIRE(cli("sweep " + cfg.string() + " --out " + (dir / "a").string() + " --workers 1").code == 0);
  REQUIRE(cli("sweep " + cfg.string() + " --out " + (dir / "b").string() + " --workers 3").code == 0);
  CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
  CHECK(read_csv((dir / "a" / "sweep.csv").string()).rows.size() == 3u);
  CHECK(slurp(dir / "a" / "sweep.json").find("\"fits\"") != std::string::npos);
  CHECK(cli("sweep " + write_cfg(dir, small_config()).string()).code == 2);
}
