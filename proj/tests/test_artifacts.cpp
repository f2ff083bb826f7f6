#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "congesta/artifacts.hpp"

using namespace congesta;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"([domain]
dim = 1
[boundary]
u_left = 0
u_right = 0
rho_B = 0.5
[initial]
rho = cosine
rho_mean = 0.5
rho_amp = 0.1
velocity = sine
u_amp = 0.1
[potential]
mu0 = 1
eta0 = 0.1
q = 2
[scheme]
resolution = 32
modes = 4
dt = 2e-3
T = 0.02
[congestion]
alpha = 10
[output]
seed = 7
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("congesta_test_artifacts_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

fs::path make_run(const std::string& name, const std::string& text = kSmall) {
  const fs::path dir = scratch(name);
  Simulation sim(parse_run_config_text(text, "small.cfg"));
  const RunRecord rec = sim.run();
  write_run(dir.string(), sim, rec, evaluate_limits(sim, rec));
  return dir;
}

}  // namespace

TEST_CASE("format_number round-trips random doubles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(rng), ex(rng));
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
}

TEST_CASE("csv write/read keeps every bit and rejects damage") {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  const std::string path = (dir / "t.csv").string();
  std::vector<std::vector<double>> rows{{1, 0.1, 1.0 / 3.0}, {2, -2.5e-300, 1e300}};
  write_csv(path, "congesta test", {"step", "a", "b"}, rows, {true});
  const std::string text = slurp(path);
  CHECK(text.rfind("# congesta test\nstep,a,b\n1,", 0) == 0);
  const CsvTable t = read_csv(path);
  CHECK(t.provenance == "congesta test");
  CHECK(t.column("b") == 2);
  CHECK(t.column("missing") == -1);
  REQUIRE(t.rows.size() == 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(t.rows[i][j] == rows[i][j]);

  spit(path, text.substr(0, text.size() - 5));
  CHECK_THROWS_AS(read_csv(path), ArtifactError);
  spit(path, "# p\na,b\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains(":3:"), ArtifactError);
  spit(path, "# p\na,b\n1,x\n");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("not a number"), ArtifactError);
  spit(path, "a,b\n1,2\n");
  CHECK_THROWS_AS(read_csv(path), ArtifactError);
  CHECK_THROWS_AS(read_csv((dir / "absent.csv").string()), ArtifactError);
}

TEST_CASE("run directory layout and provenance") {
  const fs::path dir = make_run("layout");
  for (const char* f : {"continuity.csv", "momentum.csv", "energy.csv", "summary.json", "report.json", "config.cfg",
                        "fields/rho.csv", "fields/v.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK_FALSE(fs::exists(dir / "fields/rho_star.csv"));
  const RunConfig cfg = parse_run_config_text(kSmall, "small.cfg");
  const std::string first = slurp(dir / "energy.csv").substr(0, slurp(dir / "energy.csv").find('\n'));
  CHECK(first == "# congesta " + std::string(version()) + " config=" + hex64(cfg.hash) + " seed=7");
  CHECK(slurp(dir / "config.cfg") == kSmall);
}

TEST_CASE("read_run restores the record exactly") {
  const RunConfig cfg = parse_run_config_text(kSmall, "small.cfg");
  Simulation sim(cfg);
  const RunRecord rec = sim.run();
  const fs::path dir = scratch("roundtrip");
  write_run(dir.string(), sim, rec, evaluate_limits(sim, rec));
  const StoredRun back = read_run(dir.string());
  CHECK(back.config.hash == cfg.hash);
  REQUIRE(back.record.energy.size() == rec.energy.size());
  REQUIRE(back.record.snapshots.size() == rec.snapshots.size());
  for (std::size_t i = 0; i < rec.energy.size(); ++i) {
    CHECK(back.record.energy[i].dissipation_dual == rec.energy[i].dissipation_dual);
    CHECK(back.record.energy[i].residual_dual == rec.energy[i].residual_dual);
    CHECK(back.record.continuity[i].closure == rec.continuity[i].closure);
    CHECK(back.record.momentum[i].iterations == rec.momentum[i].iterations);
  }
  const Snapshot& a = rec.snapshots.back();
  const Snapshot& b = back.record.snapshots.back();
  CHECK(a.step == b.step);
  CHECK(a.rho == b.rho);
  CHECK((a.v.array() == b.v.array()).all());
}

TEST_CASE("verify reproduces report.json byte for byte") {
  const fs::path dir = make_run("verify");
  const VerifyResult r1 = verify_run(dir.string());
  CHECK(r1.matches_run_report);
  CHECK(r1.energy_pass);
  const std::string v1 = slurp(dir / "verify.json");
  const VerifyResult r2 = verify_run(dir.string());
  CHECK(slurp(dir / "verify.json") == v1);
  CHECK(v1 == slurp(dir / "report.json"));
  CHECK(r2.report == r1.report);
}

TEST_CASE("verify flags a corrupted dissipation column without throwing") {
  const fs::path dir = make_run("corrupt");
  const CsvTable t = read_csv((dir / "energy.csv").string());
  const int col = t.column("dissipation_dual");
  REQUIRE(col >= 0);
  auto rows = t.rows;
  for (auto& r : rows) r[col] += 1.0;
  write_csv((dir / "energy.csv").string(), t.provenance, t.header, rows);
  VerifyResult r;
  REQUIRE_NOTHROW(r = verify_run(dir.string()));
  CHECK_FALSE(r.energy_pass);
  CHECK_FALSE(r.matches_run_report);
}

TEST_CASE("truncated or inconsistent artifacts raise ArtifactError") {
  SUBCASE("truncated momentum.csv") {
    const fs::path dir = make_run("trunc");
    const std::string m = slurp(dir / "momentum.csv");
    spit(dir / "momentum.csv", m.substr(0, m.rfind('\n', m.size() - 2) + 1));
    CHECK_THROWS_WITH_AS(verify_run(dir.string()), doctest::Contains("truncated"), ArtifactError);
  }
  SUBCASE("cut mid-line") {
    const fs::path dir = make_run("cut");
    const std::string m = slurp(dir / "fields/v.csv");
    spit(dir / "fields/v.csv", m.substr(0, m.size() - 7));
    CHECK_THROWS_AS(verify_run(dir.string()), ArtifactError);
  }
  SUBCASE("config edited after the run") {
    const fs::path dir = make_run("edited");
    spit(dir / "config.cfg", std::string(kSmall) + "# edit\n");
    CHECK_THROWS_WITH_AS(verify_run(dir.string()), doctest::Contains("hash"), ArtifactError);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(verify_run((scratch("nothing") / "x").string()), ArtifactError);
  }
}

TEST_CASE("cellwise threshold is stored and reused by verify") {
  const fs::path src = scratch("star_src");
  fs::create_directories(src);
  {
    std::ofstream star(src / "star.txt");
    for (int c = 0; c < 32; ++c) star << (c < 16 ? 1.0 : 0.9) << "\n";
  }
  std::string text = kSmall;
  text.replace(text.find("alpha = 10"), 10, "alpha = 10\nrho_star_file = star.txt");
  Simulation sim(parse_run_config_text(text, (src / "run.cfg").string(), src.string()));
  const RunRecord rec = sim.run();
  const fs::path dir = scratch("star_run");
  write_run(dir.string(), sim, rec, evaluate_limits(sim, rec));
  CHECK(fs::exists(dir / "fields/rho_star.csv"));
  fs::remove_all(src);
  const VerifyResult r = verify_run(dir.string());
  CHECK(r.matches_run_report);
}
