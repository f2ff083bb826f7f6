// congesta run|sweep|verify
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "congesta/artifacts.hpp"

using namespace congesta;
namespace fs = std::filesystem;

namespace {

int exit_code(const Error& e) {
  switch (e.kind()) {
    case FailureKind::kConfig: return 2;
    case FailureKind::kAssertion: return 3;
    case FailureKind::kSolver: return 4;
  }
  return 4;
}

// --out beats CONGESTA_OUT beats [output] dir beats out/<config stem>.
std::string output_dir(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CONGESTA_OUT"); env && *env) return env;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return (fs::path("out") / fs::path(cfg.path).stem()).string();
}

std::string alpha_dir(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "alpha_%g", a);
  return buf;
}

const char* yes(bool b) { return b ? "pass" : "FAIL"; }

RunRecord single_run(const RunConfig& cfg, const std::string& dir) {
  Simulation sim(cfg);
  const RunRecord rec = sim.run();
  const LimitsReport lim = evaluate_limits(sim, rec);
  write_run(dir, sim, rec, lim);
  std::printf("%s: %d steps, sup rho %.6g (bound %.6g), max closure %.3g\n", dir.c_str(), rec.steps, rec.sup_rho,
              rec.bound, rec.max_closure);
  std::printf("  energy %s (max residual %.3g)  dissipative %s  lemma %s  compatibility %s\n",
              yes(rec.energy_verdict.pass), rec.energy_verdict.max_residual, yes(lim.dissipative.pass()),
              lim.lemma.consistent() ? "consistent" : "INCONSISTENT", lim.compatibility.status.c_str());
  return rec;
}

int cmd_sweep(const RunConfig& base_in, const std::string& dir, int workers) {
  RunConfig base = base_in;
  if (base.sweep.axes.empty()) {
    if (base.congestion.ladder.empty()) throw ConfigError(base.path + ": sweep needs a [sweep] axis or a ladder");
    base.sweep.axes.push_back({"alpha", base.congestion.ladder});
  }
  if (workers <= 0) workers = base.sweep.workers;
  const auto t0 = std::chrono::steady_clock::now();
  const SweepReport rep = run_sweep(base, workers);
  write_sweep(dir, base, rep);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s: %zu points on %d workers in %.1f s\n", dir.c_str(), rep.points.size(), rep.workers, secs);
  for (const RateFit& f : rep.fits)
    std::printf("  %s vs %s: slope %.4g (r2 %.4g, %d points)\n", f.quantity.c_str(), f.axis.c_str(), f.slope, f.r2,
                f.points);
  for (const SweepPoint& p : rep.points)
    if (!p.ok) {
      std::fprintf(stderr, "point alpha=%g delta=%g eps=%g dt=%g n=%d N=%d failed: %s\n", p.alpha, p.delta, p.eps,
                   p.dt, p.n, p.resolution, p.error.c_str());
      return p.exit_kind;
    }
  return 0;
}

int cmd_run(const RunConfig& cfg, const std::string& dir, int workers) {
  if (cfg.congestion.ladder.empty() && !cfg.sweep.axes.empty()) return cmd_sweep(cfg, dir, workers);
  if (cfg.congestion.ladder.empty()) {
    single_run(cfg, dir);
    return 0;
  }
  std::vector<LadderEntry> runs;
  for (double a : cfg.congestion.ladder) {
    RunConfig c = cfg;
    c.congestion.alpha = a;
    c.congestion.ladder.clear();
    runs.push_back({a, single_run(c, (fs::path(dir) / alpha_dir(a)).string())});
  }
  write_ladder_table(dir, cfg, runs);
  for (const LadderEntry& e : runs)
    std::printf("  alpha %-6g overshoot L2 %.4g  complementarity %.4g  congested div %.4g\n", e.alpha,
                e.record.overshoot_L2_max, e.record.complementarity_integral, e.record.congested_divergence_L2t);
  return 0;
}

int verify_one(const std::string& dir) {
  const VerifyResult r = verify_run(dir);
  std::printf("%s: energy %s, report %s\n", dir.c_str(), yes(r.energy_pass),
              r.matches_run_report ? "matches report.json" : "DIFFERS from report.json");
  return 0;
}

int cmd_verify(const std::string& dir) {
  if (!fs::exists(fs::path(dir) / "config.cfg") && fs::is_directory(dir)) {
    // a ladder directory: verify every rung
    std::vector<fs::path> rungs;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_directory() && e.path().filename().string().rfind("alpha_", 0) == 0) rungs.push_back(e.path());
    if (!rungs.empty()) {
      std::sort(rungs.begin(), rungs.end());
      for (const fs::path& p : rungs) verify_one(p.string());
      return 0;
    }
  }
  return verify_one(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"congesta: congested power-law fluid solver with limit verdicts"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  std::string out;
  int workers = 0;
  app.add_option("--out", out, "Output directory (overrides CONGESTA_OUT and [output] dir)");
  app.add_option("--workers", workers, "Sweep worker threads (overrides [sweep] workers)")->check(CLI::PositiveNumber);

  std::string cfg_path, run_dir;
  CLI::App* run = app.add_subcommand("run", "Single run, alpha ladder, or sweep from a config");
  run->add_option("config", cfg_path, "Config file")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep with rate fits");
  sweep->add_option("config", cfg_path, "Config file")->required();
  CLI::App* verify = app.add_subcommand("verify", "Recompute verdicts from a run directory");
  verify->add_option("dir", run_dir, "Run directory")->required();
  for (CLI::App* sub : {run, sweep}) {
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--workers", workers, "Sweep worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return cmd_verify(run_dir);
    const RunConfig cfg = parse_run_config(cfg_path);
    const std::string dir = output_dir(out, cfg);
    return *sweep ? cmd_sweep(cfg, dir, workers) : cmd_run(cfg, dir, workers);
  } catch (const Error& e) {
    std::fprintf(stderr, "congesta: %s\n", e.what());
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "congesta: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "congesta: internal error: %s\n", e.what());
    return 4;
  }
}
