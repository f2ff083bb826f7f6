#pragma once

#include <string>
#include <vector>

#include "congesta/limits.hpp"

namespace congesta {

const char* version();

/// First line of every CSV: "# congesta <version> config=<hash> seed=<seed>".
std::string provenance_line(const RunConfig& cfg);

/// Minimal RFC-4180 table: header row plus numeric rows, read back exactly.
struct CsvTable {
  std::string provenance;  // the leading comment, without "# "
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

std::string format_number(double x);  // "%.16e", round-trips every double
/// Columns flagged in `integer` are printed as integers.
void write_csv(const std::string& path, const std::string& provenance, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const std::vector<bool>& integer = {});
/// Throws ArtifactError naming file and line on a missing file, ragged row or bad number.
CsvTable read_csv(const std::string& path);

/// Verdict report shared by run and verify; key order is fixed.
std::string report_json(const Simulation& sim, const RunRecord& rec, const EnergyVerdict& energy,
                        const LimitsReport& limits);

/// Writes continuity.csv, momentum.csv, energy.csv, summary.json, report.json, config.cfg
/// and fields/{rho,v}.csv (plus fields/rho_star.csv for a cellwise threshold) into dir (created if needed).
void write_run(const std::string& dir, const Simulation& sim, const RunRecord& rec, const LimitsReport& limits);

/// A run read back from its directory.
struct StoredRun {
  RunConfig config;
  RunRecord record;
};

/// Reads the artifacts written by write_run. Throws ArtifactError on missing, truncated or
/// inconsistent files.
StoredRun read_run(const std::string& dir);

struct VerifyResult {
  std::string report;  // identical to report.json when the artifacts are intact
  bool energy_pass = false;
  bool matches_run_report = false;
};

/// Recomputes every verdict from the stored fields and rows (no re-simulation) and writes
/// verify.json into dir.
VerifyResult verify_run(const std::string& dir);

/// Sweep outputs: sweep.csv (one row per point) and sweep.json (points and fits).
void write_sweep(const std::string& dir, const RunConfig& base, const SweepReport& rep);

/// Ladder outputs for a run whose config lists alpha values: alpha_<value>/ run
/// directories plus congestion.csv (one row per alpha and step).
struct LadderEntry {
  double alpha = 0.0;
  RunRecord record;
};
void write_ladder_table(const std::string& dir, const RunConfig& cfg, const std::vector<LadderEntry>& runs);

}  // namespace congesta
