#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "congesta/domain.hpp"
#include "congesta/potential.hpp"

namespace congesta {

/// Sectioned key = value text. Comments start with '#' or ';'. Every lookup error
/// names the file and line it refers to.
class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& source);
  static IniDocument load(const std::string& path);

  const std::string& source() const { return source_; }
  const std::string& text() const { return text_; }

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  /// Throws ConfigError anchored at the last line when the section is absent.
  void require_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  /// "source:line" of a key, or of the section header when key is empty.
  std::string where(const std::string& section, const std::string& key = "") const;

  /// Throws ConfigError at the header of the first section not in `allowed`.
  void check_sections(const std::vector<std::string>& allowed) const;
  /// Rejects keys outside `allowed` with a line-anchored message.
  void check_keys(const std::string& section, const std::vector<std::string>& allowed) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;

  std::string source_, text_;
  int last_line_ = 0;
  std::map<std::string, Section> sections_;
};

struct SchemeConfig {
  int resolution = 64;
  int modes = 4;
  int quad_points = 4;
  double dt = 1e-3;
  double T = 0.1;
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 5;
  double eps = 0.01;
  double tau_c = 0.01;
  bool freeze_density = false;
  int snapshot_every = 1;  // 0: initial and final state only; verdicts want every step
  double energy_tol = 1e-5;
};

struct CongestionConfig {
  double alpha = 10.0;
  std::vector<double> ladder;  // sorted ascending; empty for a single run
  double rho_star = 1.0;
  std::string rho_star_file;  // cellwise threshold, overrides rho_star
};

/// Parameter axes of a sweep. Each listed axis is crossed with the others.
struct SweepConfig {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  int workers = 1;
};

/// Constants and thresholds for the limit verdicts.
struct LimitsConfig {
  double d_lower = 2.0;  // lower sandwich constant for tr R / E
  double d_upper = 2.0;
  int block = 4;         // cells per block side for the defect estimator
  double defect_tol = 1e-5;
  double gap_tol = 1e-5;
  double pairing_tol = 1e-6;
  double residual_tol = 1e-4;
  double div_tol = 1e-2;  // congested divergence regarded as zero by the equivalence check
};

struct RunConfig {
  std::string path;
  std::string text;
  std::uint64_t hash = 0;
  std::uint64_t seed = 0;
  std::string out_dir;

  int dim = 1;
  BoundarySpec boundary;
  InitialSpec initial;
  PotentialSpec potential;
  double delta = 0.0;
  SchemeConfig scheme;
  CongestionConfig congestion;
  SweepConfig sweep;
  LimitsConfig limits;
};

/// Parses and validates a run configuration. Relative file paths inside the config
/// resolve against the config's directory. Throws ConfigError.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& source, const std::string& base_dir = ".");

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);

}  // namespace congesta
