#include "congesta/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace congesta {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  const std::size_t p = s.find_first_of("#;");
  return p == std::string::npos ? s : s.substr(0, p);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size();
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source_ = source;
  doc.text_ = text;
  std::istringstream in(text);
  std::string raw, current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw ConfigError(source + ":" + std::to_string(line) + ": malformed section header '" + s + "'");
      current = trim(s.substr(1, s.size() - 2));
      if (doc.sections_.count(current))
        throw ConfigError(source + ":" + std::to_string(line) + ": duplicate section [" + current + "]");
      doc.sections_[current].line = line;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value', got '" + s + "'");
    if (current.empty())
      throw ConfigError(source + ":" + std::to_string(line) + ": key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    Section& sec = doc.sections_[current];
    if (sec.entries.count(key))
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' in [" + current + "]");
    sec.entries[key] = {trim(s.substr(eq + 1)), line};
    sec.order.push_back(key);
  }
  doc.last_line_ = std::max(line, 1);
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool IniDocument::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool IniDocument::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.entries.count(key) > 0;
}

void IniDocument::require_section(const std::string& section) const {
  if (!has_section(section))
    throw ConfigError(source_ + ":" + std::to_string(last_line_) + ": missing required section [" + section + "]");
}

const IniDocument::Entry& IniDocument::entry(const std::string& section, const std::string& key) const {
  require_section(section);
  const Section& sec = sections_.at(section);
  auto it = sec.entries.find(key);
  if (it == sec.entries.end())
    throw ConfigError(source_ + ":" + std::to_string(sec.line) + ": [" + section + "] is missing key '" + key + "'");
  return it->second;
}

std::string IniDocument::where(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return source_ + ":" + std::to_string(last_line_);
  if (key.empty()) return source_ + ":" + std::to_string(it->second.line);
  auto e = it->second.entries.find(key);
  return source_ + ":" + std::to_string(e == it->second.entries.end() ? it->second.line : e->second.line);
}

std::string IniDocument::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::string IniDocument::get_string(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
  return has(section, key) ? entry(section, key).value : fallback;
}

double IniDocument::get_double(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  double v;
  if (!parse_number(e.value, v))
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + key + "' expects a number, got '" + e.value + "'");
  return v;
}

double IniDocument::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int IniDocument::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = entry(section, key);
  double v;
  if (!parse_number(e.value, v) || v != std::floor(v) || std::abs(v) > 2e9)
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + key + "' expects an integer, got '" + e.value +
                      "'");
  return static_cast<int>(v);
}

bool IniDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = entry(section, key);
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + key + "' expects true/false, got '" + e.value + "'");
}

std::vector<double> IniDocument::get_list(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_number(item, v))
      throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + key + "' expects a comma-separated list of numbers");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(source_ + ":" + std::to_string(e.line) + ": '" + key + "' is empty");
  return out;
}

void IniDocument::check_keys(const std::string& section, const std::vector<std::string>& allowed) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return;
  for (const auto& key : it->second.order)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where(section, key) + ": unknown key '" + key + "' in [" + section + "]");
}

void IniDocument::check_sections(const std::vector<std::string>& allowed) const {
  for (const auto& [name, sec] : sections_)
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      throw ConfigError(source_ + ":" + std::to_string(sec.line) + ": unknown section [" + name + "]");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void require(bool ok, const IniDocument& doc, const std::string& section, const std::string& key,
             const std::string& msg) {
  if (!ok) throw ConfigError(doc.where(section, key) + ": " + msg);
}

std::string resolve(const std::string& base, const std::string& file) {
  if (file.empty()) return file;
  std::filesystem::path p(file);
  if (p.is_absolute()) return file;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

const std::vector<std::string> kSweepAxes = {"alpha", "delta", "eps", "n", "resolution", "dt"};

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& source, const std::string& base_dir) {
  const IniDocument doc = IniDocument::parse(text, source);
  for (const char* s : {"domain", "boundary", "initial", "potential", "scheme", "congestion"}) doc.require_section(s);
  doc.check_sections({"domain", "boundary", "initial", "potential", "scheme", "congestion", "sweep", "limits", "output"});
  doc.check_keys("domain", {"dim"});
  doc.check_keys("boundary", {"u_left", "u_right", "U0", "A", "rho_B"});
  doc.check_keys("initial", {"rho", "rho_mean", "rho_amp", "rho_mode", "rho_file", "velocity", "u_amp", "u_mode",
                             "u_component", "u_file"});
  doc.check_keys("potential", {"mu0", "mu1", "eta0", "eta1", "q", "delta"});
  doc.check_keys("scheme", {"resolution", "modes", "quad_points", "dt", "T", "tol", "max_iter", "max_halvings", "eps",
                            "tau_c", "freeze_density", "snapshot_every", "energy_tol"});
  doc.check_keys("congestion", {"alpha", "ladder", "rho_star", "rho_star_file"});
  std::vector<std::string> sweep_keys = kSweepAxes;
  sweep_keys.push_back("workers");
  doc.check_keys("sweep", sweep_keys);
  doc.check_keys("limits", {"d_lower", "d_upper", "block", "defect_tol", "gap_tol", "pairing_tol", "residual_tol", "div_tol"});
  doc.check_keys("output", {"dir", "seed"});

  RunConfig c;
  c.path = source;
  c.text = text;
  c.hash = fnv1a64(text);

  c.dim = doc.get_int("domain", "dim", 1);
  require(c.dim == 1 || c.dim == 2, doc, "domain", "dim", "dim must be 1 or 2");

  c.boundary.dim = c.dim;
  c.boundary.rhoB = doc.get_double("boundary", "rho_B", 1.0);
  if (c.dim == 1) {
    require(!doc.has("boundary", "U0") && !doc.has("boundary", "A"), doc, "boundary", "U0",
            "U0/A describe a 2D boundary velocity; use u_left/u_right in 1D");
    const double l = doc.get_double("boundary", "u_left", 0.0), r = doc.get_double("boundary", "u_right", 0.0);
    c.boundary = BoundarySpec::endpoints(l, r, c.boundary.rhoB);
  } else {
    require(!doc.has("boundary", "u_left") && !doc.has("boundary", "u_right"), doc, "boundary", "u_left",
            "u_left/u_right describe a 1D boundary velocity; use U0/A in 2D");
    if (doc.has("boundary", "U0")) {
      const auto u = doc.get_list("boundary", "U0");
      require(u.size() == 2, doc, "boundary", "U0", "U0 needs 2 components");
      c.boundary.U0 = {u[0], u[1]};
    }
    if (doc.has("boundary", "A")) {
      const auto a = doc.get_list("boundary", "A");
      require(a.size() == 4, doc, "boundary", "A", "A needs 4 entries (row-major)");
      for (int k = 0; k < 4; ++k) c.boundary.A[k] = a[k];
    }
  }

  InitialSpec& in = c.initial;
  in.rho_profile = doc.get_string("initial", "rho", "uniform");
  require(in.rho_profile == "uniform" || in.rho_profile == "cosine" || in.rho_profile == "noise" ||
              in.rho_profile == "file",
          doc, "initial", "rho", "rho must be uniform, cosine, noise or file");
  in.rho_mean = doc.get_double("initial", "rho_mean", 0.5);
  in.rho_amp = doc.get_double("initial", "rho_amp", 0.0);
  in.rho_mode = doc.get_int("initial", "rho_mode", 1);
  in.rho_file = resolve(base_dir, doc.get_string("initial", "rho_file", ""));
  require(in.rho_profile != "file" || !in.rho_file.empty(), doc, "initial", "rho", "rho = file needs rho_file");
  in.velocity_profile = doc.get_string("initial", "velocity", "boundary");
  require(in.velocity_profile == "boundary" || in.velocity_profile == "sine" || in.velocity_profile == "file", doc,
          "initial", "velocity", "velocity must be boundary, sine or file");
  in.u_amp = doc.get_double("initial", "u_amp", 0.0);
  in.u_mode = doc.get_int("initial", "u_mode", 1);
  in.u_component = doc.get_int("initial", "u_component", 0);
  require(in.u_component >= 0 && in.u_component < c.dim, doc, "initial", "u_component", "u_component out of range");
  in.u_file = resolve(base_dir, doc.get_string("initial", "u_file", ""));
  require(in.velocity_profile != "file" || !in.u_file.empty(), doc, "initial", "velocity",
          "velocity = file needs u_file");

  PotentialSpec& p = c.potential;
  p.mu0 = doc.get_double("potential", "mu0");
  p.mu1 = doc.get_double("potential", "mu1", 0.0);
  p.eta0 = doc.get_double("potential", "eta0", 0.0);
  p.eta1 = doc.get_double("potential", "eta1", 0.0);
  p.q = doc.get_double("potential", "q");
  c.delta = doc.get_double("potential", "delta", 0.0);
  try {
    p.validate(c.dim);
  } catch (const ConfigError& e) {
    throw ConfigError(doc.where("potential") + ": " + e.what());
  }
  require(c.delta >= 0.0, doc, "potential", "delta", "delta must be >= 0");
  if (c.delta == 0.0 && p.q < 2.0) {
    // the implicit step needs a bounded Hessian; the bare power law has none at 0
    require(c.dim == 1 || p.mu1 > 0.0, doc, "potential", "q",
            "q < 2 with delta = 0 needs mu1 > 0 (the deviatoric Hessian is unbounded at 0)");
    require(p.eta0 == 0.0 || p.eta1 > 0.0, doc, "potential", "q",
            "q < 2 with delta = 0 needs eta1 > 0 (the trace Hessian is unbounded at 0)");
  }

  SchemeConfig& s = c.scheme;
  s.resolution = doc.get_int("scheme", "resolution", s.resolution);
  s.modes = doc.get_int("scheme", "modes", s.modes);
  s.quad_points = doc.get_int("scheme", "quad_points", s.quad_points);
  s.dt = doc.get_double("scheme", "dt", s.dt);
  s.T = doc.get_double("scheme", "T", s.T);
  s.tol = doc.get_double("scheme", "tol", s.tol);
  s.max_iter = doc.get_int("scheme", "max_iter", s.max_iter);
  s.max_halvings = doc.get_int("scheme", "max_halvings", s.max_halvings);
  s.eps = doc.get_double("scheme", "eps", s.eps);
  s.tau_c = doc.get_double("scheme", "tau_c", s.tau_c);
  s.freeze_density = doc.get_bool("scheme", "freeze_density", s.freeze_density);
  s.snapshot_every = doc.get_int("scheme", "snapshot_every", s.snapshot_every);
  s.energy_tol = doc.get_double("scheme", "energy_tol", s.energy_tol);
  require(s.resolution >= 2, doc, "scheme", "resolution", "resolution must be >= 2");
  require(s.modes >= 1, doc, "scheme", "modes", "modes must be >= 1");
  require(s.quad_points >= 1 && s.quad_points <= 32, doc, "scheme", "quad_points", "quad_points must be in [1, 32]");
  require(s.dt > 0.0, doc, "scheme", "dt", "dt must be > 0");
  require(s.T > 0.0, doc, "scheme", "T", "T must be > 0");
  require(s.tol > 0.0, doc, "scheme", "tol", "tol must be > 0");
  require(s.max_iter >= 1, doc, "scheme", "max_iter", "max_iter must be >= 1");
  require(s.max_halvings >= 0, doc, "scheme", "max_halvings", "max_halvings must be >= 0");
  require(s.eps > 0.0, doc, "scheme", "eps", "eps must be > 0");
  require(s.tau_c >= 0.0 && s.tau_c < 1.0, doc, "scheme", "tau_c", "tau_c must be in [0, 1)");
  require(s.snapshot_every >= 0, doc, "scheme", "snapshot_every", "snapshot_every must be >= 0");
  require(s.energy_tol > 0.0, doc, "scheme", "energy_tol", "energy_tol must be > 0");

  CongestionConfig& g = c.congestion;
  require(doc.has("congestion", "alpha") || doc.has("congestion", "ladder"), doc, "congestion", "",
          "[congestion] needs alpha or ladder");
  if (doc.has("congestion", "ladder")) {
    g.ladder = doc.get_list("congestion", "ladder");
    require(std::is_sorted(g.ladder.begin(), g.ladder.end()) &&
                std::adjacent_find(g.ladder.begin(), g.ladder.end()) == g.ladder.end(),
            doc, "congestion", "ladder", "ladder must be strictly ascending");
    g.alpha = g.ladder.front();
  }
  g.alpha = doc.get_double("congestion", "alpha", g.alpha);
  for (double a : g.ladder) require(a > 1.0, doc, "congestion", "ladder", "every alpha must be > 1");
  require(g.alpha > 1.0, doc, "congestion", "alpha", "alpha must be > 1");
  g.rho_star = doc.get_double("congestion", "rho_star", 1.0);
  require(g.rho_star > 0.0, doc, "congestion", "rho_star", "rho_star must be > 0");
  g.rho_star_file = resolve(base_dir, doc.get_string("congestion", "rho_star_file", ""));

  if (doc.has_section("sweep")) {
    c.sweep.workers = doc.get_int("sweep", "workers", 1);
    require(c.sweep.workers >= 1, doc, "sweep", "workers", "workers must be >= 1");
    for (const auto& axis : kSweepAxes) {
      if (!doc.has("sweep", axis)) continue;
      auto vals = doc.get_list("sweep", axis);
      require(vals.size() >= 2, doc, "sweep", axis, "a swept axis needs at least 2 values");
      require(std::is_sorted(vals.begin(), vals.end()), doc, "sweep", axis, "sweep values must be ascending");
      for (double v : vals) require(v > 0.0, doc, "sweep", axis, "sweep values must be positive");
      c.sweep.axes.emplace_back(axis, std::move(vals));
    }
  }

  LimitsConfig& l = c.limits;
  l.d_lower = doc.get_double("limits", "d_lower", l.d_lower);
  l.d_upper = doc.get_double("limits", "d_upper", l.d_upper);
  l.block = doc.get_int("limits", "block", l.block);
  l.defect_tol = doc.get_double("limits", "defect_tol", l.defect_tol);
  l.gap_tol = doc.get_double("limits", "gap_tol", l.gap_tol);
  l.pairing_tol = doc.get_double("limits", "pairing_tol", l.pairing_tol);
  l.residual_tol = doc.get_double("limits", "residual_tol", l.residual_tol);
  l.div_tol = doc.get_double("limits", "div_tol", l.div_tol);
  require(l.d_lower > 0.0 && l.d_lower <= l.d_upper, doc, "limits", "d_lower", "need 0 < d_lower <= d_upper");
  require(l.block >= 4, doc, "limits", "block", "block must be >= 4 cells");
  require(c.scheme.resolution % l.block == 0, doc, "limits", "block", "block must divide the resolution");
  for (const char* k : {"defect_tol", "gap_tol", "pairing_tol", "residual_tol", "div_tol"})
    require(doc.get_double("limits", k, 1.0) > 0.0, doc, "limits", k, std::string(k) + " must be > 0");

  c.out_dir = doc.get_string("output", "dir", "");
  const double seed = doc.get_double("output", "seed", 0.0);
  require(seed >= 0.0 && seed == std::floor(seed), doc, "output", "seed", "seed must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.initial.seed = c.seed;
  return c;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_run_config_text(ss.str(), path, base.empty() ? "." : base);
}

}  // namespace congesta
