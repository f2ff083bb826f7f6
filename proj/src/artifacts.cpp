#include "congesta/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include "json.hpp"

namespace congesta {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// A named row member; int members print as integers.
template <class Row>
struct Field {
  const char* name;
  std::variant<double Row::*, int Row::*> member;

  double get(const Row& r) const {
    return std::visit([&](auto m) { return static_cast<double>(r.*m); }, member);
  }
  void set(Row& r, double x) const {
    if (auto* m = std::get_if<double Row::*>(&member)) r.**m = x;
    else r.*std::get<int Row::*>(member) = static_cast<int>(std::lround(x));
  }
  bool integer() const { return std::holds_alternative<int Row::*>(member); }
};

const std::vector<Field<ContinuityRow>>& continuity_fields() {
  using R = ContinuityRow;
  static const std::vector<Field<R>> f{
      {"step", &R::step},       {"t", &R::t},
      {"dt", &R::dt},           {"mass", &R::mass},
      {"inflow", &R::inflow},   {"outflow", &R::outflow},
      {"diffusive", &R::diffusive}, {"closure", &R::closure},
      {"drift", &R::drift},     {"sup_rho", &R::sup_rho},
      {"inf_rho", &R::inf_rho}, {"bound", &R::bound},
      {"formula_bound", &R::formula_bound}, {"renorm_entropy", &R::renorm_entropy}};
  return f;
}

const std::vector<Field<MomentumRow>>& momentum_fields() {
  using R = MomentumRow;
  static const std::vector<Field<R>> f{{"step", &R::step},
                                       {"t", &R::t},
                                       {"dt", &R::dt},
                                       {"iterations", &R::iterations},
                                       {"halvings", &R::halvings},
                                       {"kinetic", &R::kinetic},
                                       {"v_norm", &R::v_norm},
                                       {"max_div", &R::max_div},
                                       {"overshoot_L1", &R::overshoot_L1},
                                       {"overshoot_L2", &R::overshoot_L2},
                                       {"overshoot_L4", &R::overshoot_L4},
                                       {"complementarity", &R::complementarity},
                                       {"congested_divergence", &R::congested_divergence},
                                       {"pressure_mass", &R::pressure_mass},
                                       {"congested_pairing", &R::congested_pairing}};
  return f;
}

const std::vector<Field<EnergyLedger>>& energy_fields() {
  using R = EnergyLedger;
  static const std::vector<Field<R>> f{{"t", &R::t},
                                       {"dt", &R::dt},
                                       {"kinetic", &R::kinetic},
                                       {"pressure_potential", &R::pressure_potential},
                                       {"energy", &R::energy},
                                       {"energy_change", &R::energy_change},
                                       {"dissipation_primal", &R::dissipation_primal},
                                       {"dissipation_dual", &R::dissipation_dual},
                                       {"dissipation_pairing", &R::dissipation_pairing},
                                       {"boundary_out", &R::boundary_out},
                                       {"boundary_in_bregman", &R::boundary_in_bregman},
                                       {"eps_entropy", &R::eps_entropy},
                                       {"eps_coupling", &R::eps_coupling},
                                       {"rhs_convective", &R::rhs_convective},
                                       {"rhs_pressure", &R::rhs_pressure},
                                       {"rhs_transport", &R::rhs_transport},
                                       {"rhs_stress", &R::rhs_stress},
                                       {"rhs_inflow", &R::rhs_inflow},
                                       {"num_kinetic", &R::num_kinetic},
                                       {"num_potential", &R::num_potential},
                                       {"num_upwind", &R::num_upwind},
                                       {"min_point_gap", &R::min_point_gap},
                                       {"max_point_gap", &R::max_point_gap},
                                       {"residual", &R::residual},
                                       {"residual_dual", &R::residual_dual}};
  return f;
}

template <class Row>
void write_rows(const std::string& path, const std::string& prov, const std::vector<Field<Row>>& fields,
                const std::vector<Row>& rows) {
  std::vector<std::string> header;
  std::vector<bool> integer;
  for (const auto& f : fields) {
    header.emplace_back(f.name);
    integer.push_back(f.integer());
  }
  std::vector<std::vector<double>> table;
  table.reserve(rows.size());
  for (const Row& r : rows) {
    std::vector<double> line;
    for (const auto& f : fields) line.push_back(f.get(r));
    table.push_back(std::move(line));
  }
  write_csv(path, prov, header, table, integer);
}

template <class Row>
std::vector<Row> read_rows(const std::string& path, const std::string& prov, const std::vector<Field<Row>>& fields,
                           std::size_t expect) {
  const CsvTable t = read_csv(path);
  if (t.provenance != prov) throw ArtifactError(path + ":1: provenance '" + t.provenance + "' does not match config.cfg");
  if (t.header.size() != fields.size())
    throw ArtifactError(path + ":2: expected " + std::to_string(fields.size()) + " columns, found " +
                        std::to_string(t.header.size()));
  for (std::size_t j = 0; j < fields.size(); ++j)
    if (t.header[j] != fields[j].name)
      throw ArtifactError(path + ":2: column " + std::to_string(j + 1) + " is '" + t.header[j] + "', expected '" +
                          fields[j].name + "'");
  if (t.rows.size() != expect)
    throw ArtifactError(path + ": " + std::to_string(t.rows.size()) + " rows, summary.json records " +
                        std::to_string(expect) + " (truncated?)");
  std::vector<Row> rows(t.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < fields.size(); ++j) fields[j].set(rows[i], t.rows[i][j]);
  return rows;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArtifactError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ArtifactError("write failed for '" + path + "'");
}

double finite_or_nan(double x) { return std::isfinite(x) ? x : std::numeric_limits<double>::quiet_NaN(); }

void write_fields(const std::string& dir, const std::string& prov, const Simulation& sim, const RunRecord& rec) {
  fs::create_directories(fs::path(dir) / "fields");
  const int nc = sim.mesh().num_cells();
  const int nv = sim.basis().size();
  std::vector<std::string> hr{"step", "t"}, hv{"step", "t"};
  for (int c = 0; c < nc; ++c) hr.push_back("c" + std::to_string(c));
  for (int k = 0; k < nv; ++k) hv.push_back("v" + std::to_string(k));
  std::vector<bool> ir(hr.size(), false), iv(hv.size(), false);
  ir[0] = iv[0] = true;
  std::vector<std::vector<double>> rr, rv;
  for (const Snapshot& s : rec.snapshots) {
    std::vector<double> a{double(s.step), s.t}, b{double(s.step), s.t};
    a.insert(a.end(), s.rho.begin(), s.rho.end());
    b.insert(b.end(), s.v.data(), s.v.data() + s.v.size());
    rr.push_back(std::move(a));
    rv.push_back(std::move(b));
  }
  write_csv((fs::path(dir) / "fields" / "rho.csv").string(), prov, hr, rr, ir);
  write_csv((fs::path(dir) / "fields" / "v.csv").string(), prov, hv, rv, iv);
  if (!sim.pressure().homogeneous()) {
    std::vector<std::vector<double>> star;
    for (int c = 0; c < nc; ++c) star.push_back({sim.pressure().threshold(c)});
    write_csv((fs::path(dir) / "fields" / "rho_star.csv").string(), prov, {"rho_star"}, star);
  }
}

ojson summary_json(const Simulation& sim, const RunRecord& rec) {
  const RunConfig& cfg = sim.config();
  ojson j;
  j["version"] = version();
  j["config_hash"] = hex64(cfg.hash);
  j["seed"] = cfg.seed;
  j["dim"] = cfg.dim;
  j["resolution"] = cfg.scheme.resolution;
  j["modes"] = cfg.scheme.modes;
  j["alpha"] = cfg.congestion.alpha;
  j["steps"] = rec.steps;
  j["rows"] = {{"continuity", rec.continuity.size()},
               {"momentum", rec.momentum.size()},
               {"energy", rec.energy.size()},
               {"snapshots", rec.snapshots.size()}};
  j["initial_energy"] = rec.initial_energy;
  j["sup_rho"] = rec.sup_rho;
  j["inf_rho"] = rec.inf_rho;
  j["bound"] = rec.bound;
  j["max_closure"] = rec.max_closure;
  j["mass_drift"] = rec.continuity.empty() ? 0.0 : rec.continuity.back().drift;
  j["overshoot_L2_max"] = rec.overshoot_L2_max;
  j["complementarity_integral"] = rec.complementarity_integral;
  j["congested_divergence_L2t"] = rec.congested_divergence_L2t;
  j["max_iterations"] = rec.max_iterations;
  j["halvings"] = rec.halvings;
  j["energy_pass"] = rec.energy_verdict.pass;
  return j;
}

}  // namespace

const char* version() { return CONGESTA_VERSION; }

std::string provenance_line(const RunConfig& cfg) {
  return std::string("congesta ") + version() + " config=" + hex64(cfg.hash) + " seed=" + std::to_string(cfg.seed);
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_csv(const std::string& path, const std::string& provenance, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const std::vector<bool>& integer) {
  std::ostringstream out;
  out << "# " << provenance << '\n';
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw ArtifactError(path + ": row width does not match the header");
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      if (j < integer.size() && integer[j]) out << static_cast<long long>(std::llround(r[j]));
      else out << format_number(r[j]);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_text(path);
  if (text.empty()) throw ArtifactError(path + ":1: empty file");
  if (text.back() != '\n') throw ArtifactError(path + ": truncated (no final newline)");
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line.rfind("# ", 0) != 0) throw ArtifactError(path + ":1: missing provenance line");
      t.provenance = line.substr(2);
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (lineno == 2) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ArtifactError(path + ":" + std::to_string(lineno) + ": " + std::to_string(cells.size()) +
                          " fields, header has " + std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double x = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size())
        throw ArtifactError(path + ":" + std::to_string(lineno) + ": not a number: '" + c + "'");
      row.push_back(x);
    }
    t.rows.push_back(std::move(row));
  }
  if (lineno < 2) throw ArtifactError(path + ": missing header row");
  return t;
}

std::string report_json(const Simulation& sim, const RunRecord& rec, const EnergyVerdict& energy,
                        const LimitsReport& limits) {
  const RunConfig& cfg = sim.config();
  ojson j;
  j["version"] = version();
  j["config_hash"] = hex64(cfg.hash);
  j["seed"] = cfg.seed;

  double sup = 0.0, bound = 0.0, closure = 0.0, drift = 0.0;
  for (const ContinuityRow& r : rec.continuity) {
    sup = std::max(sup, r.sup_rho);
    bound = r.bound;
    closure = std::max(closure, std::abs(r.closure));
    drift = r.drift;
  }
  double gap = rec.energy.empty() ? 0.0 : rec.energy.front().min_point_gap;
  for (const EnergyLedger& e : rec.energy) gap = std::min(gap, e.min_point_gap);
  ojson hard;
  hard["max_principle"] = {{"sup_rho", sup}, {"bound", bound}, {"pass", sup <= bound * (1.0 + 1e-12) + 1e-12}};
  hard["mass_ledger"] = {{"max_closure", closure}, {"cumulative_drift", drift}};
  hard["fenchel_young_floor"] = {{"min_point_gap", gap}, {"pass", gap >= -1e-8}};
  hard["defect_nonnegative"] = {{"min_trace", limits.min_defect}, {"pass", limits.min_defect >= -1e-8}};
  j["hard_assertions"] = hard;

  j["energy"] = {{"pass", energy.pass},
                 {"form", energy.form},
                 {"tol", energy.tol},
                 {"initial_energy", energy.initial_energy},
                 {"max_residual", energy.max_residual},
                 {"max_residual_pairing", energy.max_residual_pairing},
                 {"margin", energy.margin},
                 {"worst_step", energy.worst_step}};

  const DefectEstimate& d = limits.defect;
  j["defect"] = {{"block", d.block},
                 {"blocks_per_axis", d.blocks_per_axis},
                 {"final_max_trace", d.max_trace},
                 {"final_integral_trace", d.integral_trace},
                 {"final_integral_kinetic", d.integral_kinetic},
                 {"ratio_bounds_ok", d.ratio_bounds_ok},
                 {"clamped", d.clamped},
                 {"min_trace", limits.min_defect},
                 {"max_trace", limits.max_defect}};

  const DissipativeVerdict& v = limits.dissipative;
  j["dissipative"] = {{"pass", v.pass()},
                      {"bank", v.bank_version},
                      {"bank_size", v.bank_size},
                      {"continuity_residual", v.continuity_residual},
                      {"continuity_worst", v.continuity_worst},
                      {"continuity_pass", v.continuity_pass},
                      {"momentum_residual", v.momentum_residual},
                      {"momentum_worst", v.momentum_worst},
                      {"momentum_pass", v.momentum_pass},
                      {"energy_margin", v.energy_margin},
                      {"energy_pass", v.energy_pass},
                      {"complementarity", v.complementarity},
                      {"complementarity_pass", v.complementarity_pass},
                      {"congested_divergence", v.congested_divergence},
                      {"congested_divergence_pass", v.congested_divergence_pass},
                      {"defect_final_trace", v.defect_final_trace},
                      {"sup_ratio", v.sup_ratio},
                      {"inf_rho", v.inf_rho},
                      {"bounds_ok", v.bounds_ok}};

  const LemmaVerdict& l = limits.lemma;
  j["lemma"] = {{"consistent", l.consistent()},
                {"i_holds", l.i_holds},
                {"ii_holds", l.ii_holds},
                {"i_implies_ii", l.i_implies_ii},
                {"ii_implies_i", l.ii_implies_i},
                {"congested_divergence", l.congested_divergence},
                {"div_tol", l.div_tol},
                {"rho0_min", l.rho0_min},
                {"rho0_max", l.rho0_max},
                {"rho_min", l.rho_min},
                {"rho_max", l.rho_max},
                {"rho_tol", l.rho_tol}};

  const CompatibilityVerdict& c = limits.compatibility;
  j["compatibility"] = {{"status", c.status},
                        {"smooth", c.smooth},
                        {"defect_ok", c.defect_ok},
                        {"gap_ok", c.gap_ok},
                        {"pairing_ok", c.pairing_ok},
                        {"energy_ok", c.energy_ok},
                        {"defect_max", c.defect_max},
                        {"gap_max", c.gap_max},
                        {"pairing_max", c.pairing_max},
                        {"overshoot_max", c.overshoot_max}};
  return j.dump(2) + "\n";
}

void write_run(const std::string& dir, const Simulation& sim, const RunRecord& rec, const LimitsReport& limits) {
  fs::create_directories(dir);
  const std::string prov = provenance_line(sim.config());
  const fs::path p(dir);
  write_rows((p / "continuity.csv").string(), prov, continuity_fields(), rec.continuity);
  write_rows((p / "momentum.csv").string(), prov, momentum_fields(), rec.momentum);
  write_rows((p / "energy.csv").string(), prov, energy_fields(), rec.energy);
  write_fields(dir, prov, sim, rec);
  write_text((p / "config.cfg").string(), sim.config().text);
  write_text((p / "summary.json").string(), summary_json(sim, rec).dump(2) + "\n");
  write_text((p / "report.json").string(), report_json(sim, rec, rec.energy_verdict, limits));
}

StoredRun read_run(const std::string& dir) {
  const fs::path p(dir);
  if (!fs::is_directory(p)) throw ArtifactError("'" + dir + "' is not a run directory");
  StoredRun out;
  const std::string cfg_path = (p / "config.cfg").string();
  try {
    out.config = parse_run_config_text(read_text(cfg_path), cfg_path, dir);
  } catch (const ConfigError& e) {
    throw ArtifactError(std::string("stored config: ") + e.what());
  }
  const fs::path star = p / "fields" / "rho_star.csv";
  out.config.congestion.rho_star_file = fs::exists(star) ? star.string() : std::string();
  if (fs::exists(star)) out.config.congestion.rho_star = 1.0;

  ojson summary;
  const std::string sum_path = (p / "summary.json").string();
  try {
    summary = ojson::parse(read_text(sum_path));
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(sum_path + ": " + e.what());
  }
  const std::string prov = provenance_line(out.config);
  if (summary.value("config_hash", std::string()) != hex64(out.config.hash))
    throw ArtifactError(sum_path + ": config hash does not match config.cfg");

  RunRecord& rec = out.record;
  try {
    // one rung of a ladder run: the stored text lists the ladder, the summary the rung
    if (!out.config.congestion.ladder.empty()) {
      out.config.congestion.alpha = summary.at("alpha").get<double>();
      out.config.congestion.ladder.clear();
    }
    const ojson& rows = summary.at("rows");
    rec.continuity = read_rows((p / "continuity.csv").string(), prov, continuity_fields(), rows.at("continuity").get<std::size_t>());
    rec.momentum = read_rows((p / "momentum.csv").string(), prov, momentum_fields(), rows.at("momentum").get<std::size_t>());
    rec.energy = read_rows((p / "energy.csv").string(), prov, energy_fields(), rows.at("energy").get<std::size_t>());
    const std::size_t ns = rows.at("snapshots").get<std::size_t>();
    const CsvTable tr = read_csv((p / "fields" / "rho.csv").string());
    const CsvTable tv = read_csv((p / "fields" / "v.csv").string());
    if (tr.rows.size() != ns || tv.rows.size() != ns)
      throw ArtifactError(dir + "/fields: snapshot count differs from summary.json (truncated?)");
    for (std::size_t i = 0; i < ns; ++i) {
      Snapshot s;
      s.step = static_cast<int>(tr.rows[i][0]);
      s.t = tr.rows[i][1];
      if (tv.rows[i][0] != tr.rows[i][0] || tv.rows[i][1] != s.t)
        throw ArtifactError(dir + "/fields/v.csv:" + std::to_string(i + 3) + ": snapshot does not match rho.csv");
      s.rho.assign(tr.rows[i].begin() + 2, tr.rows[i].end());
      s.v = Eigen::Map<const Eigen::VectorXd>(tv.rows[i].data() + 2, Eigen::Index(tv.rows[i].size() - 2));
      rec.snapshots.push_back(std::move(s));
    }
    rec.steps = summary.at("steps").get<int>();
    rec.sup_rho = summary.at("sup_rho").get<double>();
    rec.inf_rho = summary.at("inf_rho").get<double>();
    rec.bound = summary.at("bound").get<double>();
    rec.max_closure = summary.at("max_closure").get<double>();
    rec.overshoot_L2_max = summary.at("overshoot_L2_max").get<double>();
    rec.complementarity_integral = summary.at("complementarity_integral").get<double>();
    rec.congested_divergence_L2t = summary.at("congested_divergence_L2t").get<double>();
    rec.max_iterations = summary.at("max_iterations").get<int>();
    rec.halvings = summary.at("halvings").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(sum_path + ": " + e.what());
  }
  if (rec.snapshots.empty()) throw ArtifactError(dir + "/fields/rho.csv: no snapshots");
  return out;
}

VerifyResult verify_run(const std::string& dir) {
  StoredRun stored = read_run(dir);
  RunRecord& rec = stored.record;
  Simulation sim(stored.config, ExecPolicy::kParallel, false);
  const int nc = sim.mesh().num_cells();
  const int nv = sim.basis().size();
  for (const Snapshot& s : rec.snapshots)
    if (static_cast<int>(s.rho.size()) != nc || s.v.size() != nv)
      throw ArtifactError(dir + "/fields: snapshot width does not match the stored config");

  for (EnergyLedger& e : rec.energy) recompute_residuals(e);
  const Snapshot& s0 = rec.snapshots.front();
  rec.initial_energy = energy_state(sim.basis(), sim.pressure(), sim.mesh(), s0.rho, s0.v).total();
  rec.energy_verdict = assert_energy_inequality(rec.energy, rec.initial_energy, stored.config.scheme.energy_tol);
  const LimitsReport limits = evaluate_limits(sim, rec);

  VerifyResult r;
  r.report = report_json(sim, rec, rec.energy_verdict, limits);
  r.energy_pass = rec.energy_verdict.pass;
  const fs::path report = fs::path(dir) / "report.json";
  r.matches_run_report = fs::exists(report) && read_text(report.string()) == r.report;
  write_text((fs::path(dir) / "verify.json").string(), r.report);
  return r;
}

void write_sweep(const std::string& dir, const RunConfig& base, const SweepReport& rep) {
  fs::create_directories(dir);
  const std::vector<std::string> header{"alpha", "delta", "eps", "dt", "n", "resolution", "ok", "exit_kind",
                                        "terminal_kinetic", "terminal_v_norm", "energy_margin",
                                        "max_energy_residual", "overshoot_L2_max", "complementarity_integral",
                                        "congested_divergence_L2t", "max_closure", "mass_drift", "sup_rho", "steps",
                                        "max_iterations"};
  std::vector<bool> integer(header.size(), false);
  for (const char* k : {"n", "resolution", "ok", "exit_kind", "steps", "max_iterations"})
    integer[std::find(header.begin(), header.end(), k) - header.begin()] = true;
  std::vector<std::vector<double>> rows;
  ojson points = ojson::array();
  for (const SweepPoint& p : rep.points) {
    rows.push_back({p.alpha, p.delta, p.eps, p.dt, double(p.n), double(p.resolution), p.ok ? 1.0 : 0.0,
                    double(p.exit_kind), p.terminal_kinetic, p.terminal_v_norm, p.energy_margin,
                    p.max_energy_residual, p.overshoot_L2_max, p.complementarity_integral,
                    p.congested_divergence_L2t, p.max_closure, p.mass_drift, p.sup_rho, double(p.steps),
                    double(p.max_iterations)});
    ojson jp;
    for (std::size_t k = 0; k < header.size(); ++k) jp[header[k]] = rows.back()[k];
    jp["ok"] = p.ok;
    jp["error"] = p.error;
    points.push_back(std::move(jp));
  }
  write_csv((fs::path(dir) / "sweep.csv").string(), provenance_line(base), header, rows, integer);

  ojson j;
  j["version"] = version();
  j["config_hash"] = hex64(base.hash);
  j["seed"] = base.seed;
  j["workers"] = rep.workers;
  ojson axes = ojson::object();
  for (const auto& [name, values] : rep.axes) axes[name] = values;
  j["axes"] = axes;
  j["points"] = points;
  ojson fits = ojson::array();
  for (const RateFit& f : rep.fits)
    fits.push_back({{"axis", f.axis},
                    {"quantity", f.quantity},
                    {"points", f.points},
                    {"slope", finite_or_nan(f.slope)},
                    {"intercept", finite_or_nan(f.intercept)},
                    {"r2", finite_or_nan(f.r2)},
                    {"x", f.x},
                    {"y", f.y}});
  j["fits"] = fits;
  write_text((fs::path(dir) / "sweep.json").string(), j.dump(2) + "\n");
}

void write_ladder_table(const std::string& dir, const RunConfig& cfg, const std::vector<LadderEntry>& runs) {
  fs::create_directories(dir);
  const std::vector<std::string> header{"alpha",         "step",         "t",
                                        "overshoot_L1",  "overshoot_L2", "overshoot_L4",
                                        "complementarity", "congested_divergence", "pressure_mass",
                                        "congested_pairing"};
  std::vector<bool> integer(header.size(), false);
  integer[1] = true;
  std::vector<std::vector<double>> rows;
  for (const LadderEntry& e : runs)
    for (const MomentumRow& m : e.record.momentum)
      rows.push_back({e.alpha, double(m.step), m.t, m.overshoot_L1, m.overshoot_L2, m.overshoot_L4,
                      m.complementarity, m.congested_divergence, m.pressure_mass, m.congested_pairing});
  const std::string prov = provenance_line(cfg);
  write_csv((fs::path(dir) / "congestion.csv").string(), prov, header, rows, integer);

  std::vector<std::vector<double>> summary;
  for (const LadderEntry& e : runs)
    summary.push_back({e.alpha, e.record.overshoot_L2_max, e.record.complementarity_integral,
                       e.record.congested_divergence_L2t, e.record.sup_rho});
  write_csv((fs::path(dir) / "congestion_summary.csv").string(), prov,
            {"alpha", "overshoot_L2_max", "complementarity_integral", "congested_divergence_L2t", "sup_rho"},
            summary);
}

}  // namespace congesta
