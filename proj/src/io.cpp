#include "lmcf/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lmcf/geometry.hpp"
#include "lmcf/inequalities.hpp"
#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Every key the artifact understands, with its default. Defaults shared by
// more than one command live here once; unknown keys are hard errors.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "solution.kind",       "solution.time",      "solution.y_min",
      "solution.y_max",      "solution.samples",   "solution.amplitude",
      "solution.wavenumber", "solution.periods",   "solution.radius",
      "solution.x0",         "solution.y0",        "solution.x1",
      "solution.y1",         "solution.basepoint_index",
      "flow.t_start",        "flow.t_end",         "flow.scheme",
      "flow.dt",             "flow.cfl_safety",    "flow.snapshot_stride",
      "flow.reparametrize_every", "flow.boundary", "flow.max_steps",
      "verify.tol_r1",       "verify.tol_r2",      "verify.tol_r3",
      "verify.tol_cos_h",    "verify.tol_kato",    "verify.tol_min_cos_per_time",
      "verify.require_length_nonincreasing",
      "estimate.r_list",     "estimate.t_list",    "estimate.center_time",
      "estimate.basepoint_index", "estimate.delta", "estimate.b",
      "estimate.epsilon",    "estimate.profile_power", "estimate.audit_samples",
      "inequalities.samples", "inequalities.seed", "inequalities.a_max",
      "inequalities.b_max",  "inequalities.eps_min", "inequalities.eps_max",
      "inequalities.p_min",  "inequalities.p_max", "inequalities.xyz_max",
      "soliton.vx",          "soliton.vy",         "soliton.tolerance",
  };
  return keys;
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
    cfg.entries_[section + "." + key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  return entries_.count(section + "." + key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& def) const {
  const auto it = entries_.find(section + "." + key);
  return it == entries_.end() ? def : it->second;
}

double Config::get_double(const std::string& section, const std::string& key, double def) const {
  const auto it = entries_.find(section + "." + key);
  if (it == entries_.end()) return def;
  try {
    return parse_double(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + ": not a number: " + it->second);
  }
}

long Config::get_long(const std::string& section, const std::string& key, long def) const {
  const auto it = entries_.find(section + "." + key);
  if (it == entries_.end()) return def;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + ": not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool def) const {
  const auto it = entries_.find(section + "." + key);
  if (it == entries_.end()) return def;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key " + section + "." + key + ": not a boolean: " + it->second);
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key,
                                            const std::string& def) const {
  const std::string raw = get_string(section, key, def);
  std::vector<double> out;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw ConfigError("config key " + section + "." + key + ": not a number list: " + raw);
    }
  }
  return out;
}

void Config::enforce_known_keys() const {
  for (const auto& [key, value] : entries_)
    if (!known_keys().count(key)) throw ConfigError("unknown config key: " + key);
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("bad double: " + s);
  return v;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::string out = "time,index,x,y\n";
  for (const FlowState& s : traj.states) {
    const std::string t = format_double(s.time);
    for (std::size_t i = 0; i < s.curve.size(); ++i) {
      out += t;
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += format_double(s.curve.vertices[i].x);
      out += ',';
      out += format_double(s.curve.vertices[i].y);
      out += '\n';
    }
  }
  atomic_write_file(path, out);
}

namespace {

SolutionSpec solution_spec_from(const Config& cfg) {
  SolutionSpec spec;
  const std::string kind = cfg.get_string("solution", "kind", "");
  if (kind == "grim_reaper")
    spec.kind = SolutionKind::GrimReaper;
  else if (kind == "hairclip")
    spec.kind = SolutionKind::Hairclip;
  else if (kind == "line")
    spec.kind = SolutionKind::Line;
  else if (kind == "circle")
    spec.kind = SolutionKind::Circle;
  else if (kind == "sine_graph")
    spec.kind = SolutionKind::SineGraph;
  else
    throw ConfigError("solution.kind must be one of grim_reaper|hairclip|line|circle|sine_graph"
                      ", got: '" + kind + "'");
  spec.time = cfg.get_double("solution", "time", 0.0);
  spec.y_min = cfg.get_double("solution", "y_min", -1.3);
  spec.y_max = cfg.get_double("solution", "y_max", 1.3);
  spec.samples = static_cast<int>(cfg.get_long("solution", "samples", 400));
  spec.amplitude = cfg.get_double("solution", "amplitude", 0.2);
  spec.wavenumber = cfg.get_double("solution", "wavenumber", 1.0);
  spec.periods = static_cast<int>(cfg.get_long("solution", "periods", 1));
  spec.radius = cfg.get_double("solution", "radius", 1.0);
  spec.line_from = {cfg.get_double("solution", "x0", 0.0), cfg.get_double("solution", "y0", 0.0)};
  spec.line_to = {cfg.get_double("solution", "x1", 1.0), cfg.get_double("solution", "y1", 0.0)};
  spec.basepoint = static_cast<int>(cfg.get_long("solution", "basepoint_index", -1));
  return spec;
}

std::string kind_name(SolutionKind k) {
  switch (k) {
    case SolutionKind::GrimReaper: return "grim_reaper";
    case SolutionKind::Hairclip: return "hairclip";
    case SolutionKind::Line: return "line";
    case SolutionKind::Circle: return "circle";
    case SolutionKind::SineGraph: return "sine_graph";
  }
  return "?";
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ExplicitCfl: return "explicit_cfl";
    case Scheme::FixedEuler: return "fixed";
    case Scheme::SemiImplicit: return "semi_implicit";
  }
  return "?";
}

std::string boundary_name(BoundaryPolicy b) {
  switch (b) {
    case BoundaryPolicy::PinToExact: return "pin_to_exact";
    case BoundaryPolicy::FreeNeumann: return "free_neumann";
    case BoundaryPolicy::Periodic: return "periodic";
  }
  return "?";
}

json resolved_config_json(const FlowConfig& fc) {
  json j;
  j["solution"]["kind"] = kind_name(fc.initial.kind);
  j["solution"]["time"] = format_double(fc.initial.time);
  j["solution"]["y_min"] = format_double(fc.initial.y_min);
  j["solution"]["y_max"] = format_double(fc.initial.y_max);
  j["solution"]["samples"] = std::to_string(fc.initial.samples);
  j["solution"]["amplitude"] = format_double(fc.initial.amplitude);
  j["solution"]["wavenumber"] = format_double(fc.initial.wavenumber);
  j["solution"]["periods"] = std::to_string(fc.initial.periods);
  j["solution"]["radius"] = format_double(fc.initial.radius);
  j["solution"]["x0"] = format_double(fc.initial.line_from.x);
  j["solution"]["y0"] = format_double(fc.initial.line_from.y);
  j["solution"]["x1"] = format_double(fc.initial.line_to.x);
  j["solution"]["y1"] = format_double(fc.initial.line_to.y);
  j["solution"]["basepoint_index"] = std::to_string(fc.initial.basepoint);
  j["flow"]["t_start"] = format_double(fc.t_start);
  j["flow"]["t_end"] = format_double(fc.t_end);
  j["flow"]["scheme"] = scheme_name(fc.scheme);
  j["flow"]["dt"] = format_double(fc.dt);
  j["flow"]["cfl_safety"] = format_double(fc.cfl_safety);
  j["flow"]["snapshot_stride"] = std::to_string(fc.snapshot_stride);
  j["flow"]["reparametrize_every"] = std::to_string(fc.reparametrize_every);
  j["flow"]["boundary"] = boundary_name(fc.boundary);
  j["flow"]["max_steps"] = std::to_string(fc.max_steps);
  return j;
}

Config config_from_manifest(const json& manifest) {
  std::string text;
  for (const auto& [section, entries] : manifest.at("config").items()) {
    text += "[" + section + "]\n";
    for (const auto& [key, value] : entries.items())
      text += key + " = " + value.get<std::string>() + "\n";
  }
  return Config::parse_text(text);
}

json load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("cannot open manifest: " + (dir / "manifest.json").string());
  json j;
  in >> j;
  return j;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const CliOptions& opts, const json& config, const json& extra,
                    double duration) {
  json j;
  j["command"] = command;
  j["artifact_version"] = kArtifactVersion;
  j["seed"] = opts.seed;
  j["config"] = config;
  j["duration_seconds"] = duration;
  for (const auto& [key, value] : extra.items()) j[key] = value;
  atomic_write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

FlowConfig flow_config_from(const Config& cfg) {
  FlowConfig fc;
  fc.initial = solution_spec_from(cfg);
  fc.t_start = cfg.get_double("flow", "t_start", 0.0);
  fc.t_end = cfg.get_double("flow", "t_end", 1.0);
  const std::string scheme = cfg.get_string("flow", "scheme", "semi_implicit");
  if (scheme == "explicit_cfl")
    fc.scheme = Scheme::ExplicitCfl;
  else if (scheme == "fixed")
    fc.scheme = Scheme::FixedEuler;
  else if (scheme == "semi_implicit")
    fc.scheme = Scheme::SemiImplicit;
  else
    throw ConfigError("flow.scheme must be explicit_cfl|fixed|semi_implicit, got: '" + scheme +
                      "'");
  fc.dt = cfg.get_double("flow", "dt", 1e-3);
  fc.cfl_safety = cfg.get_double("flow", "cfl_safety", 0.4);
  fc.snapshot_stride = static_cast<int>(cfg.get_long("flow", "snapshot_stride", 1));
  fc.reparametrize_every = static_cast<int>(cfg.get_long("flow", "reparametrize_every", 0));
  const std::string boundary = cfg.get_string("flow", "boundary", "pin_to_exact");
  if (boundary == "pin_to_exact")
    fc.boundary = BoundaryPolicy::PinToExact;
  else if (boundary == "free_neumann")
    fc.boundary = BoundaryPolicy::FreeNeumann;
  else if (boundary == "periodic")
    fc.boundary = BoundaryPolicy::Periodic;
  else
    throw ConfigError("flow.boundary must be pin_to_exact|free_neumann|periodic, got: '" +
                      boundary + "'");
  fc.max_steps = cfg.get_long("flow", "max_steps", 20'000'000);
  try {
    fc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return fc;
}

LoadedTrajectory read_trajectory(const std::filesystem::path& dir) {
  const json manifest = load_manifest(dir);
  const Config cfg = config_from_manifest(manifest);
  LoadedTrajectory out;
  out.trajectory.config = flow_config_from(cfg);
  for (const auto& [key, value] : cfg.entries()) out.resolved_config[key] = value;

  const Topology topo = [&]() {
    const auto& c = manifest.at("curve");
    if (c.at("topology") == "x_periodic")
      return Topology::x_periodic(parse_double(c.at("period").get<std::string>()));
    return Topology::open();
  }();
  const std::size_t basepoint = manifest.at("curve").at("basepoint_index").get<std::size_t>();

  std::ifstream in(dir / "snapshots.csv");
  if (!in) throw std::runtime_error("cannot open snapshots: " + (dir / "snapshots.csv").string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != "time,index,x,y") throw std::runtime_error("snapshots.csv: bad header");
  FlowState current;
  current.curve.topology = topo;
  current.curve.basepoint_index = basepoint;
  bool have = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string t_s, i_s, x_s, y_s;
    if (!std::getline(row, t_s, ',') || !std::getline(row, i_s, ',') ||
        !std::getline(row, x_s, ',') || !std::getline(row, y_s))
      throw std::runtime_error("snapshots.csv: malformed row: " + line);
    const std::size_t idx = static_cast<std::size_t>(std::stoul(i_s));
    if (idx == 0) {
      if (have) out.trajectory.states.push_back(current);
      current.curve.vertices.clear();
      current.time = parse_double(t_s);
      have = true;
    }
    current.curve.vertices.push_back({parse_double(x_s), parse_double(y_s)});
  }
  if (have) out.trajectory.states.push_back(current);
  if (out.trajectory.states.empty()) throw std::runtime_error("snapshots.csv: no snapshots");
  for (auto& s : out.trajectory.states) s.curve.validate();
  return out;
}

void write_trajectory_svg(const std::filesystem::path& path, const Trajectory& traj) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : traj.states)
    for (const auto& v : s.curve.vertices) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-9;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << (xmin - pad) << " "
      << (-(ymax + pad)) << " " << (xmax - xmin + 2 * pad) << " " << (ymax - ymin + 2 * pad)
      << "\">\n";
  const std::size_t m = traj.size();
  for (std::size_t k = 0; k < m; ++k) {
    const int shade = m > 1 ? static_cast<int>(200.0 * k / (m - 1)) : 0;
    svg << "  <polyline fill=\"none\" stroke=\"rgb(" << (220 - shade) << "," << (40 + shade / 2)
        << "," << (40 + shade) << ")\" stroke-width=\"" << 0.005 * std::max(xmax - xmin, 1e-9)
        << "\" points=\"";
    for (const auto& v : traj.states[k].curve.vertices) svg << v.x << "," << -v.y << " ";
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  atomic_write_file(path, svg.str());
}

namespace {

json curve_metadata(const Trajectory& traj) {
  const PlanarCurve& c = traj.states.front().curve;
  json j;
  j["topology"] = c.periodic() ? "x_periodic" : "open";
  j["period"] = format_double(c.topology.period);
  j["basepoint_index"] = c.basepoint_index;
  j["vertex_count"] = c.size();
  j["theta_offset"] = format_double(traj.theta_offset());
  return j;
}

}  // namespace

int cmd_simulate(const CliOptions& opts) {
  Timer timer;
  Config cfg;
  FlowConfig fc;
  try {
    cfg = Config::parse_file(opts.config_path);
    cfg.enforce_known_keys();
    fc = flow_config_from(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  RunOutcome rc = run_capturing(fc);
  std::filesystem::create_directories(opts.out_dir);
  write_snapshots_csv(opts.out_dir / "snapshots.csv", rc.trajectory);
  json extra;
  extra["curve"] = curve_metadata(rc.trajectory);
  extra["outputs"] = {{"snapshots", "snapshots.csv"}};
  extra["snapshot_count"] = rc.trajectory.size();
  extra["steps_taken"] = rc.steps_taken;
  extra["abort_reason"] = rc.abort_reason ? json(*rc.abort_reason) : json(nullptr);
  if (opts.svg) {
    write_trajectory_svg(opts.out_dir / "snapshots.svg", rc.trajectory);
    extra["outputs"]["svg"] = "snapshots.svg";
  }
  write_manifest(opts.out_dir, "simulate", opts, resolved_config_json(fc), extra,
                 timer.seconds());
  if (rc.abort_reason) {
    std::cerr << "numerical abort: " << *rc.abort_reason << "\n";
    return 3;
  }
  std::cout << "snapshots: " << rc.trajectory.size() << "\n";
  return 0;
}

int cmd_verify(const CliOptions& opts) {
  Config cfg;
  try {
    if (!opts.config_path.empty()) {
      cfg = Config::parse_file(opts.config_path);
      cfg.enforce_known_keys();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  LoadedTrajectory loaded;
  try {
    loaded = read_trajectory(opts.traj_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const Trajectory& traj = loaded.trajectory;
  const double tol_r1 = cfg.get_double("verify", "tol_r1", 1e-3);
  const double tol_r2 = cfg.get_double("verify", "tol_r2", 1e-3);
  const double tol_r3 = cfg.get_double("verify", "tol_r3", 1e-3);
  const double tol_cos_h = cfg.get_double("verify", "tol_cos_h", 1e-6);
  const double tol_kato = cfg.get_double("verify", "tol_kato", 1e-6);
  const double tol_drop = cfg.get_double("verify", "tol_min_cos_per_time", 1e-6);
  const bool need_length = cfg.get_bool("verify", "require_length_nonincreasing", true);

  const bool residual_mode = traj.config.reparametrize_every == 0 && traj.size() >= 3;
  ResidualReport res;
  if (residual_mode) res = evolution_residuals(traj);

  double cos_h_max = 0.0, kato_max = 0.0, worst_drop = 0.0;
  bool length_ok = true;
  double prev_len = 0.0, prev_min_cos = 0.0, prev_time = 0.0;
  const double offset = traj.theta_offset();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const PlanarCurve& c = traj.states[k].curve;
    const InequalityAuditReport audit = inequality_audit(c, offset);
    cos_h_max = std::max(cos_h_max, audit.cos_h_violation_max);
    kato_max = std::max(kato_max, audit.kato_violation_max);
    const GeometryReport rep = geometry_report(c, offset);
    const double len = total_length(c);
    if (k > 0) {
      if (len > prev_len * (1.0 + 1e-12)) length_ok = false;
      const double dt = traj.states[k].time - prev_time;
      if (dt > 0.0)
        worst_drop = std::max(worst_drop, (prev_min_cos - rep.inf_cos_theta) / dt);
    }
    prev_len = len;
    prev_min_cos = rep.inf_cos_theta;
    prev_time = traj.states[k].time;
  }

  struct Check {
    std::string name;
    bool pass;
  };
  std::vector<Check> checks;
  std::cout << "snapshots: " << traj.size() << "\n";
  std::cout << "residual_mode: " << (residual_mode ? "active" : "skipped (reparametrized or short)")
            << "\n";
  if (residual_mode) {
    std::cout << "r1_sup: " << format_double(res.r1) << "\n";
    std::cout << "r2_sup: " << format_double(res.r2) << "\n";
    std::cout << "r3_sup: " << format_double(res.r3) << "\n";
    checks.push_back({"check_r1", res.r1 <= tol_r1});
    checks.push_back({"check_r2", res.r2 <= tol_r2});
    checks.push_back({"check_r3", res.r3 <= tol_r3});
  }
  std::cout << "cos_h_violation_max: " << format_double(cos_h_max) << "\n";
  std::cout << "kato_violation_max: " << format_double(kato_max) << "\n";
  std::cout << "min_cos_theta_drop_per_time: " << format_double(worst_drop) << "\n";
  std::cout << "length_nonincreasing: " << (length_ok ? "true" : "false") << "\n";
  checks.push_back({"check_cos_h", cos_h_max <= tol_cos_h});
  checks.push_back({"check_kato", kato_max <= tol_kato});
  checks.push_back({"check_min_cos", worst_drop <= tol_drop});
  if (need_length) checks.push_back({"check_length", length_ok});

  bool all = true;
  for (const Check& c : checks) {
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL") << "\n";
    all = all && c.pass;
  }
  std::cout << "overall: " << (all ? "PASS" : "FAIL") << "\n";
  return all ? 0 : 1;
}

int cmd_estimate(const CliOptions& opts) {
  Timer timer;
  Config cfg;
  try {
    if (!opts.config_path.empty()) {
      cfg = Config::parse_file(opts.config_path);
      cfg.enforce_known_keys();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  LoadedTrajectory loaded;
  try {
    loaded = read_trajectory(opts.traj_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const Trajectory& traj = loaded.trajectory;

  double inf_cos = 1.0;
  const double offset = traj.theta_offset();
  for (const auto& s : traj.states)
    inf_cos = std::min(inf_cos, geometry_report(s.curve, offset).inf_cos_theta);

  try {
    double delta = cfg.get_double("estimate", "delta", -1.0);
    if (delta <= 0.0) delta = inf_cos;
    if (delta <= 0.0)
      throw NotAlmostCalibrated("trajectory is not almost calibrated (inf cos theta = " +
                                format_double(inf_cos) + ")");
    double b = cfg.get_double("estimate", "b", -1.0);
    if (b <= 0.0) b = choose_b(delta);
    const double center_default = 0.5 * (traj.states.front().time + traj.states.back().time);
    const double center = cfg.get_double("estimate", "center_time", center_default);
    const long bp_cfg = cfg.get_long("estimate", "basepoint_index", -1);
    const std::size_t basepoint = bp_cfg >= 0 ? static_cast<std::size_t>(bp_cfg)
                                              : traj.states.front().curve.basepoint_index;
    const auto r_list = cfg.get_double_list("estimate", "r_list", "2,4,8");
    const auto t_list = cfg.get_double_list("estimate", "t_list", "1,2,4");
    const int power = static_cast<int>(cfg.get_long("estimate", "profile_power", 8));

    json cfg_json;
    {
      std::string rl, tl;
      for (double r : r_list) rl += (rl.empty() ? "" : ",") + format_double(r);
      for (double t : t_list) tl += (tl.empty() ? "" : ",") + format_double(t);
      cfg_json["estimate"]["r_list"] = rl;
      cfg_json["estimate"]["t_list"] = tl;
      cfg_json["estimate"]["center_time"] = format_double(center);
      cfg_json["estimate"]["basepoint_index"] = std::to_string(basepoint);
      cfg_json["estimate"]["delta"] = format_double(delta);
      cfg_json["estimate"]["b"] = format_double(b);
      cfg_json["estimate"]["profile_power"] = std::to_string(power);
    }

    const EstimateSweepResult sweep =
        sweep_and_fit(traj, basepoint, r_list, t_list, b, center, power);

    std::string csv = "R,T,sup_ratio,ratio_to_bound\n";
    for (const SweepCell& cell : sweep.grid)
      csv += format_double(cell.R) + "," + format_double(cell.T) + "," +
             format_double(cell.sup_ratio) + "," + format_double(cell.ratio_to_bound) + "\n";
    std::filesystem::create_directories(opts.out_dir);
    atomic_write_file(opts.out_dir / "estimate.csv", csv);

    json extra;
    extra["fitted_c"] = format_double(sweep.fitted_c);
    extra["fitted_c_small"] = format_double(sweep.fitted_c_small);
    extra["fitted_c_large"] = format_double(sweep.fitted_c_large);
    extra["scaling_ok"] = sweep.scaling_ok;
    extra["delta"] = format_double(delta);
    extra["b"] = format_double(b);
    extra["center_time"] = format_double(center);
    extra["basepoint_index"] = basepoint;
    extra["outputs"] = {{"estimate", "estimate.csv"}};
    extra["curve"] = curve_metadata(traj);

    bool audits_ok = true;
    if (opts.audit) {
      const double sup_varphi = 1.0 - inf_cos;
      double epsilon = cfg.get_double("estimate", "epsilon", -1.0);
      if (epsilon <= 0.0) epsilon = default_epsilon(b, sup_varphi);
      std::string audit_text;
      for (const SweepCell& cell : sweep.grid) {
        const CylinderSpec cyl{basepoint, cell.R, cell.T, center};
        const MaxpointAuditReport audit = maxpoint_audit(traj, cyl, b, epsilon, power);
        audit_text += "cell R = " + format_double(cell.R) + ", T = " + format_double(cell.T) +
                      (audit.trivial ? " (trivial)" : "") + "\n";
        audit_text += "  argmax_snapshot: " + std::to_string(audit.argmax_snapshot) + "\n";
        audit_text += "  argmax_vertex: " + std::to_string(audit.argmax_vertex) + "\n";
        audit_text += "  psi_q_max: " + format_double(audit.psi_q_max) + "\n";
        audit_text += "  c_final: " + format_double(audit.c_final) + "\n";
        for (const CheckRow& row : audit.rows) {
          audit_text += "  " + row.name + ": lhs = " + format_double(row.lhs) +
                        ", rhs = " + format_double(row.rhs) + ", " +
                        (row.pass ? "PASS" : "FAIL") + "\n";
          audits_ok = audits_ok && row.pass;
        }
      }
      atomic_write_file(opts.out_dir / "audit.txt", audit_text);
      extra["outputs"]["audit"] = "audit.txt";
      extra["audits_ok"] = audits_ok;
      extra["epsilon"] = format_double(epsilon);
    }
    write_manifest(opts.out_dir, "estimate", opts, cfg_json, extra, timer.seconds());
    std::cout << "fitted_c: " << format_double(sweep.fitted_c) << "\n";
    std::cout << "scaling_ok: " << (sweep.scaling_ok ? "true" : "false") << "\n";
    if (opts.audit) std::cout << "audits_ok: " << (audits_ok ? "true" : "false") << "\n";
    return audits_ok ? 0 : 1;
  } catch (const NotAlmostCalibrated& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return 1;
  }
}

int cmd_inequalities(const CliOptions& opts) {
  Timer timer;
  Config cfg;
  try {
    if (!opts.config_path.empty()) {
      cfg = Config::parse_file(opts.config_path);
      cfg.enforce_known_keys();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  SampleDomain dom;
  dom.sample_count = cfg.get_long("inequalities", "samples", 1'000'000);
  dom.seed = static_cast<std::uint64_t>(cfg.get_long("inequalities", "seed", 12345));
  if (opts.seed_given) dom.seed = opts.seed;
  dom.a_max = cfg.get_double("inequalities", "a_max", 10.0);
  dom.b_max = cfg.get_double("inequalities", "b_max", 10.0);
  dom.eps_min = cfg.get_double("inequalities", "eps_min", 0.01);
  dom.eps_max = cfg.get_double("inequalities", "eps_max", 10.0);
  dom.p_min = cfg.get_double("inequalities", "p_min", 1.1);
  dom.p_max = cfg.get_double("inequalities", "p_max", 4.0);
  dom.xyz_max = cfg.get_double("inequalities", "xyz_max", 10.0);

  const LabReport young = young_check(dom);
  const LabReport amgm = amgm_mei_check(dom);

  SolutionSpec sine;
  sine.kind = SolutionKind::SineGraph;
  sine.samples = 1024;
  sine.periods = 2;
  const double kato_sine = curve_kato_check(sample(sine));
  SolutionSpec reaper;
  reaper.kind = SolutionKind::GrimReaper;
  reaper.samples = 1024;
  const double kato_reaper = curve_kato_check(sample(reaper));

  std::string report;
  report += "seed: " + std::to_string(dom.seed) + "\n";
  report += "samples: " + std::to_string(dom.sample_count) + "\n";
  report += "young_violations: " + std::to_string(young.violations) + "\n";
  report += "young_checksum: " + std::to_string(young.stream_checksum) + "\n";
  report += "amgm_mei_violations: " + std::to_string(amgm.violations) + "\n";
  report += "amgm_mei_checksum: " + std::to_string(amgm.stream_checksum) + "\n";
  report += "kato_max_violation_sine: " + format_double(kato_sine) + "\n";
  report += "kato_max_violation_grim_reaper: " + format_double(kato_reaper) + "\n";
  const bool ok = young.violations == 0 && amgm.violations == 0 && kato_sine <= 1e-6 &&
                  kato_reaper <= 1e-6;
  report += std::string("overall: ") + (ok ? "PASS" : "FAIL") + "\n";
  std::cout << report;
  std::filesystem::create_directories(opts.out_dir);
  atomic_write_file(opts.out_dir / "inequalities.txt", report);
  json cfg_json;
  cfg_json["inequalities"]["samples"] = std::to_string(dom.sample_count);
  cfg_json["inequalities"]["seed"] = std::to_string(dom.seed);
  json extra;
  extra["outputs"] = {{"report", "inequalities.txt"}};
  write_manifest(opts.out_dir, "inequalities", opts, cfg_json, extra, timer.seconds());
  return ok ? 0 : 1;
}

int cmd_soliton(const CliOptions& opts) {
  Timer timer;
  Config cfg;
  SolutionSpec spec;
  double vx, vy, tolerance;
  try {
    cfg = Config::parse_file(opts.config_path);
    cfg.enforce_known_keys();
    spec = solution_spec_from(cfg);
    vx = cfg.get_double("soliton", "vx", 1.0);
    vy = cfg.get_double("soliton", "vy", 0.0);
    tolerance = cfg.get_double("soliton", "tolerance", 1e-3);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const PlanarCurve curve = sample(spec);
  const double residual = translator_residual(curve, {vx, vy});
  std::string report;
  report += "kind: " + kind_name(spec.kind) + "\n";
  report += "translator_residual: " + format_double(residual) + "\n";
  if (spec.kind == SolutionKind::Hairclip)
    report += "hairclip_implicit_residual: " +
              format_double(implicit_residual_hairclip(curve, spec.time)) + "\n";
  const bool ok = residual <= tolerance;
  report += std::string("overall: ") + (ok ? "PASS" : "FAIL") + "\n";
  std::cout << report;
  std::filesystem::create_directories(opts.out_dir);
  atomic_write_file(opts.out_dir / "soliton.txt", report);
  json cfg_json;
  cfg_json["soliton"]["vx"] = format_double(vx);
  cfg_json["soliton"]["vy"] = format_double(vy);
  cfg_json["soliton"]["tolerance"] = format_double(tolerance);
  json extra;
  extra["outputs"] = {{"report", "soliton.txt"}};
  write_manifest(opts.out_dir, "soliton", opts, cfg_json, extra, timer.seconds());
  return ok ? 0 : 1;
}

}  // namespace lmcf
