#include "bht/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bht/errors.hpp"

namespace bht {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& what) {
  throw ConfigValidationError(std::string(key), std::string(key) + ": " + what);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad(key, "expected a real number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) bad(key, "value must be finite");
  return v;
}

long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad(key, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Rounds to the 12 significant digits used by every writer, so JSON matches CSV precision.
double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_real(x));
}

json real_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(round12(x));
  return a;
}

}  // namespace

ConfigParseError::ConfigParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ConfigValidationError::ConfigValidationError(std::string key, const std::string& what)
    : std::invalid_argument(what), key_(std::move(key)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "L",      "N",          "J",      "U",        "h",      "barrier",   "potential",        "tmax",
      "dt",     "U_min",      "U_max",  "U_step",   "sweep_dt", "coherent_n", "weight_tol",     "n_max",
      "top_k",  "report_threshold", "window_threshold", "threads", "out", "format"};
  return keys;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "L") {
    c.L = static_cast<int>(parse_integer(key, value));
  } else if (key == "N") {
    c.N = static_cast<int>(parse_integer(key, value));
  } else if (key == "J") {
    c.J = parse_double(key, value);
  } else if (key == "U") {
    c.U = parse_double(key, value);
  } else if (key == "h") {
    c.h = parse_double(key, value);
  } else if (key == "barrier") {
    try {
      c.barrier = parse_barrier_kind(value);
    } catch (const InvalidArgument& e) {
      bad(key, e.what());
    }
  } else if (key == "potential") {
    c.potential = parse_list(key, value);
  } else if (key == "tmax") {
    c.tmax = parse_double(key, value);
  } else if (key == "dt") {
    c.dt = parse_double(key, value);
  } else if (key == "U_min") {
    c.U_min = parse_double(key, value);
  } else if (key == "U_max") {
    c.U_max = parse_double(key, value);
  } else if (key == "U_step") {
    c.U_step = parse_double(key, value);
  } else if (key == "sweep_dt") {
    c.sweep_dt = parse_double(key, value);
  } else if (key == "coherent_n") {
    c.coherent_n = parse_list(key, value);
  } else if (key == "weight_tol") {
    c.weight_tol = parse_double(key, value);
  } else if (key == "n_max") {
    c.n_max = static_cast<int>(parse_integer(key, value));
  } else if (key == "top_k") {
    c.top_k = static_cast<int>(parse_integer(key, value));
  } else if (key == "report_threshold") {
    c.report_threshold = parse_double(key, value);
  } else if (key == "window_threshold") {
    c.window_threshold = parse_double(key, value);
  } else if (key == "threads") {
    const long t = parse_integer(key, value);
    if (t < 0) bad(key, "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "format") {
    if (value == "json") {
      c.format = OutputFormat::json;
    } else if (value == "csv") {
      c.format = OutputFormat::csv;
    } else {
      bad(key, "must be json or csv, got '" + std::string(value) + "'");
    }
  } else {
    throw ConfigValidationError(std::string(key), "unknown key '" + std::string(key) + "'");
  }
}

void validate(const RunConfig& c) {
  if (c.L < 4 || c.L % 2 != 0) bad("L", "must be even and >= 4, got " + std::to_string(c.L));
  if (c.N < 1) bad("N", "must be >= 1, got " + std::to_string(c.N));
  try {
    if (static_cast<std::uint64_t>(dimension(c.L, c.N)) > kDefaultMaxSectorDimension) {
      bad("N", "sector dimension for (L, N) exceeds " + std::to_string(kDefaultMaxSectorDimension));
    }
  } catch (const std::overflow_error&) {
    bad("N", "sector dimension overflows");
  }
  if (!(c.J > 0.0)) bad("J", "must be positive");
  if (c.h < 0.0) bad("h", "must be >= 0");
  if (c.tmax < 0.0) bad("tmax", "must be >= 0");
  if (!(c.dt > 0.0)) bad("dt", "must be positive");
  if (!(c.U_step > 0.0)) bad("U_step", "must be positive");
  if (c.U_max < c.U_min) bad("U_max", "must be >= U_min");
  if (!(c.sweep_dt > 0.0)) bad("sweep_dt", "must be positive");
  if (c.barrier == BarrierKind::custom) {
    if (c.potential.size() != static_cast<std::size_t>(c.L)) {
      bad("potential", "barrier=custom needs " + std::to_string(c.L) + " entries, got " +
                           std::to_string(c.potential.size()));
    }
  } else if (!c.potential.empty()) {
    bad("potential", "only used with barrier=custom");
  }
  if (!c.coherent_n.empty()) {
    if (c.coherent_n.size() != static_cast<std::size_t>(c.L)) {
      bad("coherent_n", "needs " + std::to_string(c.L) + " entries, got " + std::to_string(c.coherent_n.size()));
    }
    for (double n : c.coherent_n) {
      if (n < 0.0) bad("coherent_n", "entries must be >= 0");
    }
  }
  if (!(c.weight_tol > 0.0 && c.weight_tol < 1.0)) bad("weight_tol", "must lie in (0, 1)");
  if (c.n_max < 0 || c.n_max > 24) bad("n_max", "must lie in [0, 24] (0 = automatic)");
  if (c.top_k < 1) bad("top_k", "must be >= 1");
  if (!(c.report_threshold > 0.0)) bad("report_threshold", "must be positive");
  if (!(c.window_threshold > 0.0)) bad("window_threshold", "must be positive");
}

RunConfig parse_config(std::string_view text, bool check) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigParseError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigParseError(line_no, "missing key before '='");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigParseError(line_no, "duplicate key '" + std::string(key) + "'");
    }
    try {
      apply_setting(c, key, line.substr(eq + 1));
    } catch (const ConfigValidationError& e) {
      throw ConfigValidationError(e.key(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (check) validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

QuenchSpec RunConfig::quench_spec() const {
  QuenchSpec s;
  s.L = L;
  s.N = N;
  s.J = J;
  s.U = U;
  s.h = h;
  s.barrier = barrier == BarrierKind::custom ? Barrier::custom_potential(potential) : Barrier{barrier, {}};
  s.times = time_grid(tmax, dt);
  return s;
}

CoherentSpec RunConfig::coherent_spec() const {
  CoherentSpec s;
  if (coherent_n.empty()) {
    s.mean_occupations.assign(static_cast<std::size_t>(L), 0.0);
    for (int j = 0; j < L / 2 - 1; ++j) s.mean_occupations[static_cast<std::size_t>(j)] = 2.0;
  } else {
    s.mean_occupations = coherent_n;
  }
  s.weight_tol = weight_tol;
  s.n_max = n_max;
  return s;
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.L = L;
  s.N = N;
  s.J = J;
  s.h = h;
  const auto count = static_cast<std::size_t>(std::floor((U_max - U_min) / U_step + 1e-9)) + 1;
  s.U_values.resize(count);
  for (std::size_t k = 0; k < count; ++k) s.U_values[k] = U_min + static_cast<double>(k) * U_step;
  s.t_values = time_grid(tmax, sweep_dt);
  s.threads = threads;
  return s;
}

OverlapOptions RunConfig::overlap_options() const {
  OverlapOptions o;
  o.top_k = static_cast<std::size_t>(top_k);
  o.report_threshold = report_threshold;
  return o;
}

std::string format_real(double x) {
  if (x == 0.0) return "0";  // folds -0 as well
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string sweep_csv(const SweepGrid& grid) {
  std::string s = "U,t,dn\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      s += format_real(grid.U_values[r]);
      s += ',';
      s += format_real(grid.t_values[c]);
      s += ',';
      s += format_real(grid.at(r, c));
      s += '\n';
    }
  }
  return s;
}

void write_sweep_csv(const SweepGrid& grid, const std::filesystem::path& path) { write_text(path, sweep_csv(grid)); }

SweepGrid read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "U,t,dn") throw std::runtime_error(path.string() + ": expected header U,t,dn");

  SweepGrid grid;
  std::vector<double> t_first;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw std::runtime_error(path.string() + ": malformed row " + std::to_string(line_no));
    const std::string_view sv(line);
    const double U = parse_double("U", sv.substr(0, c1));
    const double t = parse_double("t", sv.substr(c1 + 1, c2 - c1 - 1));
    const double dn = parse_double("dn", sv.substr(c2 + 1));
    if (grid.U_values.empty() || grid.U_values.back() != U) grid.U_values.push_back(U);
    if (grid.U_values.size() == 1) grid.t_values.push_back(t);
    grid.dn.push_back(dn);
  }
  if (grid.U_values.empty() || grid.dn.size() != grid.U_values.size() * grid.t_values.size()) {
    throw std::runtime_error(path.string() + ": grid is empty or not rectangular");
  }
  grid.diagnostics.assign(grid.rows(), {});
  return grid;
}

std::string sweep_json(const SweepGrid& grid) {
  json rows = json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const auto row = grid.row(r);
    rows.push_back(real_array(std::vector<double>(row.begin(), row.end())));
  }
  json j;
  j["U"] = real_array(grid.U_values);
  j["t"] = real_array(grid.t_values);
  j["dn"] = std::move(rows);
  return j.dump(1) + "\n";
}

std::string trajectory_json(const Trajectory& traj) {
  json j;
  j["times"] = real_array(traj.times);
  json dens = json::array();
  for (const auto& row : traj.site_density) dens.push_back(real_array(row));
  j["site_density"] = std::move(dens);
  j["n_after"] = real_array(traj.n_after);
  j["norm"] = real_array(traj.norm);
  j["energy"] = real_array(traj.energy);
  j["particle_number"] = round12(traj.particle_number);
  j["discarded_weight"] = round12(traj.discarded_weight);
  return j.dump(1) + "\n";
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string s = "t,n_after,norm,energy";
  for (std::size_t j = 1; j <= traj.sites(); ++j) s += ",n_" + std::to_string(j);
  s += '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    s += format_real(traj.times[k]) + ',' + format_real(traj.n_after[k]) + ',' + format_real(traj.norm[k]) + ',' +
         format_real(traj.energy[k]);
    for (double d : traj.site_density[k]) s += ',' + format_real(d);
    s += '\n';
  }
  return s;
}

void write_trajectory_json(const Trajectory& traj, const std::filesystem::path& path) {
  write_text(path, trajectory_json(traj));
}

std::string overlap_json(const OverlapReport& report) {
  json states = json::array();
  for (const auto& e : report.eigenstates) {
    json top = json::array();
    for (const auto& f : e.fock_top) {
      top.push_back({{"occupation", f.occupation.to_string()},
                     {"basis_index", f.basis_index},
                     {"weight", round12(f.weight)}});
    }
    states.push_back({{"eigen_index", e.index},
                      {"energy", round12(e.energy)},
                      {"overlap", round12(e.overlap)},
                      {"degenerate", e.degenerate},
                      {"fock_top", std::move(top)}});
  }
  json groups = json::array();
  for (const auto& g : report.degenerate_groups) {
    groups.push_back({{"indices", g.indices}, {"overlap_sum", round12(g.overlap_sum)}});
  }
  json j;
  j["eigenstates"] = std::move(states);
  j["degenerate_groups"] = std::move(groups);
  j["total_overlap"] = round12(report.total_overlap());
  return j.dump(1) + "\n";
}

void write_overlap_json(const OverlapReport& report, const std::filesystem::path& path) {
  write_text(path, overlap_json(report));
}

std::string windows_json(const std::vector<DirectionalWindow>& windows, double threshold) {
  json list = json::array();
  for (const auto& w : windows) {
    list.push_back({{"U_begin", round12(w.U_begin)},
                    {"U_end", round12(w.U_end)},
                    {"sign", w.sign},
                    {"peak", round12(w.peak)},
                    {"peak_U", round12(w.peak_U)},
                    {"peak_t", round12(w.peak_t)}});
  }
  json j;
  j["threshold"] = round12(threshold);
  j["windows"] = std::move(list);
  return j.dump(1) + "\n";
}

std::string windows_csv(const std::vector<DirectionalWindow>& windows) {
  std::string s = "U_begin,U_end,sign,peak,peak_U,peak_t\n";
  for (const auto& w : windows) {
    s += format_real(w.U_begin) + ',' + format_real(w.U_end) + ',' + std::to_string(w.sign) + ',' +
         format_real(w.peak) + ',' + format_real(w.peak_U) + ',' + format_real(w.peak_t) + '\n';
  }
  return s;
}

}  // namespace bht
