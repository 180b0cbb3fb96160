#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bht/analysis.hpp"
#include "bht/errors.hpp"
#include "bht/io.hpp"
#include "bht/protocol.hpp"

namespace bht {

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::map<std::string, std::optional<std::string>> values{
      {"L", {}}, {"N", {}}, {"U", {}}, {"h", {}}, {"tmax", {}}, {"dt", {}}, {"barrier", {}}, {"out", {}}, {"format", {}}};
};

void add_common_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "key = value configuration file");
  sub->add_option("--L", o.values["L"], "lattice sites (even, >= 4)");
  sub->add_option("--N", o.values["N"], "boson number");
  sub->add_option("--U", o.values["U"], "on-site interaction in units of J");
  sub->add_option("--h", o.values["h"], "barrier height in units of J");
  sub->add_option("--tmax", o.values["tmax"], "final time in units of 1/J");
  sub->add_option("--dt", o.values["dt"], "output time step in units of 1/J");
  sub->add_option("--barrier", o.values["barrier"], "vertical | angled | custom");
  sub->add_option("--out", o.values["out"], "result file");
  sub->add_option("--format", o.values["format"], "json | csv");
}

std::string describe(const RunConfig& c) {
  return "L=" + std::to_string(c.L) + " N=" + std::to_string(c.N) + " J=" + format_real(c.J) +
         " U=" + format_real(c.U) + " h=" + format_real(c.h) + " barrier=" + std::string(to_string(c.barrier));
}

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

OutputFormat pick_format(const RunConfig& c, OutputFormat fallback, bool csv_ok, bool json_ok, const std::string& cmd) {
  const OutputFormat f = c.format.value_or(fallback);
  if ((f == OutputFormat::csv && !csv_ok) || (f == OutputFormat::json && !json_ok)) {
    throw ConfigValidationError("format", "format: '" + cmd + "' does not support this output format");
  }
  return f;
}

std::string output_path(const RunConfig& c, const std::string& cmd, OutputFormat f) {
  if (!c.out.empty()) return c.out;
  return cmd + (f == OutputFormat::csv ? ".csv" : ".json");
}

void report_conservation(std::ostream& log, const ConservationStats& s) {
  log << "  conservation: norm drift " << format_real(s.norm_drift) << ", energy drift "
      << format_real(s.energy_drift) << ", particle drift " << format_real(s.particle_drift) << '\n';
}

void run_command(const std::string& cmd, const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  log << "bht " << cmd << ": " << describe(cfg) << '\n';

  if (cmd == "quench" || cmd == "coherent") {
    const OutputFormat f = pick_format(cfg, OutputFormat::json, true, true, cmd);
    const QuenchSpec spec = cfg.quench_spec();
    Trajectory traj;
    if (cmd == "quench") {
      traj = run_quench(spec);
    } else {
      const CoherentSpec cspec = cfg.coherent_spec();
      traj = run_coherent_quench(spec, cspec);
      log << "  discarded Poisson weight " << format_real(traj.discarded_weight) << '\n';
    }
    double peak = 0.0;
    for (double v : traj.n_after) peak = std::max(peak, v);
    log << "  " << traj.times.size() << " time points, max n_after " << format_real(peak) << '\n';
    report_conservation(log, conservation(traj));
    const std::string path = output_path(cfg, cmd, f);
    write_text(path, f == OutputFormat::json ? trajectory_json(traj) : trajectory_csv(traj));
    log << "  wrote " << path << '\n';
  } else if (cmd == "sweep" || cmd == "windows") {
    const bool windows = cmd == "windows";
    const OutputFormat f = pick_format(cfg, windows ? OutputFormat::json : OutputFormat::csv, true, true, cmd);
    const SweepSpec spec = cfg.sweep_spec();
    log << "  " << spec.U_values.size() << " U values x " << spec.t_values.size() << " times, "
        << (spec.threads == 0 ? std::string("auto") : std::to_string(spec.threads)) << " thread(s)\n";
    const SweepGrid grid = sweep_interaction(spec);
    ConservationStats worst;
    for (const auto& d : grid.diagnostics) worst.merge(d);
    report_conservation(log, worst);
    const std::string path = output_path(cfg, cmd, f);
    if (windows) {
      const auto found = find_directional_windows(grid, cfg.window_threshold);
      log << "  " << found.size() << " window(s) at threshold " << format_real(cfg.window_threshold) << '\n';
      write_text(path, f == OutputFormat::json ? windows_json(found, cfg.window_threshold) : windows_csv(found));
    } else {
      write_text(path, f == OutputFormat::csv ? sweep_csv(grid) : sweep_json(grid));
    }
    log << "  wrote " << path << '\n';
  } else if (cmd == "overlap") {
    const OutputFormat f = pick_format(cfg, OutputFormat::json, false, true, cmd);
    const QuenchSpec spec = cfg.quench_spec();
    const InitialState init = prepare_initial_state(cfg.L, cfg.N, cfg.J, cfg.U, cfg.h);
    const SparseSymMatrix H =
        build_hamiltonian(*init.state.basis(), ModelParams{cfg.J, cfg.U, spec.barrier.potential(cfg.L, cfg.h)});
    const Spectrum spectrum = eigh_dense(H);
    const OverlapReport report = overlap_analysis(init.state, spectrum, cfg.overlap_options());
    const auto ranked = report.ranked();
    log << "  pre-barrier population " << format_real(init.pre_barrier_population) << ", largest overlap "
        << format_real(report.eigenstates[ranked.front()].overlap) << " (eigenstate " << ranked.front() << ")\n";
    const std::string path = output_path(cfg, cmd, f);
    write_text(path, overlap_json(report));
    log << "  wrote " << path << '\n';
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << "  done in " << format_real(seconds) << " s\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& log) {
  CLI::App app{"Bose-Hubbard directional transport simulator", "bht"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  Overrides overrides;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"quench", "cooling-barrier preparation and quench; writes a trajectory"},
      {"sweep", "population-imbalance sweep over U and t; writes a grid"},
      {"overlap", "eigenstate overlaps and Fock composition of the prepared state"},
      {"coherent", "coherent-state quench by exact number-sector decomposition"},
      {"windows", "directional transport windows of a U sweep"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->set_help_flag("--help", "print help");
    add_common_options(sub, overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    log << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    log << "bht: " << e.what() << '\n';
    return 1;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    if (overrides.config) {
      std::ifstream in(*overrides.config);
      if (!in) throw InputError("cannot read config file " + *overrides.config);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = parse_config(ss.str(), false);
    }
    if (const char* threads = std::getenv("THREADS")) apply_setting(cfg, "threads", threads);
    for (const auto& [key, value] : overrides.values) {
      if (value) apply_setting(cfg, key, *value);
    }
    validate(cfg);
  } catch (const ConfigValidationError& e) {
    log << "bht: invalid configuration: " << e.what() << '\n';
    return 1;
  } catch (const ConfigParseError& e) {
    log << "bht: config parse error: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    log << "bht: " << e.what() << '\n';
    return 1;
  }

  try {
    run_command(cmd, cfg, log);
  } catch (const ConfigValidationError& e) {
    log << "bht: invalid configuration: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "bht: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    log << "bht: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace bht
