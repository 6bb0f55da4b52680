#include "openkrotov/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "openkrotov/controllability.hpp"
#include "openkrotov/csv.hpp"

namespace openkrotov {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Data files are staged in memory and written at the end of a command.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  std::ostringstream& file(const std::string& name) { return files_.emplace_back(name, std::ostringstream{}).second; }

  void commit() {
    fs::create_directories(dir_);
    for (const auto& [name, body] : files_) {
      const fs::path p = dir_ / name;
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
      out << body.str();
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::ostringstream>> files_;
};

void log(const CommandContext& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << '\n';
}

const ControlObjective& require_objective(const RunConfig& c) {
  if (!c.objective) throw ConfigError("this command needs an 'objective'");
  return *c.objective;
}

}  // namespace

void cmd_propagate(const RunConfig& config, const CommandContext& ctx) {
  Matrix rho0;
  std::optional<Matrix> target;
  if (config.initial_state) {
    rho0 = *config.initial_state;
  } else if (config.objective && std::holds_alternative<StateToState>(*config.objective)) {
    rho0 = std::get<StateToState>(*config.objective).initial;
  } else {
    throw ConfigError("propagate needs 'initial_state' or a state-to-state objective");
  }
  if (config.objective) {
    if (const auto* s = std::get_if<StateToState>(&*config.objective)) target = s->target;
  }
  const LindbladGenerator gen = config.generator();
  const ControlField field = config.guess_field();
  log(ctx, "propagating " + std::to_string(field.grid().n_steps()) + " steps");
  const Trajectory traj = propagate_forward(gen, field, rho0);

  OutputSet out(ctx.out_dir);
  write_trajectory_csv(out.file("trajectory.csv"), traj);
  write_observables_csv(out.file("observables.csv"), observables(traj, target));
  out.commit();
}

void cmd_optimize(const RunConfig& config, const CommandContext& ctx) {
  const LindbladGenerator gen = config.generator();
  const ControlObjective& objective = require_objective(config);
  const OptimizationRecord rec =
      krotov_iterate(gen, objective, config.guess_field(), config.options, config.spectral);
  for (const auto& it : rec.iterations) {
    log(ctx, "iter " + std::to_string(it.iteration) + "  F=" + csv::format_number(it.fidelity) +
                 "  dF=" + csv::format_number(it.delta_f));
  }
  log(ctx, "stopped: " + rec.reason);
  if (rec.constraint_warning) {
    log(ctx, "warning: shape function is not constant; the spectral filter is applied approximately");
  }

  json summary = {{"final_fidelity", rec.final_fidelity()},
                  {"iterations", rec.iterations.back().iteration},
                  {"converged", rec.converged},
                  {"monotone", rec.monotone},
                  {"reason", rec.reason},
                  {"constraint_warning", rec.constraint_warning},
                  {"rejected_steps", rec.rejected_steps}};
  OutputSet out(ctx.out_dir);
  write_pulse_csv(out.file("pulse.csv"), rec.field);
  write_convergence_csv(out.file("convergence.csv"), rec);
  out.file("summary.json") << summary.dump(2) << '\n';
  out.commit();
  if (rec.reason.rfind("non-finite", 0) == 0) throw std::runtime_error(rec.reason);
}

void cmd_scan(const RunConfig& config, const CommandContext& ctx) {
  if (config.scan_durations.empty()) throw ConfigError("scan needs 'scan.durations'");
  const LindbladGenerator gen = config.generator();
  const auto rows = scan_duration(gen, require_objective(config), config.guess_field(),
                                  config.scan_durations, config.options, config.spectral);
  for (const auto& r : rows) {
    log(ctx, "T=" + csv::format_number(r.t_final) + "  F=" + csv::format_number(r.fidelity));
  }
  OutputSet out(ctx.out_dir);
  write_scan_csv(out.file("scan.csv"), rows);
  out.commit();
}

std::string cmd_controllability(const RunConfig& config, const CommandContext& ctx) {
  const LindbladGenerator gen = config.generator();
  std::vector<Matrix> controls;
  for (const auto& c : gen.controls()) controls.push_back(c.matrix());
  const LieClosureReport lie = lie_rank(gen.drift().matrix(), controls);
  const ConnectivityReport graph = connectivity_graph(gen.drift().matrix(), controls);

  json doc = {{"generated_dimension", lie.generated_dimension},
              {"full_dimension", lie.full_dimension},
              {"controllable", lie.controllable},
              {"generations", lie.generations},
              {"depth_cap_hit", lie.depth_cap_hit},
              {"components", graph.components},
              {"caveat", kClosedSystemCaveat}};

  std::ostringstream report;
  report << "Lie algebra dimension " << lie.generated_dimension << " / " << lie.full_dimension
         << (lie.controllable ? " (full rank, controllable)" : " (rank deficient, not controllable)")
         << "\ncommutator depth " << lie.generations << (lie.depth_cap_hit ? " (depth cap hit)" : "")
         << "\nconnected components: " << graph.components.size() << "\nnote: " << kClosedSystemCaveat
         << '\n';
  log(ctx, "lie closure finished after " + std::to_string(lie.generations) + " generations");

  OutputSet out(ctx.out_dir);
  out.file("controllability.json") << doc.dump(2) << '\n';
  out.commit();
  return report.str();
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Krotov pulse optimization for Lindblad dynamics"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = -1;
  bool verbose = false;
  std::vector<CLI::App*> subs;
  for (const char* name : {"propagate", "optimize", "scan", "controllability"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run description (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
    sub->add_flag("--verbose", verbose, "progress on stderr");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunConfig config = load_config(config_path);
    if (threads >= 0) {
      config.options.threads = threads;
    } else if (const char* env = std::getenv("OPENKROTOV_THREADS")) {
      try {
        config.options.threads = std::stoi(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("OPENKROTOV_THREADS is not an integer: ") + env);
      }
    }
    if (config.options.threads < 0) throw ConfigError("thread count must be >= 0");

    CommandContext ctx{out_dir.empty() ? fs::path(config.output_dir) : fs::path(out_dir),
                       verbose ? &err : nullptr};
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "propagate") {
      cmd_propagate(config, ctx);
    } else if (cmd == "optimize") {
      cmd_optimize(config, ctx);
    } else if (cmd == "scan") {
      cmd_scan(config, ctx);
    } else {
      out << cmd_controllability(config, ctx);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace openkrotov
