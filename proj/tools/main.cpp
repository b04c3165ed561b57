// Command line front end: spectral model selection for stationary series.
//
//   specfic fic --config cfg.json [--out DIR] [--seed S] [--quad-nodes N]
//   specfic reproduce fig3 --B 200 --out fig3/
//
// Subcommands: fit, fic, afic, simulate, mc, least-false, reproduce.
// Configs are strict JSON; every run echoes the resolved config into the
// output directory.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specfic/cli.hpp"
#include "specfic/errors.hpp"
#include "specfic/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> B;
  std::optional<int> n;
  std::optional<int> quad_nodes;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* copt = cmd->add_option("--config", flags.config_path,
                               "Path to a JSON run configuration");
  if (config_required) copt->required();
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_option("--seed", flags.seed, "Random seed override");
  cmd->add_option("--workers", flags.workers, "Monte Carlo worker threads");
  cmd->add_option("--B", flags.B, "Replication count override");
  cmd->add_option("--n", flags.n, "Series length override");
  cmd->add_option("--quad-nodes", flags.quad_nodes,
                  "Quadrature node count override");
}

specfic::RunConfig resolve(const CommonFlags& flags,
                           const std::string& command) {
  specfic::RunConfig cfg;
  if (!flags.config_path.empty())
    cfg = specfic::RunConfig::from_file(flags.config_path);
  if (!cfg.command.empty() && cfg.command != command)
    throw specfic::ConfigError("config: command '" + cfg.command +
                               "' does not match subcommand '" + command + "'");
  cfg.command = command;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.workers) cfg.workers = *flags.workers;
  if (flags.B) cfg.B = *flags.B;
  if (flags.n) cfg.n = *flags.n;
  if (flags.quad_nodes) cfg.quad_nodes = *flags.quad_nodes;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral model selection toolkit"};
  app.set_version_flag("--version", specfic::kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"fit",      "fic", "afic",
                                             "simulate", "mc",  "least-false"};
  std::map<std::string, CommonFlags> flags;
  for (const std::string& name : commands) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, flags[name], /*config_required=*/true);
  }
  CLI::App* rep = app.add_subcommand("reproduce", "Built-in study designs");
  std::string figure;
  rep->add_option("figure", figure, "fig1, fig3, fig4, fig5 or fig6")
      ->required();
  CommonFlags rep_flags;
  add_common(rep, rep_flags, /*config_required=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rep->parsed()) {
      specfic::RunConfig cfg = resolve(rep_flags, "reproduce");
      cfg.figure = figure;
      return specfic::run_command(cfg, std::cout);
    }
    for (const std::string& name : commands) {
      if (app.get_subcommand(name)->parsed())
        return specfic::run_command(resolve(flags[name], name), std::cout);
    }
  } catch (const specfic::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const specfic::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
