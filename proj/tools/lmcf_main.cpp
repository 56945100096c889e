#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lmcf/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lmcf: a curve shortening flow laboratory"};
  app.require_subcommand(1);

  lmcf::CliOptions opts;
  std::string config, out = "out", traj;
  std::uint64_t seed = 12345;

  auto add_common = [&](CLI::App* cmd, bool needs_config, bool needs_traj) {
    auto* c = cmd->add_option("--config", config, "configuration file (key = value sections)");
    if (needs_config) c->required();
    cmd->add_option("--out", out, "output directory");
    if (needs_traj)
      cmd->add_option("--traj", traj, "trajectory directory (a simulate output)")->required();
    cmd->add_option("--seed", seed, "random seed")->each([&](const std::string&) {
      opts.seed_given = true;
    });
  };

  auto* simulate = app.add_subcommand("simulate", "run a flow and write snapshots + manifest");
  add_common(simulate, true, false);
  simulate->add_flag("--svg", opts.svg, "export the snapshots as an SVG polyline figure");

  auto* verify = app.add_subcommand("verify", "evolution-equation and inequality checks");
  add_common(verify, false, true);

  auto* estimate = app.add_subcommand("estimate", "sup |H|/(b - varphi) sweep over (R, T)");
  add_common(estimate, false, true);
  estimate->add_flag("--audit", opts.audit, "run the maximum-point audit on every sweep cell");

  auto* inequalities = app.add_subcommand("inequalities", "seeded sampling of the bare inequalities");
  add_common(inequalities, false, false);

  auto* soliton = app.add_subcommand("soliton", "translator residual of a sampled solution");
  add_common(soliton, true, false);

  CLI11_PARSE(app, argc, argv);

  opts.config_path = config;
  opts.out_dir = out;
  opts.traj_dir = traj;
  opts.seed = seed;

  try {
    if (simulate->parsed()) return lmcf::cmd_simulate(opts);
    if (verify->parsed()) return lmcf::cmd_verify(opts);
    if (estimate->parsed()) return lmcf::cmd_estimate(opts);
    if (inequalities->parsed()) return lmcf::cmd_inequalities(opts);
    if (soliton->parsed()) return lmcf::cmd_soliton(opts);
  } catch (const lmcf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lmcf::SpacingCollapse& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
