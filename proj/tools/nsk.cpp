#include "nsk/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace nsk::cli;
  CLI::App app{"Navier-Stokes-Korteweg structure-verification lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::string config, out = "out";
  auto* run = app.add_subcommand("run", "integrate one configuration and write diagnostics");
  run->add_option("config", config, "config file")->required();
  run->add_option("-o,--out", out, "output directory");

  nsk::BoundSuiteOptions bounds;
  auto* trunc = app.add_subcommand("test-truncations", "sample every truncation bound");
  trunc->add_option("-o,--out", out, "output directory");
  trunc->add_option("--dim", bounds.dim, "dimension for the lifted truncations")->check(CLI::Range(1, 3));
  trunc->add_option("--samples", bounds.samples, "samples per check")->check(CLI::PositiveNumber);
  trunc->add_option("--seed", bounds.seed, "sampling seed");

  auto* comm = app.add_subcommand("test-commutator", "commutator norms along halving radii");
  comm->add_option("-o,--out", out, "output directory");

  auto* sweep = app.add_subcommand("sweep-remainder", "remainder terms along a (delta, lambda) sweep");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("-o,--out", out, "output directory");

  auto* report = app.add_subcommand("report", "run and emit a JSON verdict report");
  report->add_option("config", config, "config file")->required();
  report->add_option("-o,--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out, std::cerr);
    if (*trunc) return cmd_test_truncations(out, std::cerr, bounds);
    if (*comm) return cmd_test_commutator(out, std::cerr);
    if (*sweep) return cmd_sweep_remainder(config, out, std::cerr);
    if (*report) return cmd_report(config, out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kConfigError;
}
