#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace sbm::cli;

  CLI::App app{"Spinning Brownian motion: simulation, stationary estimates and checks"};
  app.require_subcommand(1);

  CommandOptions opt;
  opt.workers = workersFromEnvironment();
  std::uint64_t seed = 0;
  std::size_t chains = 0;

  auto addCommon = [&](CLI::App* sub, bool outDir) {
    sub->add_option("--config", opt.configPath, "Run configuration file")->required()->check(CLI::ExistingFile);
    if (outDir) sub->add_option("--out-dir", opt.outDir, "Directory for CSV files and reports");
    sub->add_option("--seed-override", seed, "Replace sim.seed");
    sub->add_option("--chains", chains, "Replace sim.chains")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opt.quiet, "Print nothing on success");
  };
  auto* simulateCmd = app.add_subcommand("simulate", "Simulate chains and write trajectory CSVs");
  addCommon(simulateCmd, true);
  auto* estimateCmd = app.add_subcommand("estimate-stationary", "Estimate the stationary law from occupation times");
  addCommon(estimateCmd, true);
  auto* verifyCmd = app.add_subcommand("verify", "Run the verification checks; exit 1 on any FAIL");
  addCommon(verifyCmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  for (auto* sub : {simulateCmd, estimateCmd, verifyCmd}) {
    if (sub->count("--seed-override")) opt.seedOverride = seed;
    if (sub->count("--chains")) opt.chains = chains;
  }

  try {
    if (*simulateCmd) return cmdSimulate(opt, std::cout, std::cerr);
    if (*estimateCmd) return cmdEstimateStationary(opt, std::cout, std::cerr);
    return cmdVerify(opt, std::cout, std::cerr);
  } catch (const sbm::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sbm::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
