// Command-line front end: one subcommand per experiment type, driven by a
// JSON configuration file.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cohesion/config.hpp"
#include "cohesion/runner.hpp"

namespace {

const char* category(int code) {
  switch (code) {
    case cohesion::kExitConfig: return "config";
    case cohesion::kExitIo: return "io";
    default: return "numeric";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic phase-cohesiveness of Kuramoto networks on trees"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;

  for (cohesion::Command cmd : {cohesion::Command::Bounds, cohesion::Command::Spectral, cohesion::Command::Simulate,
                                cohesion::Command::Recurrence, cohesion::Command::Drift}) {
    const char* help = "";
    switch (cmd) {
      case cohesion::Command::Bounds: help = "Sufficient kappa and necessary tau bounds"; break;
      case cohesion::Command::Spectral: help = "Monte Carlo E[lambda_min], E[lambda_max] of B^T W B"; break;
      case cohesion::Command::Simulate: help = "Single trajectory to CSV"; break;
      case cohesion::Command::Recurrence: help = "First-return statistics over many trials"; break;
      case cohesion::Command::Drift: help = "One-step drift of V at states outside the cohesive set"; break;
    }
    CLI::App* sub = app.add_subcommand(cohesion::to_string(cmd), help);
    sub->add_option("-c,--config", config_path, "Experiment configuration (JSON)")->required();
    sub->add_option("-s,--set", overrides, "Override a field, e.g. --set kappa=25 --set output.decimation=10");
    sub->add_option("-o,--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_flag("-q,--quiet", quiet, "Only print the summary path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the config exit code; --help exits 0
    return app.exit(e) == 0 ? cohesion::kExitOk : cohesion::kExitConfig;
  }
  const auto command = cohesion::parse_command(app.get_subcommands().front()->get_name());

  try {
    if (!out_dir.empty()) overrides.push_back("output.directory=" + nlohmann::json(out_dir).dump());
    const cohesion::ExperimentConfig config = cohesion::load_config(config_path, overrides);
    const cohesion::RunResult result = cohesion::run_subcommand(*command, config);
    if (!quiet) {
      for (const char* section : {"spectral", "e_max_delta_omega", "bounds", "continuous_reference_kappa", "simulate",
                                  "recurrence", "drift"}) {
        if (result.report.contains(section)) std::cout << section << ": " << result.report[section].dump(2) << '\n';
      }
      for (const auto& f : result.data_files) std::cout << "data: " << f.string() << '\n';
    }
    std::cout << "summary: " << result.summary_path.string() << '\n';
    return cohesion::kExitOk;
  } catch (const std::exception& e) {
    const int code = cohesion::exit_code_for(e);
    std::cerr << "error [" << category(code) << "]: " << e.what() << '\n';
    return code;
  }
}
