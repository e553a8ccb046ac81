#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohesion/analysis.hpp"
#include "cohesion/config.hpp"

namespace cohesion {

enum class Command { Bounds, Spectral, Simulate, Recurrence, Drift };

const char* to_string(Command command);
std::optional<Command> parse_command(const std::string& name);

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunResult {
  nlohmann::ordered_json report;
  std::filesystem::path summary_path;
  std::vector<std::filesystem::path> data_files;
};

/// Runs one subcommand, writes its CSV data file (if any) and the summary
/// report under config.output_directory.
RunResult run_subcommand(Command command, const ExperimentConfig& config);

/// Maps an exception from load_config/run_subcommand to an exit code.
int exit_code_for(const std::exception& error) noexcept;

// Row writers, exposed for tests. Columns are documented in README.md.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
void write_recurrence_csv(std::ostream& out, const RecurrenceStats& stats);
void write_drift_csv(std::ostream& out, const TreeGraph& graph, const std::vector<DriftEstimate>& probes);

}  // namespace cohesion
