#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lqgame/scenario.hpp"

namespace lqgame {

// Process exit statuses shared by the CLI and the library-level runners.
enum class RunStatus : int {
  Ok = 0,
  ParseError = 2,
  ValidationFailure = 3,
  SolverSingularity = 4,
  Divergence = 5,
};

inline int to_exit_code(RunStatus s) { return static_cast<int>(s); }

/// validate -> solve -> (compensator) -> simulate requested cases, writing
/// per-case trajectory CSVs and a cost report JSON under out_dir and
/// printing the cost table.
RunStatus run_scenario(const ScenarioConfig& config,
                       const std::filesystem::path& out_dir);

RunStatus run_validate(const ScenarioConfig& config);
RunStatus run_solve(const ScenarioConfig& config,
                    const std::filesystem::path& out_dir);
RunStatus run_simulate(const ScenarioConfig& config, CaseKind kind,
                       const std::filesystem::path& out_dir);

/// All requested cases plus the derived percentages; with `calibrate` also
/// prints and writes the cost tables for the four under-determined
/// combinations (lag initialization x terminal-weight choice).
RunStatus run_report(const ScenarioConfig& config,
                     const std::filesystem::path& out_dir,
                     bool calibrate = false);

/// Deviation-driven sensitivity analysis. Exactly one of deviation_file /
/// sweep_epsilons must be provided: a JSON file with N deviation vectors, or
/// an epsilon sweep along a deterministic pseudo-random direction.
RunStatus run_sensitivity(const ScenarioConfig& config,
                          const std::optional<std::filesystem::path>& deviation_file,
                          const std::vector<double>& sweep_epsilons,
                          const std::filesystem::path& out_dir);

RunStatus run_export(const ScenarioConfig& config,
                     const std::filesystem::path& out_file);

// One row of the calibration table: a combination of the two
// under-determined modeling choices and the resulting cost comparison.
struct CalibrationEntry {
  bool matched_init = false;
  bool terminal_qi = true;
  CaseComparison table;
};

std::vector<CalibrationEntry> calibrate_cases(const ScenarioConfig& config);

/// Writes one trajectory CSV row set (header + N+1 rows, full precision).
void write_trajectory_csv(const GameDefinition& game, const SimulationResult& result,
                          const std::filesystem::path& file);

}  // namespace lqgame
