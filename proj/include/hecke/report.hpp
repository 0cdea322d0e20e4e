#pragma once

#include "hecke/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hecke {

using Json = nlohmann::json;

/**
 * Deterministic per-task seed: a splitmix64 step of
 * base + (index + 1) * 0x9e3779b97f4a7c15. Task i of a run always sees the
 * same seed for a given run seed, whether tasks execute sequentially or in
 * parallel, so reruns and partial reruns reproduce each report exactly.
 */
std::uint64_t task_seed(std::uint64_t base, std::size_t index);

/**
 * Executes one task against the environment and returns its report.
 * Every report carries `check` (what was verified), the echoed `inputs`,
 * a `provenance` object (seed plus whichever of budget/truncation the
 * numbers depended on), and a `summary` {status, metric, value} row.
 * Throws on execution failure (unresolvable words, exhausted budgets in
 * exact contexts, ...); verdict-level negatives are reported, not thrown.
 */
Json run_task(const Environment& env, const TaskDecl& task, std::uint64_t seed);

struct RunOutcome {
  int exit_code = 0;  ///< 0 all tasks ran, 1 execution or I/O failure
  std::vector<std::string> report_files;
  std::string error;  ///< diagnostic when exit_code != 0
};

/**
 * Runs every task of the config in order, writing into `out_dir`:
 *   NNN_<kind>.json   one report per completed task (NNN = task index)
 *   summary.csv       one row per completed task
 *   metadata.json     run description; the only file with wall-clock times
 * Report and summary bytes depend only on the config and seed. With
 * `parallel`, tasks run concurrently on private environments; per-task
 * seeds make the outputs identical to a sequential run. Execution stops at
 * the first failing task (reports before it are still written).
 */
RunOutcome run_config(const ExperimentConfig& cfg, const std::string& out_dir,
                      bool parallel = false);

}  // namespace hecke
