#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vecsim/admission.hpp"
#include "vecsim/engine.hpp"
#include "vecsim/pso.hpp"
#include "vecsim/scenario.hpp"
#include "vecsim/schedulers.hpp"

namespace vecsim {

/// Everything one experiment needs; the CLI flags map onto these fields.
struct ExperimentConfig {
  ScenarioConfig scenario;
  SchedulerKind scheduler = SchedulerKind::PSO;
  OffloadMode mode = OffloadMode::MecOnly;
  BandwidthPolicy policy = BandwidthPolicy::Shared;
  DropRule drop_rule = DropRule::Predictive;
  PsoConfig pso;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t jobs = 0;  // 0: hardware concurrency
  std::string output_dir = "runs";
  std::vector<std::size_t> sweep_sizes = {50, 100, 200};
  std::string tag;  // empty: derived from the grid cell

  std::size_t effective_jobs() const;
};

/// Directory-safe label of a grid cell, e.g. "n200-pso-mec-only-shared".
std::string experiment_tag(const ExperimentConfig& config);

struct RunSummary {
  std::uint64_t seed = 0;
  std::size_t num_tasks = 0;
  std::size_t drop_count = 0;
  double drop_ratio = 0.0;
  double mean_e2e_s = 0.0;
  double mean_remote_portion = 0.0;
  double mean_local_portion = 0.0;
  double mean_uplink_wait_s = 0.0;
  double mean_downlink_wait_s = 0.0;
  std::size_t uplink_shared_cohorts = 0;
  std::size_t downlink_shared_cohorts = 0;
  std::size_t deadline_misses = 0;
  FitnessBreakdown fitness;
  std::size_t pso_iterations = 0;  // 0 for the baselines
};

/// One seed: the realized outcome plus the optimizer trace when PSO ran.
struct RunRecord {
  RunSummary summary;
  SimOutcome outcome;
  std::vector<ConvergencePoint> convergence;
};

struct ExperimentResult {
  std::size_t scenario_size = 0;
  SchedulerKind scheduler = SchedulerKind::FCFS;
  OffloadMode mode = OffloadMode::MecOnly;
  BandwidthPolicy policy = BandwidthPolicy::Fixed;
  std::size_t runs = 0;
  double mean_drop_ratio = 0.0;
  double mean_drop_count = 0.0;
  double mean_e2e_s = 0.0;  // over runs that kept at least one task
  double mean_local_portion = 0.0;
  double mean_remote_portion = 0.0;
  double mean_uplink_wait_s = 0.0;
  double mean_downlink_wait_s = 0.0;
  double mean_fitness = 0.0;
  std::vector<RunSummary> per_run;
};

struct ExperimentRun {
  ExperimentResult result;
  std::vector<RunRecord> records;  // in seed order
};

/// Schedules and simulates one scenario with the configured scheduler.
RunRecord run_scenario(const Scenario& scenario, const ExperimentConfig& config,
                       std::size_t pso_jobs = 1);

/// Generates one scenario per seed, runs them (seeds in parallel), and
/// averages. Output order follows the seed list.
ExperimentRun run_experiment(const ExperimentConfig& config);

ExperimentResult aggregate(const ExperimentConfig& config, std::span<const RunRecord> records);

/// Writes summary.json, tasks.csv and convergence.csv into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                       const ExperimentRun& run);
void write_tasks_csv(std::ostream& out, std::span<const RunRecord> records);
void write_convergence_csv(std::ostream& out, std::span<const RunRecord> records);

ExperimentResult read_summary(const std::filesystem::path& summary_json);

/// b - a for every averaged metric; a and b must share size and scheduler.
struct PairedDelta {
  double drop_count = 0.0;
  double drop_ratio = 0.0;
  double e2e_s = 0.0;
  double uplink_wait_s = 0.0;
  double downlink_wait_s = 0.0;
  double total_wait_s = 0.0;
};
PairedDelta paired_delta(const ExperimentResult& a, const ExperimentResult& b);

struct ComparisonRow {
  std::size_t scenario_size = 0;
  SchedulerKind scheduler = SchedulerKind::FCFS;
  std::string kind;     // "policy" (shared - fixed) or "mode" (mec-only - partition)
  std::string held;     // the mode (for policy rows) or policy (for mode rows)
  PairedDelta delta;
};

/// Paired deltas for results that share scenario size and scheduler:
/// shared - fixed per mode, and mec-only - partition per policy. Throws
/// UsageError if the inputs mix sizes or schedulers.
std::vector<ComparisonRow> compare_policies(std::span<const ExperimentResult> results);

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

/// "%.9g"; every number in run outputs goes through this.
std::string format_number(double value);

}  // namespace vecsim
