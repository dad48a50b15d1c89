#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vecsim/channel.hpp"
#include "vecsim/scenario.hpp"

namespace vecsim {

/// MecOnly offloads whole tasks or drops them; Partition splits each task
/// between an edge server and the vehicle and never drops.
enum class OffloadMode { MecOnly, Partition };

std::string_view to_string(OffloadMode mode);
OffloadMode parse_offload_mode(std::string_view text);

/// A complete offloading decision. `assignment` and `fraction` are indexed
/// by task id; `order` is the priority sequence applied at every queue
/// (earlier means served first among the tasks waiting at that queue).
struct Schedule {
  OffloadMode mode = OffloadMode::MecOnly;
  std::vector<TaskId> order;
  std::vector<std::optional<std::size_t>> assignment;
  std::vector<double> fraction;

  bool dropped(TaskId id) const { return !assignment[id].has_value(); }
  std::size_t drop_count() const;
};

/// Throws IntegrityError if the schedule does not fit the scenario.
void validate_schedule(const Scenario& scenario, const Schedule& schedule);

/// Realized timeline of one task. Durations of the remote stages already
/// reflect the offloaded share: the channel carries fraction * size bits and
/// the server runs for fraction * remote processing time.
struct TaskTimeline {
  TaskId task_id = 0;
  std::optional<std::size_t> server;
  double fraction = 0.0;
  bool dropped = false;

  double ready_time_s = 0.0;
  double uplink_wait_s = 0.0;
  double uplink_tx_s = 0.0;
  double rsu_arrival_s = 0.0;
  double proc_wait_s = 0.0;
  double proc_start_s = 0.0;
  double proc_time_s = 0.0;
  double proc_end_s = 0.0;
  double downlink_wait_s = 0.0;
  double downlink_tx_s = 0.0;
  double vehicle_arrival_s = 0.0;
  double local_time_s = 0.0;

  double comm_latency_s = 0.0;  // waits + both transmissions
  double comp_latency_s = 0.0;  // server wait + processing
  double e2e_latency_s = 0.0;   // remote part + local part
  // Same quantity with the offload weight applied to full-task transmission
  // and processing times; kept so both readings can be compared.
  double weighted_e2e_s = 0.0;

  std::uint32_t uplink_cohort = 0;
  std::uint32_t downlink_cohort = 0;
  bool deadline_met = true;

  bool offloaded() const { return !dropped && fraction > 0.0; }
};

struct SimOutcome {
  std::vector<TaskTimeline> timelines;  // indexed by task id
  std::size_t drop_count = 0;
  double drop_ratio = 0.0;
  double mean_e2e_s = 0.0;  // non-dropped tasks only; NaN if none
  double total_e2e_s = 0.0;
  double mean_uplink_wait_s = 0.0;    // offloaded tasks only
  double mean_downlink_wait_s = 0.0;  // offloaded tasks only
  double mean_remote_portion = 0.0;   // non-dropped tasks only
  double mean_local_portion = 0.0;
  std::size_t deadline_misses = 0;
  std::size_t uplink_shared_cohorts = 0;    // cohorts with >= 2 members
  std::size_t downlink_shared_cohorts = 0;
  std::vector<double> server_utilization;
};

/// Deterministic event simulation of uplink, server queues, downlink and
/// local processing for the given schedule.
SimOutcome simulate(const Scenario& scenario, const Schedule& schedule,
                    BandwidthPolicy policy);

/// Largest p in [0, 1] with p * (comm + comp) <= task.range_deadline_s.
double feasible_fraction(const Task& task, double predicted_comm_latency_s,
                         double predicted_comp_latency_s);

/// True iff the offloaded result reaches the vehicle before it leaves
/// coverage. Dropped and purely local tasks pass vacuously.
bool check_deadline(const TaskTimeline& timeline, const Task& task);

inline constexpr double kDeadlineTolerance = 1e-9;

/// Marks admitted tasks that missed their deadline as dropped and refreshes
/// the aggregates. Their channel and server occupancy stays in place.
void apply_realized_drops(SimOutcome& outcome);

/// Recomputes the aggregate fields from the timelines.
void summarize(SimOutcome& outcome, std::size_t num_servers);

namespace detail {

/// Per-position plan used by the incremental admission code.
struct TaskPlan {
  std::int32_t server = -1;  // -1: not offloaded
  double fraction = 0.0;
  std::uint32_t rank = 0;
  bool offloaded() const { return server >= 0 && fraction > 0.0; }
};

struct StageTimes {
  double uplink_wait = 0, uplink_tx = 0, rsu_arrival = 0;
  double proc_wait = 0, proc_start = 0, proc_end = 0;
  double downlink_wait = 0, downlink_tx = 0, vehicle_arrival = 0;
  std::uint32_t uplink_cohort = 0, downlink_cohort = 0;
};

/// Scratch buffers reused across runs; one per thread.
struct EngineWorkspace {
  std::vector<std::size_t> members;
  std::vector<std::size_t> unit_begin;
  std::vector<double> unit_release;
  std::vector<std::uint32_t> unit_rank;
  std::vector<std::size_t> heap;
  std::vector<std::size_t> by_arrival;
  std::vector<std::vector<std::size_t>> per_server;
  std::vector<double> rate_by_cohort;
  const Scenario* rates_for = nullptr;
  BandwidthPolicy rates_policy = BandwidthPolicy::Fixed;
};

struct StageStats {
  std::size_t uplink_cohorts = 0;    // shared transmissions with >= 2 members
  std::size_t downlink_cohorts = 0;
};

/// Runs the three remote stages for every offloaded position in `plan`
/// (indexed by scenario position). Entries of `times` for positions that
/// are not offloaded are left untouched.
StageStats run_stages(const Scenario& scenario, std::span<const TaskPlan> plan,
                      BandwidthPolicy policy, EngineWorkspace& ws, std::span<StageTimes> times);

}  // namespace detail

}  // namespace vecsim
