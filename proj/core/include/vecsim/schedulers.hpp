#pragma once

#include <string_view>

#include "vecsim/admission.hpp"

namespace vecsim {

enum class SchedulerKind { FCFS, SDF, PSO };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler_kind(std::string_view text);

struct BaselineOptions {
  BandwidthPolicy policy = BandwidthPolicy::Fixed;
  DropRule drop_rule = DropRule::Predictive;
};

// Both baselines pick the earliest-available server and admit tasks online
// in ready order. They differ only in the priority order applied at the
// queues.

/// Priority = ready time, ties by id.
AdmissionResult build_fcfs(const Scenario& scenario, OffloadMode mode,
                           const BaselineOptions& options = {});

/// Priority = absolute deadline (ready + remaining range time), ties by
/// ready time then id. Applied among the tasks waiting at each queue, so a
/// task is never served before it is generated and never preempts.
AdmissionResult build_sdf(const Scenario& scenario, OffloadMode mode,
                          const BaselineOptions& options = {});

std::vector<TaskId> fcfs_order(const Scenario& scenario);
std::vector<TaskId> sdf_order(const Scenario& scenario);

}  // namespace vecsim
