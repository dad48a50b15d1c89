#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "vecsim/engine.hpp"

namespace vecsim {

/// Predictive: a task is admitted only if, with it added, every admitted
/// task still returns its result before leaving coverage. Realized: every
/// task is admitted and deadline misses are counted as drops afterwards.
enum class DropRule { Predictive, Realized };

std::string_view to_string(DropRule rule);
DropRule parse_drop_rule(std::string_view text);

struct AdmissionRequest {
  OffloadMode mode = OffloadMode::MecOnly;
  BandwidthPolicy policy = BandwidthPolicy::Fixed;
  DropRule drop_rule = DropRule::Predictive;
  std::span<const TaskId> order;
  // Server per task id. Empty: pick the server on which the task would
  // start processing earliest.
  std::span<const std::size_t> servers;
  // Requested offload fraction per task id (partition mode). Empty: 1.
  std::span<const double> desired_fraction;
};

struct AdmissionResult {
  Schedule schedule;
  // Server each task was evaluated on, kept for dropped tasks as well.
  std::vector<std::size_t> considered_server;
};

/// Online admission at the RSU. Tasks are considered in ready order; each
/// decision sees only tasks that are already ready. In partition mode the
/// offload fraction is capped by feasible_fraction() on the predicted
/// full-offload latency and then shrunk until every admitted result still
/// meets its deadline, so no task is ever dropped.
AdmissionResult admit(const Scenario& scenario, const AdmissionRequest& request);

}  // namespace vecsim
