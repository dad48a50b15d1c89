#pragma once

#include <cstddef>
#include <vector>

#include "vecsim/engine.hpp"
#include "vecsim/scenario.hpp"

namespace vecsim::testing {

// Frame sizes of the default resolution table, in bits.
inline constexpr double kBits1080p = 1920.0 * 1080.0 * 24.0;
inline constexpr double kBits720p = 1280.0 * 720.0 * 24.0;
inline constexpr double kBits480p = 640.0 * 480.0 * 24.0;

struct TaskSpec {
  double ready_s = 0.0;
  double size_bits = kBits480p;
  double remote_s = 0.5;
  double local_s = 1.5;
  double deadline_s = 10.0;
};

// One vehicle per task, entering coverage at the ready instant.
Scenario make_scenario(const std::vector<TaskSpec>& specs, std::size_t servers = 2,
                       RadioParams radio = {});

// Three tasks on two servers: a 1080p and a 720p frame ready at t=0 and a
// 480p frame ready at t=0.1.
Scenario three_task_scenario();

Schedule make_schedule(OffloadMode mode, std::vector<TaskId> order,
                       std::vector<std::optional<std::size_t>> servers,
                       std::vector<double> fractions);

// Straightforward O(n^2) re-implementation of the queueing rules, used to
// cross-check the engine on small instances.
SimOutcome reference_simulate(const Scenario& scenario, const Schedule& schedule,
                              BandwidthPolicy policy);

}  // namespace vecsim::testing
