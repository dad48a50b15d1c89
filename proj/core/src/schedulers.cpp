#include "vecsim/schedulers.hpp"

#include <algorithm>
#include <string>

#include "vecsim/error.hpp"

namespace vecsim {

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::FCFS: return "fcfs";
    case SchedulerKind::SDF: return "sdf";
    case SchedulerKind::PSO: return "pso";
  }
  return "?";
}

SchedulerKind parse_scheduler_kind(std::string_view text) {
  if (text == "fcfs") return SchedulerKind::FCFS;
  if (text == "sdf") return SchedulerKind::SDF;
  if (text == "pso") return SchedulerKind::PSO;
  throw ConfigError("unknown scheduler '" + std::string(text) + "'");
}

std::vector<TaskId> fcfs_order(const Scenario& scenario) {
  // Scenario tasks are stored in ready order with id tie-break already.
  std::vector<TaskId> order;
  order.reserve(scenario.num_tasks());
  for (const Task& t : scenario.tasks()) order.push_back(t.id);
  return order;
}

std::vector<TaskId> sdf_order(const Scenario& scenario) {
  std::vector<TaskId> order = fcfs_order(scenario);
  std::stable_sort(order.begin(), order.end(), [&](TaskId a, TaskId b) {
    const Task& ta = scenario.task(a);
    const Task& tb = scenario.task(b);
    if (ta.exit_time_s() != tb.exit_time_s()) return ta.exit_time_s() < tb.exit_time_s();
    if (ta.ready_time_s != tb.ready_time_s) return ta.ready_time_s < tb.ready_time_s;
    return a < b;
  });
  return order;
}

namespace {

AdmissionResult build(const Scenario& scenario, OffloadMode mode,
                      const BaselineOptions& options, const std::vector<TaskId>& order) {
  AdmissionRequest req;
  req.mode = mode;
  req.policy = options.policy;
  req.drop_rule = options.drop_rule;
  req.order = order;
  return admit(scenario, req);
}

}  // namespace

AdmissionResult build_fcfs(const Scenario& scenario, OffloadMode mode,
                           const BaselineOptions& options) {
  return build(scenario, mode, options, fcfs_order(scenario));
}

AdmissionResult build_sdf(const Scenario& scenario, OffloadMode mode,
                          const BaselineOptions& options) {
  return build(scenario, mode, options, sdf_order(scenario));
}

}  // namespace vecsim
