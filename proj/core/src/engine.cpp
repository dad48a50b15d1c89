#include "vecsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vecsim/error.hpp"

namespace vecsim {

std::string_view to_string(OffloadMode mode) {
  return mode == OffloadMode::MecOnly ? "mec-only" : "partition";
}

OffloadMode parse_offload_mode(std::string_view text) {
  if (text == "mec-only" || text == "mec_only" || text == "meconly") return OffloadMode::MecOnly;
  if (text == "partition" || text == "mec+local") return OffloadMode::Partition;
  throw ConfigError("unknown offload mode '" + std::string(text) + "'");
}

std::size_t Schedule::drop_count() const {
  return static_cast<std::size_t>(
      std::count_if(assignment.begin(), assignment.end(), [](const auto& a) { return !a; }));
}

void validate_schedule(const Scenario& scenario, const Schedule& schedule) {
  const std::size_t n = scenario.num_tasks();
  if (schedule.order.size() != n || schedule.assignment.size() != n ||
      schedule.fraction.size() != n)
    throw IntegrityError("schedule size does not match the scenario");
  std::vector<bool> seen(n, false);
  for (TaskId id : schedule.order) {
    if (id >= n) throw IntegrityError("schedule references unknown task " + std::to_string(id));
    if (seen[id]) throw IntegrityError("task " + std::to_string(id) + " appears twice in order");
    seen[id] = true;
  }
  for (TaskId id = 0; id < n; ++id) {
    const auto& server = schedule.assignment[id];
    const double p = schedule.fraction[id];
    if (server && *server >= scenario.num_servers())
      throw IntegrityError("task " + std::to_string(id) + " assigned to unknown server");
    if (!(p >= 0.0 && p <= 1.0))
      throw IntegrityError("offload fraction outside [0, 1] for task " + std::to_string(id));
    if (schedule.mode == OffloadMode::MecOnly) {
      if (server && p != 1.0)
        throw IntegrityError("MEC-only schedule must offload admitted tasks entirely");
      if (!server && p != 0.0)
        throw IntegrityError("dropped task carries a non-zero fraction");
    } else if (!server) {
      throw IntegrityError("partition schedule may not drop task " + std::to_string(id));
    }
  }
}

double feasible_fraction(const Task& task, double predicted_comm_latency_s,
                         double predicted_comp_latency_s) {
  const double remote = predicted_comm_latency_s + predicted_comp_latency_s;
  if (task.range_deadline_s <= 0.0) return 0.0;
  if (remote <= task.range_deadline_s) return 1.0;
  return std::clamp(task.range_deadline_s / remote, 0.0, 1.0);
}

bool check_deadline(const TaskTimeline& timeline, const Task& task) {
  if (!timeline.offloaded()) return true;
  return timeline.vehicle_arrival_s <=
         task.ready_time_s + task.range_deadline_s + kDeadlineTolerance;
}

namespace detail {

namespace {

constexpr double kTol = kSimultaneityTolerance;

const double& rate_for(const Scenario& scenario, BandwidthPolicy policy,
                       EngineWorkspace& ws, std::size_t cohort) {
  if (ws.rates_for != &scenario || ws.rates_policy != policy) {
    ws.rate_by_cohort.clear();
    ws.rates_for = &scenario;
    ws.rates_policy = policy;
  }
  while (ws.rate_by_cohort.size() <= cohort) {
    const std::size_t k = std::max<std::size_t>(1, ws.rate_by_cohort.size());
    ws.rate_by_cohort.push_back(quote(policy, k, scenario.radio()).rate_bps);
  }
  return ws.rate_by_cohort[cohort];
}

// Min-heap on rank over indices into `rank_of`.
template <typename RankFn>
void heap_push(std::vector<std::size_t>& heap, std::size_t v, RankFn rank_of) {
  heap.push_back(v);
  std::push_heap(heap.begin(), heap.end(),
                 [&](std::size_t a, std::size_t b) { return rank_of(a) > rank_of(b); });
}

template <typename RankFn>
std::size_t heap_pop(std::vector<std::size_t>& heap, RankFn rank_of) {
  std::pop_heap(heap.begin(), heap.end(),
                [&](std::size_t a, std::size_t b) { return rank_of(a) > rank_of(b); });
  const std::size_t v = heap.back();
  heap.pop_back();
  return v;
}

}  // namespace

StageStats run_stages(const Scenario& scenario, std::span<const TaskPlan> plan,
                      BandwidthPolicy policy, EngineWorkspace& ws, std::span<StageTimes> times) {
  StageStats stats;
  const auto tasks = scenario.tasks();
  const std::size_t n = tasks.size();
  const bool shared = policy == BandwidthPolicy::Shared;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Uplink. Offloaded positions are already in ready order; under Shared,
  // tasks ready at the same instant form one cohort.
  ws.members.clear();
  ws.unit_begin.clear();
  ws.unit_release.clear();
  ws.unit_rank.clear();
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (!plan[pos].offloaded()) continue;
    const double ready = tasks[pos].ready_time_s;
    const bool joins = shared && !ws.unit_begin.empty() &&
                       ready - tasks[ws.members[ws.unit_begin.back()]].ready_time_s <= kTol;
    if (joins) {
      ws.unit_release.back() = std::max(ws.unit_release.back(), ready);
      ws.unit_rank.back() = std::min(ws.unit_rank.back(), plan[pos].rank);
    } else {
      ws.unit_begin.push_back(ws.members.size());
      ws.unit_release.push_back(ready);
      ws.unit_rank.push_back(plan[pos].rank);
    }
    ws.members.push_back(pos);
  }
  const std::size_t units = ws.unit_begin.size();
  if (units == 0) return stats;
  ws.unit_begin.push_back(ws.members.size());

  {
    auto rank_of = [&](std::size_t u) { return ws.unit_rank[u]; };
    ws.heap.clear();
    double channel_free = kNegInf;
    std::size_t next = 0;
    while (next < units || !ws.heap.empty()) {
      double t = channel_free;
      if (ws.heap.empty() && ws.unit_release[next] > t) t = ws.unit_release[next];
      while (next < units && ws.unit_release[next] <= t + kTol) heap_push(ws.heap, next++, rank_of);
      const std::size_t u = heap_pop(ws.heap, rank_of);
      const double start = std::max(t, ws.unit_release[u]);
      const std::size_t k = ws.unit_begin[u + 1] - ws.unit_begin[u];
      if (k >= 2) ++stats.uplink_cohorts;
      const double rate = rate_for(scenario, policy, ws, k);
      double end = start;
      for (std::size_t i = ws.unit_begin[u]; i < ws.unit_begin[u + 1]; ++i) {
        const std::size_t pos = ws.members[i];
        StageTimes& st = times[pos];
        st.uplink_wait = start - tasks[pos].ready_time_s;
        st.uplink_tx = plan[pos].fraction * tasks[pos].size_bits / rate;
        st.rsu_arrival = start + st.uplink_tx;
        st.uplink_cohort = static_cast<std::uint32_t>(k);
        end = std::max(end, st.rsu_arrival);
      }
      channel_free = end;
    }
  }

  // Servers: each runs one task at a time, non-preemptive, serving the
  // highest-priority task that has arrived whenever it becomes free.
  ws.by_arrival.assign(ws.members.begin(), ws.members.end());
  std::sort(ws.by_arrival.begin(), ws.by_arrival.end(), [&](std::size_t a, std::size_t b) {
    if (times[a].rsu_arrival != times[b].rsu_arrival)
      return times[a].rsu_arrival < times[b].rsu_arrival;
    return plan[a].rank < plan[b].rank;
  });
  const std::size_t m = scenario.num_servers();
  ws.per_server.resize(m);
  for (auto& q : ws.per_server) q.clear();
  for (std::size_t pos : ws.by_arrival)
    ws.per_server[static_cast<std::size_t>(plan[pos].server)].push_back(pos);

  auto task_rank = [&](std::size_t pos) { return plan[pos].rank; };
  for (const auto& queue : ws.per_server) {
    ws.heap.clear();
    double server_free = kNegInf;
    std::size_t next = 0;
    while (next < queue.size() || !ws.heap.empty()) {
      double t = server_free;
      if (ws.heap.empty() && times[queue[next]].rsu_arrival > t) t = times[queue[next]].rsu_arrival;
      while (next < queue.size() && times[queue[next]].rsu_arrival <= t + kTol)
        heap_push(ws.heap, queue[next++], task_rank);
      const std::size_t pos = heap_pop(ws.heap, task_rank);
      StageTimes& st = times[pos];
      st.proc_start = std::max(t, st.rsu_arrival);
      st.proc_wait = st.proc_start - st.rsu_arrival;
      st.proc_end = st.proc_start + plan[pos].fraction * tasks[pos].remote_proc_time_s;
      server_free = st.proc_end;
    }
  }

  // Downlink: results leave in completion order; under Shared, results
  // completed at the same instant go out together.
  std::sort(ws.by_arrival.begin(), ws.by_arrival.end(), [&](std::size_t a, std::size_t b) {
    if (times[a].proc_end != times[b].proc_end) return times[a].proc_end < times[b].proc_end;
    return plan[a].rank < plan[b].rank;
  });
  double channel_free = kNegInf;
  std::size_t i = 0;
  const std::size_t total = ws.by_arrival.size();
  while (i < total) {
    const double lead = times[ws.by_arrival[i]].proc_end;
    std::size_t j = i + 1;
    double release = lead;
    if (shared) {
      while (j < total && times[ws.by_arrival[j]].proc_end - lead <= kTol) {
        release = std::max(release, times[ws.by_arrival[j]].proc_end);
        ++j;
      }
    }
    const std::size_t k = j - i;
    if (k >= 2) ++stats.downlink_cohorts;
    const double rate = rate_for(scenario, policy, ws, k);
    const double start = std::max(channel_free, release);
    double end = start;
    for (std::size_t q = i; q < j; ++q) {
      const std::size_t pos = ws.by_arrival[q];
      StageTimes& st = times[pos];
      st.downlink_wait = start - st.proc_end;
      st.downlink_tx = plan[pos].fraction * tasks[pos].size_bits / rate;
      st.vehicle_arrival = start + st.downlink_tx;
      st.downlink_cohort = static_cast<std::uint32_t>(k);
      end = std::max(end, st.vehicle_arrival);
    }
    channel_free = end;
    i = j;
  }
  return stats;
}

}  // namespace detail

void summarize(SimOutcome& outcome, std::size_t num_servers) {
  const auto& tl = outcome.timelines;
  const std::size_t n = tl.size();
  std::size_t kept = 0, offloaded = 0;
  double e2e = 0, up = 0, down = 0, remote = 0;
  outcome.drop_count = 0;
  outcome.deadline_misses = 0;
  outcome.server_utilization.assign(num_servers, 0.0);
  double first_ready = std::numeric_limits<double>::infinity();
  double last_end = -std::numeric_limits<double>::infinity();
  for (const auto& t : tl) {
    if (t.dropped) {
      ++outcome.drop_count;
      continue;
    }
    ++kept;
    e2e += t.e2e_latency_s;
    remote += t.fraction;
    if (!t.deadline_met) ++outcome.deadline_misses;
    if (t.offloaded()) {
      ++offloaded;
      up += t.uplink_wait_s;
      down += t.downlink_wait_s;
    }
  }
  // Occupancy counts every task that held a server, including ones dropped
  // after the fact for missing their deadline.
  for (const auto& t : tl) {
    if (!t.server || !(t.proc_time_s > 0.0)) continue;
    outcome.server_utilization[*t.server] += t.proc_time_s;
    first_ready = std::min(first_ready, t.ready_time_s);
    last_end = std::max(last_end, t.proc_end_s);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  outcome.drop_ratio = n ? static_cast<double>(outcome.drop_count) / static_cast<double>(n) : 0.0;
  outcome.total_e2e_s = e2e;
  outcome.mean_e2e_s = kept ? e2e / static_cast<double>(kept) : nan;
  outcome.mean_remote_portion = kept ? remote / static_cast<double>(kept) : nan;
  outcome.mean_local_portion = kept ? 1.0 - outcome.mean_remote_portion : nan;
  outcome.mean_uplink_wait_s = offloaded ? up / static_cast<double>(offloaded) : 0.0;
  outcome.mean_downlink_wait_s = offloaded ? down / static_cast<double>(offloaded) : 0.0;
  const double horizon = last_end - first_ready;
  for (auto& u : outcome.server_utilization) u = horizon > 0 ? u / horizon : 0.0;
}

SimOutcome simulate(const Scenario& scenario, const Schedule& schedule,
                    BandwidthPolicy policy) {
  validate_schedule(scenario, schedule);
  const auto tasks = scenario.tasks();
  const std::size_t n = tasks.size();

  std::vector<detail::TaskPlan> plan(n);
  for (std::size_t r = 0; r < n; ++r)
    plan[scenario.position_of(schedule.order[r])].rank = static_cast<std::uint32_t>(r);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const TaskId id = tasks[pos].id;
    if (const auto& s = schedule.assignment[id]) {
      plan[pos].server = static_cast<std::int32_t>(*s);
      plan[pos].fraction = schedule.fraction[id];
    }
  }

  std::vector<detail::StageTimes> times(n);
  thread_local detail::EngineWorkspace ws;
  const detail::StageStats stats = detail::run_stages(scenario, plan, policy, ws, times);

  SimOutcome out;
  out.timelines.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const Task& task = tasks[pos];
    TaskTimeline& t = out.timelines[task.id];
    t.task_id = task.id;
    t.server = schedule.assignment[task.id];
    t.dropped = !t.server.has_value();
    t.fraction = t.dropped ? 0.0 : schedule.fraction[task.id];
    t.ready_time_s = task.ready_time_s;
    if (t.dropped) continue;

    t.local_time_s = (1.0 - t.fraction) * task.local_proc_time_s;
    if (t.offloaded()) {
      const auto& st = times[pos];
      t.uplink_wait_s = st.uplink_wait;
      t.uplink_tx_s = st.uplink_tx;
      t.rsu_arrival_s = st.rsu_arrival;
      t.proc_wait_s = st.proc_wait;
      t.proc_start_s = st.proc_start;
      t.proc_time_s = st.proc_end - st.proc_start;
      t.proc_end_s = st.proc_end;
      t.downlink_wait_s = st.downlink_wait;
      t.downlink_tx_s = st.downlink_tx;
      t.vehicle_arrival_s = st.vehicle_arrival;
      t.uplink_cohort = st.uplink_cohort;
      t.downlink_cohort = st.downlink_cohort;
      t.comm_latency_s = t.uplink_wait_s + t.downlink_wait_s + t.uplink_tx_s + t.downlink_tx_s;
      t.comp_latency_s = t.proc_wait_s + t.proc_time_s;
      t.weighted_e2e_s = t.fraction * (t.uplink_wait_s + t.downlink_wait_s + t.proc_wait_s) +
                         t.uplink_tx_s + t.downlink_tx_s + t.proc_time_s + t.local_time_s;
    } else {
      t.rsu_arrival_s = t.proc_start_s = t.proc_end_s = t.vehicle_arrival_s = task.ready_time_s;
      t.weighted_e2e_s = t.local_time_s;
    }
    t.e2e_latency_s = t.comm_latency_s + t.comp_latency_s + t.local_time_s;
    t.deadline_met = check_deadline(t, task);
  }
  out.uplink_shared_cohorts = stats.uplink_cohorts;
  out.downlink_shared_cohorts = stats.downlink_cohorts;
  summarize(out, scenario.num_servers());
  return out;
}

void apply_realized_drops(SimOutcome& outcome) {
  for (auto& t : outcome.timelines) {
    if (!t.dropped && !t.deadline_met) {
      t.dropped = true;
      t.deadline_met = true;
    }
  }
  std::size_t servers = outcome.server_utilization.size();
  summarize(outcome, servers);
}

}  // namespace vecsim
