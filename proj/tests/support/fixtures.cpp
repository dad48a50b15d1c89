#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vecsim/channel.hpp"

namespace vecsim::testing {

Scenario make_scenario(const std::vector<TaskSpec>& specs, std::size_t servers,
                       RadioParams radio) {
  std::vector<Vehicle> vehicles;
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const TaskSpec& s = specs[i];
    Vehicle v;
    v.id = static_cast<VehicleId>(i);
    v.speed_mps = 25.0;
    v.entry_time_s = s.ready_s;
    v.exit_time_s = s.ready_s + s.deadline_s;
    Task t;
    t.id = static_cast<TaskId>(i);
    t.vehicle_id = v.id;
    t.size_bits = s.size_bits;
    t.generation_time_s = s.ready_s;
    t.ready_time_s = s.ready_s;
    t.range_deadline_s = s.deadline_s;
    t.remote_proc_time_s = s.remote_s;
    t.local_proc_time_s = s.local_s;
    vehicles.push_back(v);
    tasks.push_back(t);
  }
  return Scenario(radio, std::move(vehicles), std::move(tasks), servers, 0);
}

Scenario three_task_scenario() {
  return make_scenario({{0.0, kBits1080p, 2.0, 6.0, 20.0},
                        {0.0, kBits720p, 1.0, 3.0, 15.0},
                        {0.1, kBits480p, 0.5, 1.5, 10.0}});
}

Schedule make_schedule(OffloadMode mode, std::vector<TaskId> order,
                       std::vector<std::optional<std::size_t>> servers,
                       std::vector<double> fractions) {
  Schedule s;
  s.mode = mode;
  s.order = std::move(order);
  s.assignment = std::move(servers);
  s.fraction = std::move(fractions);
  return s;
}

namespace {

constexpr double kTol = kSimultaneityTolerance;

struct Job {
  std::size_t id;
  double release;
  std::size_t rank;
};

// Picks the lowest-rank job released by `t` (within tolerance).
std::size_t pick(const std::vector<Job>& pending, double t) {
  std::size_t best = pending.size();
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (pending[i].release > t + kTol) continue;
    if (best == pending.size() || pending[i].rank < pending[best].rank) best = i;
  }
  return best;
}

double earliest(const std::vector<Job>& pending) {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& j : pending) t = std::min(t, j.release);
  return t;
}

}  // namespace

SimOutcome reference_simulate(const Scenario& scenario, const Schedule& schedule,
                              BandwidthPolicy policy) {
  const std::size_t n = scenario.num_tasks();
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[schedule.order[r]] = r;
  auto offloaded = [&](TaskId id) { return schedule.assignment[id] && schedule.fraction[id] > 0; };
  auto rate = [&](std::size_t k) { return quote(policy, k, scenario.radio()).rate_bps; };
  const bool shared = policy == BandwidthPolicy::Shared;

  SimOutcome out;
  out.timelines.resize(n);

  // Uplink: group by ready instant (shared), a group's priority is its best
  // member's rank.
  std::vector<std::vector<std::size_t>> groups;
  for (const Task& t : scenario.tasks()) {
    if (!offloaded(t.id)) continue;
    if (shared && !groups.empty() &&
        t.ready_time_s - scenario.task(static_cast<TaskId>(groups.back().front())).ready_time_s <= kTol)
      groups.back().push_back(t.id);
    else
      groups.push_back({t.id});
  }
  std::vector<Job> pending;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double release = 0;
    std::size_t best = n;
    for (auto id : groups[g]) {
      release = std::max(release, scenario.task(static_cast<TaskId>(id)).ready_time_s);
      best = std::min(best, rank[id]);
    }
    pending.push_back({g, release, best});
  }
  double free_at = -std::numeric_limits<double>::infinity();
  while (!pending.empty()) {
    double t = free_at;
    std::size_t i = pick(pending, t);
    if (i == pending.size()) {
      t = earliest(pending);
      i = pick(pending, t);
    }
    const Job job = pending[i];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
    const auto& members = groups[job.id];
    const double start = std::max(t, job.release);
    double end = start;
    for (auto id : members) {
      const Task& task = scenario.task(static_cast<TaskId>(id));
      TaskTimeline& tl = out.timelines[id];
      tl.uplink_wait_s = start - task.ready_time_s;
      tl.uplink_tx_s = schedule.fraction[id] * task.size_bits / rate(members.size());
      tl.rsu_arrival_s = start + tl.uplink_tx_s;
      tl.uplink_cohort = static_cast<std::uint32_t>(members.size());
      end = std::max(end, tl.rsu_arrival_s);
    }
    free_at = end;
  }

  // Servers.
  for (std::size_t s = 0; s < scenario.num_servers(); ++s) {
    pending.clear();
    for (TaskId id = 0; id < n; ++id)
      if (offloaded(id) && *schedule.assignment[id] == s)
        pending.push_back({id, out.timelines[id].rsu_arrival_s, rank[id]});
    // Equal arrivals are served by rank, like the engine's tie break.
    free_at = -std::numeric_limits<double>::infinity();
    while (!pending.empty()) {
      double t = free_at;
      std::size_t i = pick(pending, t);
      if (i == pending.size()) {
        t = earliest(pending);
        i = pick(pending, t);
      }
      const Job job = pending[i];
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
      TaskTimeline& tl = out.timelines[job.id];
      const Task& task = scenario.task(static_cast<TaskId>(job.id));
      tl.proc_start_s = std::max(t, job.release);
      tl.proc_wait_s = tl.proc_start_s - tl.rsu_arrival_s;
      tl.proc_time_s = schedule.fraction[job.id] * task.remote_proc_time_s;
      tl.proc_end_s = tl.proc_start_s + tl.proc_time_s;
      free_at = tl.proc_end_s;
    }
  }

  // Downlink in completion order.
  std::vector<std::size_t> done;
  for (TaskId id = 0; id < n; ++id)
    if (offloaded(id)) done.push_back(id);
  std::sort(done.begin(), done.end(), [&](std::size_t a, std::size_t b) {
    const double ea = out.timelines[a].proc_end_s, eb = out.timelines[b].proc_end_s;
    return ea != eb ? ea < eb : rank[a] < rank[b];
  });
  free_at = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < done.size();) {
    const double lead = out.timelines[done[i]].proc_end_s;
    std::size_t j = i + 1;
    while (shared && j < done.size() && out.timelines[done[j]].proc_end_s - lead <= kTol) ++j;
    double release = lead;
    for (std::size_t q = i; q < j; ++q) release = std::max(release, out.timelines[done[q]].proc_end_s);
    const double start = std::max(free_at, release);
    double end = start;
    for (std::size_t q = i; q < j; ++q) {
      TaskTimeline& tl = out.timelines[done[q]];
      const Task& task = scenario.task(static_cast<TaskId>(done[q]));
      tl.downlink_wait_s = start - tl.proc_end_s;
      tl.downlink_tx_s = schedule.fraction[done[q]] * task.size_bits / rate(j - i);
      tl.vehicle_arrival_s = start + tl.downlink_tx_s;
      tl.downlink_cohort = static_cast<std::uint32_t>(j - i);
      end = std::max(end, tl.vehicle_arrival_s);
    }
    free_at = end;
    i = j;
  }

  for (TaskId id = 0; id < n; ++id) {
    TaskTimeline& tl = out.timelines[id];
    const Task& task = scenario.task(id);
    tl.task_id = id;
    tl.server = schedule.assignment[id];
    tl.dropped = !tl.server;
    tl.fraction = tl.dropped ? 0.0 : schedule.fraction[id];
    tl.ready_time_s = task.ready_time_s;
    if (tl.dropped) continue;
    tl.local_time_s = (1 - tl.fraction) * task.local_proc_time_s;
    tl.comm_latency_s = tl.uplink_wait_s + tl.uplink_tx_s + tl.downlink_wait_s + tl.downlink_tx_s;
    tl.comp_latency_s = tl.proc_wait_s + tl.proc_time_s;
    tl.e2e_latency_s = tl.comm_latency_s + tl.comp_latency_s + tl.local_time_s;
  }
  return out;
}

}  // namespace vecsim::testing
