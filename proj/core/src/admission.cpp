#include "vecsim/admission.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "vecsim/error.hpp"

namespace vecsim {

std::string_view to_string(DropRule rule) {
  return rule == DropRule::Predictive ? "predictive" : "realized";
}

DropRule parse_drop_rule(std::string_view text) {
  if (text == "predictive") return DropRule::Predictive;
  if (text == "realized") return DropRule::Realized;
  throw ConfigError("unknown drop rule '" + std::string(text) + "'");
}

namespace {

constexpr int kMaxShrinkSteps = 8;

class Admitter {
 public:
  Admitter(const Scenario& scenario, const AdmissionRequest& req)
      : scenario_(scenario), req_(req), tasks_(scenario.tasks()),
        plan_(tasks_.size()), times_(tasks_.size()) {
    const std::size_t n = tasks_.size();
    if (req.order.size() != n) throw IntegrityError("admission order has the wrong length");
    if (!req.servers.empty() && req.servers.size() != n)
      throw IntegrityError("server list has the wrong length");
    if (!req.desired_fraction.empty() && req.desired_fraction.size() != n)
      throw IntegrityError("fraction list has the wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t r = 0; r < n; ++r) {
      const TaskId id = req.order[r];
      const std::size_t pos = scenario.position_of(id);
      if (seen[pos]) throw IntegrityError("admission order repeats a task");
      seen[pos] = true;
      plan_[pos].rank = static_cast<std::uint32_t>(r);
    }
    for (std::size_t s : req.servers)
      if (s >= scenario.num_servers()) throw IntegrityError("server index out of range");
  }

  AdmissionResult run() {
    const std::size_t n = tasks_.size();
    AdmissionResult out;
    out.schedule.mode = req_.mode;
    out.schedule.order.assign(req_.order.begin(), req_.order.end());
    out.schedule.assignment.assign(n, std::nullopt);
    out.schedule.fraction.assign(n, 0.0);
    out.considered_server.assign(n, 0);

    for (std::size_t c = 0; c < n; ++c) {
      const Task& task = tasks_[c];
      const std::size_t server = choose_server(c);
      out.considered_server[task.id] = server;
      if (req_.mode == OffloadMode::MecOnly) {
        if (admit_whole(c, server)) {
          out.schedule.assignment[task.id] = server;
          out.schedule.fraction[task.id] = 1.0;
        }
      } else {
        const double desired =
            req_.desired_fraction.empty() ? 1.0 : std::clamp(req_.desired_fraction[task.id], 0.0, 1.0);
        out.schedule.assignment[task.id] = server;
        out.schedule.fraction[task.id] = admit_partial(c, server, desired);
      }
    }
    return out;
  }

 private:
  void place(std::size_t c, std::size_t server, double fraction) {
    plan_[c].server = static_cast<std::int32_t>(server);
    plan_[c].fraction = fraction;
  }
  void withdraw(std::size_t c) {
    plan_[c].server = -1;
    plan_[c].fraction = 0.0;
  }
  void run_engine() { detail::run_stages(scenario_, plan_, req_.policy, ws_, times_); }

  // Every offloaded task considered so far still meets its deadline.
  bool all_feasible(std::size_t upto) const {
    for (std::size_t pos = 0; pos <= upto; ++pos) {
      if (!plan_[pos].offloaded()) continue;
      if (times_[pos].vehicle_arrival > tasks_[pos].exit_time_s() + kDeadlineTolerance)
        return false;
    }
    return true;
  }

  std::size_t choose_server(std::size_t c) {
    if (!req_.servers.empty()) return req_.servers[tasks_[c].id];
    std::size_t best = 0;
    double best_start = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < scenario_.num_servers(); ++s) {
      place(c, s, 1.0);
      run_engine();
      if (times_[c].proc_start < best_start) {
        best_start = times_[c].proc_start;
        best = s;
      }
    }
    withdraw(c);
    return best;
  }

  bool admit_whole(std::size_t c, std::size_t server) {
    place(c, server, 1.0);
    if (req_.drop_rule == DropRule::Realized) return true;
    run_engine();
    if (all_feasible(c)) return true;
    withdraw(c);
    return false;
  }

  double admit_partial(std::size_t c, std::size_t server, double desired) {
    const Task& task = tasks_[c];
    place(c, server, 1.0);
    run_engine();
    const auto& full = times_[c];
    const double comm = full.uplink_wait + full.downlink_wait + full.uplink_tx + full.downlink_tx;
    const double comp = full.proc_wait + task.remote_proc_time_s;
    double p = std::min(desired, feasible_fraction(task, comm, comp));

    for (int step = 0; p > 0.0 && step <= kMaxShrinkSteps; ++step) {
      place(c, server, p);
      run_engine();
      if (all_feasible(c)) return p;
      // The candidate's own waits barely depend on its share, so solve the
      // deadline for p directly once before falling back to halving.
      const auto& st = times_[c];
      const double waits = st.uplink_wait + st.proc_wait + st.downlink_wait;
      const double per_unit = (st.uplink_tx + st.downlink_tx + (st.proc_end - st.proc_start)) / p;
      const double solved = (task.range_deadline_s - waits) / per_unit * (1.0 - 1e-9);
      p = (step == 0 && solved > 0.0 && solved < p) ? solved : 0.5 * p;
    }
    // A purely local task occupies nothing remote; the plan reverts to the
    // previous feasible state.
    place(c, server, 0.0);
    return 0.0;
  }

  const Scenario& scenario_;
  const AdmissionRequest& req_;
  std::span<const Task> tasks_;
  std::vector<detail::TaskPlan> plan_;
  std::vector<detail::StageTimes> times_;
  detail::EngineWorkspace ws_;
};

}  // namespace

AdmissionResult admit(const Scenario& scenario, const AdmissionRequest& request) {
  return Admitter(scenario, request).run();
}

}  // namespace vecsim
