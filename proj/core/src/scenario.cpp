#include "vecsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vecsim/error.hpp"
#include "vecsim/random.hpp"

namespace vecsim {

namespace {

double floor_to_step(double t, double step) {
  if (step <= 0.0) return t;
  return std::floor(t / step) * step;
}

}  // namespace

void RadioParams::validate() const {
  if (!(max_bandwidth_hz > 0.0)) throw ConfigError("max_bandwidth_hz must be positive");
  if (!(guard_band_fraction >= 0.0 && guard_band_fraction < 1.0))
    throw ConfigError("guard_band_fraction must lie in [0, 1)");
  if (!(transmit_power_w > 0.0)) throw ConfigError("transmit_power_w must be positive");
  if (!(channel_gain > 0.0)) throw ConfigError("channel_gain must be positive");
  if (!(noise_power_w > 0.0)) throw ConfigError("noise_power_w must be positive");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::vector<Resolution> default_resolutions() {
  return {
      {"640x480", 640, 480, 24, 0.5, 1.5},
      {"1280x720", 1280, 720, 24, 1.0, 3.0},
      {"1920x1080", 1920, 1080, 24, 2.0, 6.0},
  };
}

double ScenarioConfig::effective_arrival_rate() const {
  if (arrival_rate_per_s) return *arrival_rate_per_s;
  return static_cast<double>(num_vehicles) / traffic_window_s;
}

void ScenarioConfig::validate() const {
  if (num_vehicles == 0) throw ConfigError("num_vehicles must be positive");
  if (arrival_rate_per_s && !(*arrival_rate_per_s > 0.0))
    throw ConfigError("arrival_rate_per_s must be positive");
  if (!arrival_rate_per_s && !(traffic_window_s > 0.0))
    throw ConfigError("traffic_window_s must be positive");
  if (!(coverage_length_m > 0.0)) throw ConfigError("coverage_length_m must be positive");
  if (!(speed_min_mps > 0.0) || !(speed_max_mps >= speed_min_mps))
    throw ConfigError("speed range must satisfy 0 < speed_min_mps <= speed_max_mps");
  if (!(pre_range_window_s >= 0.0)) throw ConfigError("pre_range_window_s must be >= 0");
  if (!(time_step_s >= 0.0)) throw ConfigError("time_step_s must be >= 0");
  if (num_servers == 0) throw ConfigError("num_servers must be positive");
  if (resolutions.empty()) throw ConfigError("resolution table is empty");
  for (const auto& r : resolutions) {
    if (r.width <= 0 || r.height <= 0 || r.bits_per_pixel <= 0)
      throw ConfigError("resolution '" + r.name + "' has a non-positive dimension");
    if (!(r.remote_proc_s > 0.0))
      throw ConfigError("resolution '" + r.name + "' needs remote_proc_s > 0");
    if (!(r.local_proc_s >= r.remote_proc_s))
      throw ConfigError("resolution '" + r.name + "' must not be faster locally than remotely");
  }
  radio.validate();
}

double Vehicle::distance_to_rsu(double t) const { return std::abs(position_at(t)); }

Scenario::Scenario(RadioParams radio, std::vector<Vehicle> vehicles,
                   std::vector<Task> tasks, std::size_t num_servers,
                   std::uint64_t rng_seed)
    : radio_(radio),
      vehicles_(std::move(vehicles)),
      tasks_(std::move(tasks)),
      num_servers_(num_servers),
      rng_seed_(rng_seed) {
  radio_.validate();
  if (num_servers_ == 0) throw ConfigError("scenario needs at least one server");
  if (tasks_.empty()) throw ConfigError("scenario has no tasks");

  std::vector<bool> seen_vehicle(vehicles_.size(), false);
  for (const auto& v : vehicles_) {
    if (v.id >= vehicles_.size() || seen_vehicle[v.id])
      throw IntegrityError("vehicle ids must be dense and unique");
    seen_vehicle[v.id] = true;
    if (!(v.speed_mps > 0.0) || !(v.exit_time_s > v.entry_time_s))
      throw IntegrityError("vehicle " + std::to_string(v.id) + " has an empty dwell interval");
  }
  std::sort(vehicles_.begin(), vehicles_.end(),
            [](const Vehicle& a, const Vehicle& b) { return a.id < b.id; });

  std::stable_sort(tasks_.begin(), tasks_.end(), [](const Task& a, const Task& b) {
    if (a.ready_time_s != b.ready_time_s) return a.ready_time_s < b.ready_time_s;
    return a.id < b.id;
  });

  position_by_id_.assign(tasks_.size(), tasks_.size());
  for (std::size_t pos = 0; pos < tasks_.size(); ++pos) {
    const Task& t = tasks_[pos];
    if (t.id >= tasks_.size() || position_by_id_[t.id] != tasks_.size())
      throw IntegrityError("task ids must be dense and unique");
    position_by_id_[t.id] = pos;
    if (t.vehicle_id >= vehicles_.size())
      throw IntegrityError("task " + std::to_string(t.id) + " references unknown vehicle");
    if (!(t.size_bits > 0.0)) throw IntegrityError("task sizes must be positive");
    if (!(t.ready_time_s >= t.generation_time_s))
      throw IntegrityError("task ready before it was generated");
    if (!(t.range_deadline_s > 0.0))
      throw IntegrityError("task " + std::to_string(t.id) + " has no coverage time left");
    if (!(t.remote_proc_time_s > 0.0) || !(t.local_proc_time_s >= t.remote_proc_time_s))
      throw IntegrityError("task processing times violate remote <= local");
    total_range_time_s_ += t.range_deadline_s;
  }
}

const Task& Scenario::task(TaskId id) const { return tasks_[position_of(id)]; }

const Vehicle& Scenario::vehicle(VehicleId id) const {
  if (id >= vehicles_.size()) throw IntegrityError("unknown vehicle " + std::to_string(id));
  return vehicles_[id];
}

std::size_t Scenario::position_of(TaskId id) const {
  if (id >= position_by_id_.size()) throw IntegrityError("unknown task " + std::to_string(id));
  return position_by_id_[id];
}

double Scenario::remaining_range_time(const Task& task, double at) const {
  const Vehicle& v = vehicle(task.vehicle_id);
  if (at < task.ready_time_s)
    throw DomainError("remaining_range_time queried before the task is ready");
  return std::max(0.0, v.exit_time_s - at);
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const double rate = config.effective_arrival_rate();
  const double step = config.time_step_s;
  Rng rng(seed);

  std::vector<Vehicle> vehicles;
  std::vector<Task> tasks;
  vehicles.reserve(config.num_vehicles);
  tasks.reserve(config.num_vehicles);

  // Continuous Poisson process; only the reported instants are quantized so
  // the counting statistics per step are preserved.
  double clock = 0.0;
  for (std::size_t i = 0; i < config.num_vehicles; ++i) {
    clock += rng.exponential(rate);
    Vehicle v;
    v.id = static_cast<VehicleId>(i);
    v.speed_mps = rng.uniform(config.speed_min_mps, config.speed_max_mps);
    v.entry_time_s = floor_to_step(clock, step);
    v.exit_time_s = v.entry_time_s + config.coverage_length_m / v.speed_mps;

    const double earliest = v.entry_time_s - config.pre_range_window_s;
    const double generated = floor_to_step(rng.uniform(earliest, v.exit_time_s), step);
    const Resolution& res = config.resolutions[rng.index(config.resolutions.size())];

    Task t;
    t.id = static_cast<TaskId>(i);
    t.vehicle_id = v.id;
    t.size_bits = res.size_bits();
    t.generation_time_s = generated;
    t.ready_time_s = std::max(generated, v.entry_time_s);
    t.range_deadline_s = v.exit_time_s - t.ready_time_s;
    t.remote_proc_time_s = res.remote_proc_s;
    t.local_proc_time_s = res.local_proc_s;

    vehicles.push_back(v);
    tasks.push_back(t);
  }
  return Scenario(config.radio, std::move(vehicles), std::move(tasks), config.num_servers, seed);
}

}  // namespace vecsim
