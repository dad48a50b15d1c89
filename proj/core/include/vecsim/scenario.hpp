#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vecsim {

using TaskId = std::uint32_t;
using VehicleId = std::uint32_t;

/// Radio constants shared by uplink and downlink.
struct RadioParams {
  double max_bandwidth_hz = 20e6;
  double guard_band_fraction = 0.046;
  double transmit_power_w = 0.2;
  double channel_gain = 1e-8;
  double noise_power_w = 1e-13;

  /// Bandwidth left after the guard band is removed.
  double effective_bandwidth_hz() const {
    return max_bandwidth_hz * (1.0 - guard_band_fraction);
  }
  double snr() const { return transmit_power_w * channel_gain / noise_power_w; }

  /// Throws ConfigError when any field leaves its physical range.
  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// One entry of the image-resolution table. The payload is the raw frame;
/// processing times are per full task.
struct Resolution {
  std::string name;
  int width = 0;
  int height = 0;
  int bits_per_pixel = 24;
  double remote_proc_s = 0.0;
  double local_proc_s = 0.0;

  double size_bits() const {
    return static_cast<double>(width) * height * bits_per_pixel;
  }
};

std::vector<Resolution> default_resolutions();

struct ScenarioConfig {
  std::size_t num_vehicles = 100;
  // Vehicles entering coverage per second. When unset the rate is derived
  // from the traffic window so that denser scenarios carry more vehicles
  // through the same stretch of time.
  std::optional<double> arrival_rate_per_s;
  double traffic_window_s = 60.0;
  double coverage_length_m = 600.0;
  double speed_min_mps = 20.0;
  double speed_max_mps = 33.0;
  // Tasks may be created up to this long before the vehicle enters coverage.
  double pre_range_window_s = 30.0;
  // Entry and generation instants are floored to this grid, like a
  // fixed-step traffic simulator; 0 keeps continuous time.
  double time_step_s = 1.0;
  std::size_t num_servers = 2;
  RadioParams radio;
  std::vector<Resolution> resolutions = default_resolutions();

  double effective_arrival_rate() const;
  void validate() const;
};

/// A vehicle driving a straight highway through the coverage chord
/// [-L/2, L/2] centred on the RSU at constant speed.
struct Vehicle {
  VehicleId id = 0;
  double speed_mps = 0.0;
  double entry_time_s = 0.0;
  double exit_time_s = 0.0;

  double dwell_time_s() const { return exit_time_s - entry_time_s; }
  double coverage_length_m() const { return speed_mps * dwell_time_s(); }
  /// Longitudinal coordinate relative to the RSU at time t.
  double position_at(double t) const {
    return -0.5 * coverage_length_m() + speed_mps * (t - entry_time_s);
  }
  double distance_to_rsu(double t) const;
};

struct Task {
  TaskId id = 0;
  VehicleId vehicle_id = 0;
  double size_bits = 0.0;
  double generation_time_s = 0.0;
  double ready_time_s = 0.0;
  double range_deadline_s = 0.0;
  double remote_proc_time_s = 0.0;
  double local_proc_time_s = 0.0;

  double exit_time_s() const { return ready_time_s + range_deadline_s; }
};

/// Immutable, validated instance. Tasks are stored sorted by ready time
/// (ties by id); task ids and vehicle ids are dense from zero.
class Scenario {
 public:
  Scenario(RadioParams radio, std::vector<Vehicle> vehicles,
           std::vector<Task> tasks, std::size_t num_servers,
           std::uint64_t rng_seed);

  const RadioParams& radio() const { return radio_; }
  std::span<const Vehicle> vehicles() const { return vehicles_; }
  std::span<const Task> tasks() const { return tasks_; }
  std::size_t num_tasks() const { return tasks_.size(); }
  std::size_t num_servers() const { return num_servers_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  const Task& task(TaskId id) const;
  const Vehicle& vehicle(VehicleId id) const;
  /// Position of a task in tasks(); the engine works on positions.
  std::size_t position_of(TaskId id) const;

  /// Coverage time left for the task's vehicle at `at`, floored at zero.
  double remaining_range_time(const Task& task, double at) const;

  /// Sum of every task's range deadline; normalizes the latency objective.
  double total_range_time_s() const { return total_range_time_s_; }

 private:
  RadioParams radio_;
  std::vector<Vehicle> vehicles_;
  std::vector<Task> tasks_;
  std::vector<std::size_t> position_by_id_;
  std::size_t num_servers_;
  std::uint64_t rng_seed_;
  double total_range_time_s_ = 0.0;
};

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace vecsim
