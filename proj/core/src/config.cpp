#include "vecsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "config_json.hpp"
#include "vecsim/error.hpp"

namespace vecsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + where + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    target = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + where + key + "'");
  }
}

json resolution_to_json(const Resolution& r) {
  return {{"name", r.name},
          {"width", r.width},
          {"height", r.height},
          {"bits_per_pixel", r.bits_per_pixel},
          {"remote_proc_s", r.remote_proc_s},
          {"local_proc_s", r.local_proc_s}};
}

Resolution resolution_from_json(const json& j) {
  reject_unknown(j, {"name", "width", "height", "bits_per_pixel", "remote_proc_s", "local_proc_s"},
                 "scenario.resolutions[].");
  Resolution r;
  const std::string where = "scenario.resolutions[].";
  read(j, "name", r.name, where);
  read(j, "width", r.width, where);
  read(j, "height", r.height, where);
  read(j, "bits_per_pixel", r.bits_per_pixel, where);
  read(j, "remote_proc_s", r.remote_proc_s, where);
  read(j, "local_proc_s", r.local_proc_s, where);
  if (r.name.empty()) r.name = std::to_string(r.width) + "x" + std::to_string(r.height);
  return r;
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  std::string pointer = "/";
  for (char c : key) pointer += c == '.' ? '/' : c;
  root[json::json_pointer(pointer)] = value;
}

}  // namespace

namespace detail {

json config_to_json(const ExperimentConfig& c) {
  const ScenarioConfig& s = c.scenario;
  json resolutions = json::array();
  for (const auto& r : s.resolutions) resolutions.push_back(resolution_to_json(r));
  json j;
  j["scenario"] = {
      {"num_vehicles", s.num_vehicles},
      {"arrival_rate_per_s", s.arrival_rate_per_s ? json(*s.arrival_rate_per_s) : json(nullptr)},
      {"traffic_window_s", s.traffic_window_s},
      {"coverage_length_m", s.coverage_length_m},
      {"speed_min_mps", s.speed_min_mps},
      {"speed_max_mps", s.speed_max_mps},
      {"pre_range_window_s", s.pre_range_window_s},
      {"time_step_s", s.time_step_s},
      {"num_servers", s.num_servers},
      {"resolutions", resolutions},
  };
  j["radio"] = {
      {"max_bandwidth_hz", s.radio.max_bandwidth_hz},
      {"guard_band_fraction", s.radio.guard_band_fraction},
      {"transmit_power_w", s.radio.transmit_power_w},
      {"channel_gain", s.radio.channel_gain},
      {"noise_power_dbm", watts_to_dbm(s.radio.noise_power_w)},
  };
  j["scheduler"] = std::string(to_string(c.scheduler));
  j["mode"] = std::string(to_string(c.mode));
  j["policy"] = std::string(to_string(c.policy));
  j["drop_rule"] = std::string(to_string(c.drop_rule));
  j["pso"] = {
      {"swarm_size", c.pso.swarm_size},
      {"max_iterations", c.pso.max_iterations},
      {"cognitive_coef", c.pso.cognitive_coef},
      {"social_coef", c.pso.social_coef},
      {"inertia_start", c.pso.inertia_start},
      {"inertia_end", c.pso.inertia_end},
      {"stagnation_patience", c.pso.stagnation_patience},
      {"lambda", c.pso.lambda_weight},
      {"velocity_clamp", c.pso.velocity_clamp},
      {"seed_with_baselines", c.pso.seed_with_baselines},
      {"seed", c.pso.seed},
  };
  j["seeds"] = c.seeds;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  j["sweep_sizes"] = c.sweep_sizes;
  j["tag"] = c.tag;
  return j;
}

ExperimentConfig config_from_json(const json& root) {
  ExperimentConfig c;
  reject_unknown(root,
                 {"scenario", "radio", "scheduler", "mode", "policy", "drop_rule", "pso", "seeds",
                  "jobs", "output_dir", "sweep_sizes", "tag"},
                 "");
  if (auto it = root.find("scenario"); it != root.end()) {
    const json& j = *it;
    const std::string w = "scenario.";
    reject_unknown(j,
                   {"num_vehicles", "arrival_rate_per_s", "traffic_window_s", "coverage_length_m",
                    "speed_min_mps", "speed_max_mps", "pre_range_window_s", "time_step_s",
                    "num_servers", "resolutions"},
                   w);
    ScenarioConfig& s = c.scenario;
    read(j, "num_vehicles", s.num_vehicles, w);
    if (auto r = j.find("arrival_rate_per_s"); r != j.end() && !r->is_null()) {
      double rate = 0;
      read(j, "arrival_rate_per_s", rate, w);
      s.arrival_rate_per_s = rate;
    }
    read(j, "traffic_window_s", s.traffic_window_s, w);
    read(j, "coverage_length_m", s.coverage_length_m, w);
    read(j, "speed_min_mps", s.speed_min_mps, w);
    read(j, "speed_max_mps", s.speed_max_mps, w);
    read(j, "pre_range_window_s", s.pre_range_window_s, w);
    read(j, "time_step_s", s.time_step_s, w);
    read(j, "num_servers", s.num_servers, w);
    if (auto r = j.find("resolutions"); r != j.end()) {
      if (!r->is_array()) throw ConfigError("scenario.resolutions must be an array");
      s.resolutions.clear();
      for (const auto& item : *r) s.resolutions.push_back(resolution_from_json(item));
    }
  }
  if (auto it = root.find("radio"); it != root.end()) {
    const json& j = *it;
    const std::string w = "radio.";
    reject_unknown(j,
                   {"max_bandwidth_hz", "guard_band_fraction", "transmit_power_w", "channel_gain",
                    "noise_power_dbm", "noise_power_w"},
                   w);
    RadioParams& r = c.scenario.radio;
    read(j, "max_bandwidth_hz", r.max_bandwidth_hz, w);
    read(j, "guard_band_fraction", r.guard_band_fraction, w);
    read(j, "transmit_power_w", r.transmit_power_w, w);
    read(j, "channel_gain", r.channel_gain, w);
    if (j.contains("noise_power_dbm") && j.contains("noise_power_w"))
      throw ConfigError("give either radio.noise_power_dbm or radio.noise_power_w");
    if (j.contains("noise_power_dbm")) {
      double dbm = 0;
      read(j, "noise_power_dbm", dbm, w);
      r.noise_power_w = dbm_to_watts(dbm);
    }
    read(j, "noise_power_w", r.noise_power_w, w);
  }
  std::string text;
  if (root.contains("scheduler")) {
    read(root, "scheduler", text, "");
    c.scheduler = parse_scheduler_kind(text);
  }
  if (root.contains("mode")) {
    read(root, "mode", text, "");
    c.mode = parse_offload_mode(text);
  }
  if (root.contains("policy")) {
    read(root, "policy", text, "");
    c.policy = parse_bandwidth_policy(text);
  }
  if (root.contains("drop_rule")) {
    read(root, "drop_rule", text, "");
    c.drop_rule = parse_drop_rule(text);
  }
  if (auto it = root.find("pso"); it != root.end()) {
    const json& j = *it;
    const std::string w = "pso.";
    reject_unknown(j,
                   {"swarm_size", "max_iterations", "cognitive_coef", "social_coef",
                    "inertia_start", "inertia_end", "stagnation_patience", "lambda",
                    "velocity_clamp", "seed_with_baselines", "seed"},
                   w);
    read(j, "swarm_size", c.pso.swarm_size, w);
    read(j, "max_iterations", c.pso.max_iterations, w);
    read(j, "cognitive_coef", c.pso.cognitive_coef, w);
    read(j, "social_coef", c.pso.social_coef, w);
    read(j, "inertia_start", c.pso.inertia_start, w);
    read(j, "inertia_end", c.pso.inertia_end, w);
    read(j, "stagnation_patience", c.pso.stagnation_patience, w);
    read(j, "lambda", c.pso.lambda_weight, w);
    read(j, "velocity_clamp", c.pso.velocity_clamp, w);
    read(j, "seed_with_baselines", c.pso.seed_with_baselines, w);
    read(j, "seed", c.pso.seed, w);
  }
  if (auto it = root.find("seeds"); it != root.end() && !it->is_null()) {
    if (it->is_number_unsigned() || it->is_number_integer()) {
      const auto count = it->get<std::int64_t>();
      if (count <= 0) throw ConfigError("seeds count must be positive");
      c.seeds.clear();
      for (std::int64_t s = 1; s <= count; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      read(root, "seeds", c.seeds, "");
      if (c.seeds.empty()) throw ConfigError("seeds list must not be empty");
    }
  }
  read(root, "jobs", c.jobs, "");
  read(root, "output_dir", c.output_dir, "");
  read(root, "sweep_sizes", c.sweep_sizes, "");
  read(root, "tag", c.tag, "");

  c.scenario.validate();
  c.pso.validate();
  for (auto n : c.sweep_sizes)
    if (n == 0) throw ConfigError("sweep sizes must be positive");
  return c;
}

}  // namespace detail

ExperimentConfig parse_config(std::string_view json_text, std::span<const std::string> overrides) {
  json root;
  try {
    root = json_text.empty() ? json::object() : json::parse(json_text);
    for (const auto& o : overrides) apply_override(root, o);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return detail::config_from_json(root);
}

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string dump_config(const ExperimentConfig& config) {
  return detail::config_to_json(config).dump(2);
}

}  // namespace vecsim
