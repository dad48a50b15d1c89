#include "vecsim/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vecsim/error.hpp"

namespace vecsim {

namespace {

constexpr const char* kMagic = "# vecsim-trace v1";
constexpr const char* kColumns =
    "task_id,vehicle_id,speed_mps,entry_time_s,exit_time_s,generation_time_s,"
    "ready_time_s,size_bits,range_deadline_s,remote_proc_s,local_proc_s";

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("trace line " + std::to_string(line) + ": bad number '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& text, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("trace line " + std::to_string(line) + ": bad integer '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

void write_trace(std::ostream& out, const Scenario& scenario) {
  const RadioParams& r = scenario.radio();
  out << kMagic << '\n';
  out << "# seed=" << scenario.rng_seed() << '\n';
  out << "# num_servers=" << scenario.num_servers() << '\n';
  out << "# max_bandwidth_hz=" << exact(r.max_bandwidth_hz) << '\n';
  out << "# guard_band_fraction=" << exact(r.guard_band_fraction) << '\n';
  out << "# transmit_power_w=" << exact(r.transmit_power_w) << '\n';
  out << "# channel_gain=" << exact(r.channel_gain) << '\n';
  out << "# noise_power_w=" << exact(r.noise_power_w) << '\n';
  out << kColumns << '\n';
  for (const Task& t : scenario.tasks()) {
    const Vehicle& v = scenario.vehicle(t.vehicle_id);
    out << t.id << ',' << t.vehicle_id << ',' << exact(v.speed_mps) << ','
        << exact(v.entry_time_s) << ',' << exact(v.exit_time_s) << ','
        << exact(t.generation_time_s) << ',' << exact(t.ready_time_s) << ','
        << exact(t.size_bits) << ',' << exact(t.range_deadline_s) << ','
        << exact(t.remote_proc_time_s) << ',' << exact(t.local_proc_time_s) << '\n';
  }
}

Scenario read_trace(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line) || line != kMagic) throw ConfigError("not a vecsim trace");
  ++line_no;

  std::map<std::string, std::string> header;
  bool saw_columns = false;
  std::vector<Vehicle> vehicles;
  std::vector<Task> tasks;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos || line.size() < 3) continue;
      header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!saw_columns) {
      if (line != kColumns) throw ConfigError("trace column header mismatch");
      saw_columns = true;
      continue;
    }
    auto f = split(line, ',');
    if (f.size() != 11)
      throw ConfigError("trace line " + std::to_string(line_no) + ": expected 11 fields");
    Vehicle v;
    v.id = static_cast<VehicleId>(parse_uint(f[1], line_no));
    v.speed_mps = parse_double(f[2], line_no);
    v.entry_time_s = parse_double(f[3], line_no);
    v.exit_time_s = parse_double(f[4], line_no);
    Task t;
    t.id = static_cast<TaskId>(parse_uint(f[0], line_no));
    t.vehicle_id = v.id;
    t.generation_time_s = parse_double(f[5], line_no);
    t.ready_time_s = parse_double(f[6], line_no);
    t.size_bits = parse_double(f[7], line_no);
    t.range_deadline_s = parse_double(f[8], line_no);
    t.remote_proc_time_s = parse_double(f[9], line_no);
    t.local_proc_time_s = parse_double(f[10], line_no);
    vehicles.push_back(v);
    tasks.push_back(t);
  }

  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw ConfigError(std::string("trace header misses ") + key);
    return it->second;
  };
  RadioParams radio;
  radio.max_bandwidth_hz = parse_double(need("max_bandwidth_hz"), 0);
  radio.guard_band_fraction = parse_double(need("guard_band_fraction"), 0);
  radio.transmit_power_w = parse_double(need("transmit_power_w"), 0);
  radio.channel_gain = parse_double(need("channel_gain"), 0);
  radio.noise_power_w = parse_double(need("noise_power_w"), 0);
  const auto servers = parse_uint(need("num_servers"), 0);
  const auto seed = parse_uint(need("seed"), 0);
  return Scenario(radio, std::move(vehicles), std::move(tasks), servers, seed);
}

void write_trace_file(const std::filesystem::path& path, const Scenario& scenario) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace " + path.string());
  write_trace(out, scenario);
}

Scenario read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace " + path.string());
  return read_trace(in);
}

}  // namespace vecsim
