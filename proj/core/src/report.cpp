#include "vecsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "config_json.hpp"
#include "vecsim/error.hpp"
#include "vecsim/parallel.hpp"
#include "vecsim/random.hpp"

namespace vecsim {

using nlohmann::json;

namespace {

// JSON numbers carry the same 9 significant digits as the CSV files.
json rounded(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::strtod(format_number(value).c_str(), nullptr);
}

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

RunSummary summarize_run(std::uint64_t seed, const SimOutcome& outcome, const Scenario& scenario,
                         double lambda) {
  RunSummary s;
  s.seed = seed;
  s.num_tasks = scenario.num_tasks();
  s.drop_count = outcome.drop_count;
  s.drop_ratio = outcome.drop_ratio;
  s.mean_e2e_s = outcome.mean_e2e_s;
  s.mean_remote_portion = outcome.mean_remote_portion;
  s.mean_local_portion = outcome.mean_local_portion;
  s.mean_uplink_wait_s = outcome.mean_uplink_wait_s;
  s.mean_downlink_wait_s = outcome.mean_downlink_wait_s;
  s.uplink_shared_cohorts = outcome.uplink_shared_cohorts;
  s.downlink_shared_cohorts = outcome.downlink_shared_cohorts;
  s.deadline_misses = outcome.deadline_misses;
  s.fitness = fitness(outcome, scenario, lambda);
  return s;
}

json summary_to_json(const RunSummary& s) {
  return {{"seed", s.seed},
          {"num_tasks", s.num_tasks},
          {"drop_count", s.drop_count},
          {"drop_ratio", rounded(s.drop_ratio)},
          {"mean_e2e_s", rounded(s.mean_e2e_s)},
          {"mean_remote_portion", rounded(s.mean_remote_portion)},
          {"mean_local_portion", rounded(s.mean_local_portion)},
          {"mean_uplink_wait_s", rounded(s.mean_uplink_wait_s)},
          {"mean_downlink_wait_s", rounded(s.mean_downlink_wait_s)},
          {"uplink_shared_cohorts", s.uplink_shared_cohorts},
          {"downlink_shared_cohorts", s.downlink_shared_cohorts},
          {"deadline_misses", s.deadline_misses},
          {"fitness", rounded(s.fitness.combined)},
          {"latency_term", rounded(s.fitness.latency_term)},
          {"drop_term", rounded(s.fitness.drop_term)},
          {"pso_iterations", s.pso_iterations}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.num_tasks = j.at("num_tasks").get<std::size_t>();
  s.drop_count = j.at("drop_count").get<std::size_t>();
  s.drop_ratio = number_or_nan(j.at("drop_ratio"));
  s.mean_e2e_s = number_or_nan(j.at("mean_e2e_s"));
  s.mean_remote_portion = number_or_nan(j.at("mean_remote_portion"));
  s.mean_local_portion = number_or_nan(j.at("mean_local_portion"));
  s.mean_uplink_wait_s = number_or_nan(j.at("mean_uplink_wait_s"));
  s.mean_downlink_wait_s = number_or_nan(j.at("mean_downlink_wait_s"));
  s.uplink_shared_cohorts = j.at("uplink_shared_cohorts").get<std::size_t>();
  s.downlink_shared_cohorts = j.at("downlink_shared_cohorts").get<std::size_t>();
  s.deadline_misses = j.at("deadline_misses").get<std::size_t>();
  s.fitness.combined = number_or_nan(j.at("fitness"));
  s.fitness.latency_term = number_or_nan(j.at("latency_term"));
  s.fitness.drop_term = number_or_nan(j.at("drop_term"));
  s.pso_iterations = j.at("pso_iterations").get<std::size_t>();
  return s;
}

void require_open(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw ConfigError("cannot write " + path.string());
}

}  // namespace

std::size_t ExperimentConfig::effective_jobs() const { return jobs == 0 ? default_jobs() : jobs; }

std::string experiment_tag(const ExperimentConfig& config) {
  if (!config.tag.empty()) return config.tag;
  std::string tag = "n" + std::to_string(config.scenario.num_vehicles) + "-";
  tag += to_string(config.scheduler);
  tag += "-";
  tag += to_string(config.mode);
  tag += "-";
  tag += to_string(config.policy);
  return tag;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

RunRecord run_scenario(const Scenario& scenario, const ExperimentConfig& config,
                       std::size_t pso_jobs) {
  RunRecord record;
  Schedule schedule;
  const BaselineOptions base{config.policy, config.drop_rule};
  switch (config.scheduler) {
    case SchedulerKind::FCFS:
      schedule = build_fcfs(scenario, config.mode, base).schedule;
      break;
    case SchedulerKind::SDF:
      schedule = build_sdf(scenario, config.mode, base).schedule;
      break;
    case SchedulerKind::PSO: {
      PsoConfig pso = config.pso;
      pso.seed = derive_seed(config.pso.seed, scenario.rng_seed());
      pso.jobs = std::max<std::size_t>(1, pso_jobs);
      OptimizeResult opt = optimize(scenario, pso, config.policy, config.mode);
      schedule = std::move(opt.schedule);
      record.convergence = std::move(opt.convergence);
      break;
    }
  }
  record.outcome = simulate(scenario, schedule, config.policy);
  if (config.drop_rule == DropRule::Realized) apply_realized_drops(record.outcome);
  record.summary =
      summarize_run(scenario.rng_seed(), record.outcome, scenario, config.pso.lambda_weight);
  if (!record.convergence.empty()) record.summary.pso_iterations = record.convergence.size() - 1;
  return record;
}

ExperimentRun run_experiment(const ExperimentConfig& config) {
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  const std::size_t jobs = config.effective_jobs();
  const std::size_t outer = std::min(jobs, config.seeds.size());
  const std::size_t inner = std::max<std::size_t>(1, jobs / outer);

  ExperimentRun run;
  run.records.resize(config.seeds.size());
  parallel_for(config.seeds.size(), outer, [&](std::size_t i) {
    const Scenario scenario = generate_scenario(config.scenario, config.seeds[i]);
    run.records[i] = run_scenario(scenario, config, inner);
  });
  run.result = aggregate(config, run.records);
  return run;
}

ExperimentResult aggregate(const ExperimentConfig& config, std::span<const RunRecord> records) {
  if (records.empty()) throw ConfigError("nothing to aggregate");
  ExperimentResult r;
  r.scenario_size = config.scenario.num_vehicles;
  r.scheduler = config.scheduler;
  r.mode = config.mode;
  r.policy = config.policy;
  r.runs = records.size();

  double e2e_sum = 0.0;
  std::size_t e2e_runs = 0;
  for (const auto& rec : records) {
    const RunSummary& s = rec.summary;
    r.per_run.push_back(s);
    r.mean_drop_ratio += s.drop_ratio;
    r.mean_drop_count += static_cast<double>(s.drop_count);
    r.mean_local_portion += s.mean_local_portion;
    r.mean_remote_portion += s.mean_remote_portion;
    r.mean_uplink_wait_s += s.mean_uplink_wait_s;
    r.mean_downlink_wait_s += s.mean_downlink_wait_s;
    r.mean_fitness += s.fitness.combined;
    if (std::isfinite(s.mean_e2e_s)) {
      e2e_sum += s.mean_e2e_s;
      ++e2e_runs;
    }
  }
  const double n = static_cast<double>(records.size());
  r.mean_drop_ratio /= n;
  r.mean_drop_count /= n;
  r.mean_local_portion /= n;
  r.mean_remote_portion /= n;
  r.mean_uplink_wait_s /= n;
  r.mean_downlink_wait_s /= n;
  r.mean_fitness /= n;
  r.mean_e2e_s = e2e_runs ? e2e_sum / static_cast<double>(e2e_runs)
                          : std::numeric_limits<double>::quiet_NaN();
  return r;
}

void write_tasks_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "seed,task_id,server,fraction,dropped,deadline_met,ready_time_s,uplink_wait_s,"
         "uplink_tx_s,rsu_arrival_s,proc_wait_s,proc_start_s,proc_time_s,proc_end_s,"
         "downlink_wait_s,downlink_tx_s,vehicle_arrival_s,local_time_s,comm_latency_s,"
         "comp_latency_s,e2e_latency_s,weighted_e2e_s,uplink_cohort,downlink_cohort\n";
  for (const auto& rec : records) {
    for (const auto& t : rec.outcome.timelines) {
      out << rec.summary.seed << ',' << t.task_id << ',';
      if (t.server) out << *t.server;
      out << ',' << format_number(t.fraction) << ',' << (t.dropped ? 1 : 0) << ','
          << (t.deadline_met ? 1 : 0);
      for (double v : {t.ready_time_s, t.uplink_wait_s, t.uplink_tx_s, t.rsu_arrival_s,
                       t.proc_wait_s, t.proc_start_s, t.proc_time_s, t.proc_end_s,
                       t.downlink_wait_s, t.downlink_tx_s, t.vehicle_arrival_s, t.local_time_s,
                       t.comm_latency_s, t.comp_latency_s, t.e2e_latency_s, t.weighted_e2e_s})
        out << ',' << format_number(v);
      out << ',' << t.uplink_cohort << ',' << t.downlink_cohort << '\n';
    }
  }
}

void write_convergence_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "seed,iteration,best_fitness,drop_term,latency_term\n";
  for (const auto& rec : records)
    for (const auto& p : rec.convergence)
      out << rec.summary.seed << ',' << p.iteration << ',' << format_number(p.best_fitness) << ','
          << format_number(p.drop_term) << ',' << format_number(p.latency_term) << '\n';
}

void write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                       const ExperimentRun& run) {
  std::filesystem::create_directories(dir);
  const ExperimentResult& r = run.result;
  json per_run = json::array();
  for (const auto& s : r.per_run) per_run.push_back(summary_to_json(s));
  json summary = {
      {"tag", experiment_tag(config)},
      {"scenario_size", r.scenario_size},
      {"scheduler", std::string(to_string(r.scheduler))},
      {"mode", std::string(to_string(r.mode))},
      {"policy", std::string(to_string(r.policy))},
      {"runs", r.runs},
      {"mean_drop_ratio", rounded(r.mean_drop_ratio)},
      {"mean_drop_count", rounded(r.mean_drop_count)},
      {"mean_e2e_s", rounded(r.mean_e2e_s)},
      {"mean_local_portion", rounded(r.mean_local_portion)},
      {"mean_remote_portion", rounded(r.mean_remote_portion)},
      {"mean_uplink_wait_s", rounded(r.mean_uplink_wait_s)},
      {"mean_downlink_wait_s", rounded(r.mean_downlink_wait_s)},
      {"mean_fitness", rounded(r.mean_fitness)},
      {"per_run", per_run},
      {"config", detail::config_to_json(config)},
  };
  {
    const auto path = dir / "summary.json";
    std::ofstream out(path);
    require_open(out, path);
    out << summary.dump(2) << '\n';
  }
  {
    const auto path = dir / "tasks.csv";
    std::ofstream out(path);
    require_open(out, path);
    write_tasks_csv(out, run.records);
  }
  {
    const auto path = dir / "convergence.csv";
    std::ofstream out(path);
    require_open(out, path);
    write_convergence_csv(out, run.records);
  }
}

ExperimentResult read_summary(const std::filesystem::path& summary_json) {
  std::ifstream in(summary_json);
  if (!in) throw ConfigError("cannot open " + summary_json.string());
  try {
    const json j = json::parse(in);
    ExperimentResult r;
    r.scenario_size = j.at("scenario_size").get<std::size_t>();
    r.scheduler = parse_scheduler_kind(j.at("scheduler").get<std::string>());
    r.mode = parse_offload_mode(j.at("mode").get<std::string>());
    r.policy = parse_bandwidth_policy(j.at("policy").get<std::string>());
    r.runs = j.at("runs").get<std::size_t>();
    r.mean_drop_ratio = number_or_nan(j.at("mean_drop_ratio"));
    r.mean_drop_count = number_or_nan(j.at("mean_drop_count"));
    r.mean_e2e_s = number_or_nan(j.at("mean_e2e_s"));
    r.mean_local_portion = number_or_nan(j.at("mean_local_portion"));
    r.mean_remote_portion = number_or_nan(j.at("mean_remote_portion"));
    r.mean_uplink_wait_s = number_or_nan(j.at("mean_uplink_wait_s"));
    r.mean_downlink_wait_s = number_or_nan(j.at("mean_downlink_wait_s"));
    r.mean_fitness = number_or_nan(j.at("mean_fitness"));
    for (const auto& item : j.at("per_run")) r.per_run.push_back(summary_from_json(item));
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(summary_json.string() + ": " + e.what());
  }
}

PairedDelta paired_delta(const ExperimentResult& a, const ExperimentResult& b) {
  PairedDelta d;
  d.drop_count = b.mean_drop_count - a.mean_drop_count;
  d.drop_ratio = b.mean_drop_ratio - a.mean_drop_ratio;
  d.e2e_s = b.mean_e2e_s - a.mean_e2e_s;
  d.uplink_wait_s = b.mean_uplink_wait_s - a.mean_uplink_wait_s;
  d.downlink_wait_s = b.mean_downlink_wait_s - a.mean_downlink_wait_s;
  d.total_wait_s = d.uplink_wait_s + d.downlink_wait_s;
  return d;
}

std::vector<ComparisonRow> compare_policies(std::span<const ExperimentResult> results) {
  if (results.empty()) return {};
  const std::size_t size = results.front().scenario_size;
  const SchedulerKind scheduler = results.front().scheduler;
  std::map<std::pair<OffloadMode, BandwidthPolicy>, const ExperimentResult*> cells;
  for (const auto& r : results) {
    if (r.scenario_size != size || r.scheduler != scheduler)
      throw UsageError("compared results must share scenario size and scheduler");
    if (!cells.emplace(std::pair{r.mode, r.policy}, &r).second)
      throw UsageError("duplicate result for " + std::string(to_string(r.mode)) + "/" +
                       std::string(to_string(r.policy)));
  }
  auto find = [&](OffloadMode m, BandwidthPolicy p) -> const ExperimentResult* {
    auto it = cells.find({m, p});
    return it == cells.end() ? nullptr : it->second;
  };

  std::vector<ComparisonRow> rows;
  for (OffloadMode m : {OffloadMode::MecOnly, OffloadMode::Partition}) {
    const auto* fixed = find(m, BandwidthPolicy::Fixed);
    const auto* shared = find(m, BandwidthPolicy::Shared);
    if (fixed && shared)
      rows.push_back({size, scheduler, "policy", std::string(to_string(m)),
                      paired_delta(*fixed, *shared)});
  }
  for (BandwidthPolicy p : {BandwidthPolicy::Fixed, BandwidthPolicy::Shared}) {
    const auto* mec = find(OffloadMode::MecOnly, p);
    const auto* part = find(OffloadMode::Partition, p);
    if (mec && part)
      rows.push_back({size, scheduler, "mode", std::string(to_string(p)),
                      paired_delta(*part, *mec)});
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "scenario_size,scheduler,kind,held,delta_drop_count,delta_drop_ratio,delta_e2e_s,"
         "delta_uplink_wait_s,delta_downlink_wait_s,delta_total_wait_s\n";
  for (const auto& r : rows)
    out << r.scenario_size << ',' << to_string(r.scheduler) << ',' << r.kind << ',' << r.held
        << ',' << format_number(r.delta.drop_count) << ',' << format_number(r.delta.drop_ratio)
        << ',' << format_number(r.delta.e2e_s) << ',' << format_number(r.delta.uplink_wait_s)
        << ',' << format_number(r.delta.downlink_wait_s) << ','
        << format_number(r.delta.total_wait_s) << '\n';
}

}  // namespace vecsim
