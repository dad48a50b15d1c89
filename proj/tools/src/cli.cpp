#include "vecsim_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "vecsim/config.hpp"
#include "vecsim/error.hpp"
#include "vecsim/pso.hpp"
#include "vecsim/report.hpp"
#include "vecsim/trace.hpp"

namespace vecsim::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output_dir;
  std::optional<std::size_t> jobs;
  std::string seeds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> vehicles;
  std::optional<std::size_t> servers;
  std::string scheduler, mode, policy, drop_rule;
  std::optional<std::size_t> iterations, swarm;
  std::optional<std::uint64_t> pso_seed;
  std::string tag;
  std::string trace;
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd.add_option("--set", o.sets, "Override a config key, e.g. pso.lambda=0.5")
      ->type_name("KEY=VALUE");
  cmd.add_option("-o,--output-dir", o.output_dir, "Output directory");
  cmd.add_option("-j,--jobs", o.jobs, "Worker threads (0: all cores)");
  cmd.add_option("--seeds", o.seeds, "Seed count N (runs 1..N) or comma list");
  cmd.add_option("--seed", o.seed, "Single scenario seed");
  cmd.add_option("-n,--vehicles", o.vehicles, "Vehicles (one task each)");
  cmd.add_option("--servers", o.servers, "Edge servers at the RSU");
  cmd.add_option("--tag", o.tag, "Run directory name");
}

void add_scheduling(CLI::App& cmd, Options& o) {
  cmd.add_option("--mode", o.mode, "mec-only | partition");
  cmd.add_option("--policy", o.policy, "fixed | shared");
  cmd.add_option("--drop-rule", o.drop_rule, "predictive | realized");
  cmd.add_option("--iterations", o.iterations, "PSO iteration cap");
  cmd.add_option("--swarm", o.swarm, "PSO swarm size");
  cmd.add_option("--pso-seed", o.pso_seed, "PSO base seed");
}

std::string seeds_override(const std::string& text) {
  if (text.find(',') == std::string::npos) return "seeds=" + text;
  return "seeds=[" + text + "]";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig build_config(const Options& o) {
  const std::string text = o.config_path.empty() ? std::string() : read_file(o.config_path);
  std::vector<std::string> overrides = o.sets;
  if (!o.seeds.empty()) overrides.push_back(seeds_override(o.seeds));
  if (o.seed) overrides.push_back("seeds=[" + std::to_string(*o.seed) + "]");
  if (o.vehicles) overrides.push_back("scenario.num_vehicles=" + std::to_string(*o.vehicles));
  if (o.servers) overrides.push_back("scenario.num_servers=" + std::to_string(*o.servers));
  if (o.jobs) overrides.push_back("jobs=" + std::to_string(*o.jobs));
  if (!o.scheduler.empty()) overrides.push_back("scheduler=\"" + o.scheduler + "\"");
  if (!o.mode.empty()) overrides.push_back("mode=\"" + o.mode + "\"");
  if (!o.policy.empty()) overrides.push_back("policy=\"" + o.policy + "\"");
  if (!o.drop_rule.empty()) overrides.push_back("drop_rule=\"" + o.drop_rule + "\"");
  if (o.iterations) overrides.push_back("pso.max_iterations=" + std::to_string(*o.iterations));
  if (o.swarm) overrides.push_back("pso.swarm_size=" + std::to_string(*o.swarm));
  if (o.pso_seed) overrides.push_back("pso.seed=" + std::to_string(*o.pso_seed));

  ExperimentConfig config = parse_config(text, overrides);

  bool file_sets_dir = false;
  if (!text.empty()) {
    try {
      file_sets_dir = nlohmann::json::parse(text).contains("output_dir");
    } catch (const nlohmann::json::exception&) {
    }
  }
  if (!o.output_dir.empty()) {
    config.output_dir = o.output_dir;
  } else if (!file_sets_dir) {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) config.output_dir = env;
  }
  if (!o.tag.empty()) config.tag = o.tag;
  return config;
}

void print_result(std::ostream& out, const std::string& tag, const ExperimentResult& r) {
  out << tag << ": runs=" << r.runs << " drop_ratio=" << format_number(r.mean_drop_ratio)
      << " drops=" << format_number(r.mean_drop_count) << " e2e_s=" << format_number(r.mean_e2e_s)
      << " local=" << format_number(r.mean_local_portion)
      << " remote=" << format_number(r.mean_remote_portion)
      << " wait_up_s=" << format_number(r.mean_uplink_wait_s)
      << " wait_down_s=" << format_number(r.mean_downlink_wait_s)
      << " fitness=" << format_number(r.mean_fitness) << '\n';
}

const char* kSweepHeader =
    "scenario_size,scheduler,mode,policy,runs,mean_drop_ratio,mean_drop_count,mean_e2e_s,"
    "mean_local_portion,mean_remote_portion,mean_uplink_wait_s,mean_downlink_wait_s,"
    "mean_fitness\n";

void write_sweep_row(std::ostream& out, const ExperimentResult& r) {
  out << r.scenario_size << ',' << to_string(r.scheduler) << ',' << to_string(r.mode) << ','
      << to_string(r.policy) << ',' << r.runs << ',' << format_number(r.mean_drop_ratio) << ','
      << format_number(r.mean_drop_count) << ',' << format_number(r.mean_e2e_s) << ','
      << format_number(r.mean_local_portion) << ',' << format_number(r.mean_remote_portion) << ','
      << format_number(r.mean_uplink_wait_s) << ',' << format_number(r.mean_downlink_wait_s)
      << ',' << format_number(r.mean_fitness) << '\n';
}

// Runs the configured scheduler either on a trace or on generated seeds.
ExperimentRun execute(ExperimentConfig& config, const std::string& trace) {
  if (trace.empty()) return run_experiment(config);
  const Scenario scenario = read_trace_file(trace);
  config.scenario.num_vehicles = scenario.num_tasks();
  config.scenario.num_servers = scenario.num_servers();
  config.seeds = {scenario.rng_seed()};
  ExperimentRun run;
  run.records.push_back(run_scenario(scenario, config, config.effective_jobs()));
  run.result = aggregate(config, run.records);
  return run;
}

int cmd_generate(const Options& o, const std::string& output, std::ostream& out) {
  ExperimentConfig config = build_config(o);
  const std::uint64_t seed = config.seeds.front();
  fs::path path = output;
  if (path.empty())
    path = fs::path(config.output_dir) /
           ("trace-n" + std::to_string(config.scenario.num_vehicles) + "-s" +
            std::to_string(seed) + ".csv");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_trace_file(path, generate_scenario(config.scenario, seed));
  out << path.string() << '\n';
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  ExperimentConfig config = build_config(o);
  ExperimentRun run = execute(config, o.trace);
  const std::string tag = experiment_tag(config);
  write_run_outputs(fs::path(config.output_dir) / tag, config, run);
  print_result(out, tag, run.result);
  return 0;
}

int cmd_optimize(Options o, bool oracle, std::size_t grid, std::ostream& out) {
  o.scheduler = "pso";
  ExperimentConfig config = build_config(o);

  if (oracle) {
    std::vector<Scenario> scenarios;
    if (!o.trace.empty()) {
      scenarios.push_back(read_trace_file(o.trace));
    } else {
      for (auto seed : config.seeds) scenarios.push_back(generate_scenario(config.scenario, seed));
    }
    for (const auto& s : scenarios) {
      const OracleResult best = exhaustive_oracle(s, config.policy, config.mode, grid,
                                                  config.pso.lambda_weight);
      out << "oracle seed=" << s.rng_seed() << " candidates=" << best.candidates
          << " fitness=" << format_number(best.fitness.combined)
          << " drops=" << best.schedule.drop_count() << '\n';
    }
  }

  ExperimentRun run = execute(config, o.trace);
  const std::string tag = experiment_tag(config);
  write_run_outputs(fs::path(config.output_dir) / tag, config, run);
  print_result(out, tag, run.result);
  return 0;
}

int cmd_sweep(const Options& o, const std::vector<std::size_t>& sizes_flag, std::ostream& out) {
  const ExperimentConfig base = build_config(o);
  std::vector<std::size_t> sizes = base.sweep_sizes;
  if (!sizes_flag.empty())
    sizes = sizes_flag;
  else if (o.vehicles)
    sizes = {*o.vehicles};

  const fs::path root = fs::path(base.output_dir) / base.tag;
  fs::create_directories(root);
  std::ofstream csv(root / "sweep.csv");
  if (!csv) throw ConfigError("cannot write " + (root / "sweep.csv").string());
  csv << kSweepHeader;

  for (std::size_t n : sizes)
    for (SchedulerKind k : {SchedulerKind::FCFS, SchedulerKind::SDF, SchedulerKind::PSO})
      for (OffloadMode m : {OffloadMode::MecOnly, OffloadMode::Partition})
        for (BandwidthPolicy p : {BandwidthPolicy::Fixed, BandwidthPolicy::Shared}) {
          ExperimentConfig cell = base;
          cell.scenario.num_vehicles = n;
          cell.scheduler = k;
          cell.mode = m;
          cell.policy = p;
          cell.tag.clear();
          const std::string tag = experiment_tag(cell);
          ExperimentRun run = run_experiment(cell);
          write_run_outputs(root / tag, cell, run);
          write_sweep_row(csv, run.result);
          print_result(out, tag, run.result);
        }
  out << (root / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_compare(const Options& o, const std::string& input, std::ostream& out) {
  const ExperimentConfig config = build_config(o);
  const fs::path in_dir = input.empty() ? fs::path(config.output_dir) : fs::path(input);
  if (!fs::is_directory(in_dir)) throw ConfigError("no such directory " + in_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no summary.json under " + in_dir.string());

  std::map<std::pair<std::size_t, SchedulerKind>, std::vector<ExperimentResult>> groups;
  for (const auto& f : files) {
    ExperimentResult r = read_summary(f);
    groups[{r.scenario_size, r.scheduler}].push_back(std::move(r));
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [key, results] : groups) {
    auto part = compare_policies(results);
    rows.insert(rows.end(), part.begin(), part.end());
  }

  const fs::path out_dir = o.output_dir.empty() ? in_dir : fs::path(o.output_dir);
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "comparison.csv";
  std::ofstream csv(path);
  if (!csv) throw ConfigError("cannot write " + path.string());
  write_comparison_csv(csv, rows);
  write_comparison_csv(out, rows);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vehicular edge offloading simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Options o;
  std::string output, input;
  bool oracle = false;
  std::size_t grid = 3;
  std::vector<std::size_t> sizes;

  auto* gen = app.add_subcommand("generate", "Write a scenario trace");
  add_common(*gen, o);
  gen->add_option("--trace-out", output, "Trace file path");

  auto* sim = app.add_subcommand("simulate", "Run one scheduler and write run outputs");
  add_common(*sim, o);
  add_scheduling(*sim, o);
  sim->add_option("-s,--scheduler", o.scheduler, "fcfs | sdf | pso");
  sim->add_option("--trace", o.trace, "Scenario trace instead of generated seeds")
      ->check(CLI::ExistingFile);

  auto* opt = app.add_subcommand("optimize", "Run PSO and write the convergence trace");
  add_common(*opt, o);
  add_scheduling(*opt, o);
  opt->add_option("--trace", o.trace, "Scenario trace instead of generated seeds")
      ->check(CLI::ExistingFile);
  opt->add_flag("--oracle", oracle, "Also run the exhaustive oracle (at most 6 tasks)");
  opt->add_option("--grid", grid, "Oracle fraction grid points in partition mode");

  auto* sweep = app.add_subcommand("sweep", "Run every size x scheduler x mode x policy cell");
  add_common(*sweep, o);
  sweep->add_option("--drop-rule", o.drop_rule, "predictive | realized");
  sweep->add_option("--iterations", o.iterations, "PSO iteration cap");
  sweep->add_option("--swarm", o.swarm, "PSO swarm size");
  sweep->add_option("--sizes", sizes, "Scenario sizes")->delimiter(',');

  auto* cmp = app.add_subcommand("compare", "Paired deltas between run summaries");
  add_common(*cmp, o);
  cmp->add_option("-i,--input", input, "Directory searched for summary.json files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(o, output, out);
    if (*sim) return cmd_simulate(o, out);
    if (*opt) return cmd_optimize(o, oracle, grid, out);
    if (*sweep) return cmd_sweep(o, sizes, out);
    if (*cmp) return cmd_compare(o, input, out);
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSize;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace vecsim::cli
