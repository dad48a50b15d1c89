#include "vecsim/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vecsim/error.hpp"
#include "vecsim/parallel.hpp"
#include "vecsim/random.hpp"
#include "vecsim/schedulers.hpp"

namespace vecsim {

namespace {

// Stream tags keep initialization draws apart from update draws.
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kStepStream = 0x73746570ULL;

std::size_t server_from_key(double key, std::size_t servers) {
  const auto s = static_cast<std::size_t>(std::lround(key * static_cast<double>(servers - 1)));
  return std::min(s, servers - 1);
}

}  // namespace

void PsoConfig::validate() const {
  if (swarm_size < 2) throw ConfigError("swarm_size must be at least 2");
  if (!(lambda_weight >= 0.0 && lambda_weight <= 1.0))
    throw ConfigError("lambda must lie in [0, 1]");
  if (cognitive_coef < 0.0 || social_coef < 0.0 || inertia_start < 0.0 || inertia_end < 0.0)
    throw ConfigError("PSO coefficients must be non-negative");
  if (!(velocity_clamp > 0.0)) throw ConfigError("velocity_clamp must be positive");
  if (stagnation_patience == 0) throw ConfigError("stagnation_patience must be positive");
}

AdmissionResult decode(std::span<const double> position, const Scenario& scenario,
                       OffloadMode mode, BandwidthPolicy policy) {
  const std::size_t n = scenario.num_tasks();
  if (position.size() != kGenesPerTask * n)
    throw IntegrityError("particle has " + std::to_string(position.size()) + " genes, expected " +
                         std::to_string(kGenesPerTask * n));

  std::vector<TaskId> order(n);
  std::iota(order.begin(), order.end(), TaskId{0});
  std::stable_sort(order.begin(), order.end(), [&](TaskId a, TaskId b) {
    return position[kGenesPerTask * a] < position[kGenesPerTask * b];
  });
  std::vector<std::size_t> servers(n);
  std::vector<double> fractions(n);
  for (TaskId id = 0; id < n; ++id) {
    servers[id] = server_from_key(position[kGenesPerTask * id + 1], scenario.num_servers());
    fractions[id] = mode == OffloadMode::MecOnly ? 1.0 : position[kGenesPerTask * id + 2];
  }

  AdmissionRequest req;
  req.mode = mode;
  req.policy = policy;
  req.order = order;
  req.servers = servers;
  req.desired_fraction = fractions;
  return admit(scenario, req);
}

std::vector<double> encode(const AdmissionResult& admitted, const Scenario& scenario) {
  const std::size_t n = scenario.num_tasks();
  const std::size_t m = scenario.num_servers();
  const Schedule& s = admitted.schedule;
  std::vector<double> position(kGenesPerTask * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    position[kGenesPerTask * s.order[r]] = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
  for (TaskId id = 0; id < n; ++id) {
    const std::size_t server = s.assignment[id] ? *s.assignment[id] : admitted.considered_server[id];
    position[kGenesPerTask * id + 1] =
        m > 1 ? static_cast<double>(server) / static_cast<double>(m - 1) : 0.0;
    // The repair step only ever lowers a fraction, so asking for all of it
    // reproduces whatever the admission step granted.
    position[kGenesPerTask * id + 2] = 1.0;
  }
  return position;
}

FitnessBreakdown fitness(const SimOutcome& outcome, const Scenario& scenario, double lambda) {
  FitnessBreakdown f;
  const double n = static_cast<double>(scenario.num_tasks());
  double kept_latency = 0.0;
  std::size_t dropped = 0;
  for (const auto& t : outcome.timelines) {
    if (t.dropped)
      ++dropped;
    else
      kept_latency += t.e2e_latency_s;
  }
  f.latency_term = kept_latency / scenario.total_range_time_s();
  f.drop_term = static_cast<double>(dropped) / n;
  f.combined = lambda * f.latency_term + (1.0 - lambda) * f.drop_term;
  return f;
}

FitnessBreakdown fitness(const Schedule& schedule, const Scenario& scenario,
                         BandwidthPolicy policy, double lambda) {
  return fitness(simulate(scenario, schedule, policy), scenario, lambda);
}

OptimizeResult optimize(const Scenario& scenario, const PsoConfig& config,
                        BandwidthPolicy policy, OffloadMode mode) {
  config.validate();
  const std::size_t n = scenario.num_tasks();
  const std::size_t dims = kGenesPerTask * n;
  const std::size_t swarm = config.swarm_size;
  const double vmax = config.velocity_clamp;

  std::vector<Particle> particles(swarm);
  std::vector<std::vector<double>> seeded;
  if (config.seed_with_baselines) {
    BaselineOptions base{policy, DropRule::Predictive};
    seeded.push_back(encode(build_fcfs(scenario, mode, base), scenario));
    seeded.push_back(encode(build_sdf(scenario, mode, base), scenario));
  }
  for (std::size_t i = 0; i < swarm; ++i) {
    Rng rng{config.seed, i, 0, kInitStream};
    Particle& p = particles[i];
    p.position.resize(dims);
    p.velocity.resize(dims);
    for (auto& x : p.position) x = rng.uniform();
    for (auto& v : p.velocity) v = rng.uniform(-vmax, vmax) * 0.2;
    if (i < seeded.size()) p.position = seeded[i];
  }

  std::vector<FitnessBreakdown> current(swarm);
  std::vector<Schedule> schedules(swarm);
  std::size_t evaluations = 0;
  auto evaluate_all = [&] {
    parallel_for(swarm, config.jobs, [&](std::size_t i) {
      schedules[i] = decode(particles[i].position, scenario, mode, policy).schedule;
      current[i] = fitness(schedules[i], scenario, policy, config.lambda_weight);
    });
    evaluations += swarm;
  };

  OptimizeResult result;
  std::size_t best_index = swarm;
  auto absorb = [&]() -> bool {
    bool improved = false;
    for (std::size_t i = 0; i < swarm; ++i) {
      Particle& p = particles[i];
      if (current[i].combined < p.best_fitness) {
        p.best_fitness = current[i].combined;
        p.best_position = p.position;
      }
      if (best_index == swarm || current[i].combined < result.fitness.combined) {
        result.fitness = current[i];
        result.schedule = schedules[i];
        result.best_position = p.position;
        best_index = i;
        improved = true;
      }
    }
    result.convergence.push_back({result.convergence.size(), result.fitness.combined,
                                  result.fitness.drop_term, result.fitness.latency_term});
    return improved;
  };

  evaluate_all();
  absorb();

  std::size_t stagnant = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const double progress = config.max_iterations > 1
                                ? static_cast<double>(it - 1) / static_cast<double>(config.max_iterations - 1)
                                : 0.0;
    const double inertia =
        config.inertia_start - (config.inertia_start - config.inertia_end) * progress;
    const std::vector<double>& global = result.best_position;
    for (std::size_t i = 0; i < swarm; ++i) {
      Rng rng{config.seed, i, it, kStepStream};
      Particle& p = particles[i];
      for (std::size_t d = 0; d < dims; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double v = inertia * p.velocity[d] +
                   config.cognitive_coef * r1 * (p.best_position[d] - p.position[d]) +
                   config.social_coef * r2 * (global[d] - p.position[d]);
        v = std::clamp(v, -vmax, vmax);
        p.velocity[d] = v;
        p.position[d] = std::clamp(p.position[d] + v, 0.0, 1.0);
      }
    }
    evaluate_all();
    stagnant = absorb() ? 0 : stagnant + 1;
    if (stagnant >= config.stagnation_patience && it < config.max_iterations) {
      result.stopped_early = true;
      break;
    }
  }
  result.evaluations = evaluations;
  return result;
}

OracleResult exhaustive_oracle(const Scenario& scenario, BandwidthPolicy policy,
                               OffloadMode mode, std::size_t fraction_grid, double lambda,
                               const OracleVisitor& visit) {
  const std::size_t n = scenario.num_tasks();
  const std::size_t m = scenario.num_servers();
  if (n > kOracleMaxTasks)
    throw SizeError("exhaustive oracle supports at most " + std::to_string(kOracleMaxTasks) +
                    " tasks, got " + std::to_string(n));
  if (fraction_grid == 0 || fraction_grid > kOracleMaxGrid)
    throw SizeError("fraction grid must have between 1 and " + std::to_string(kOracleMaxGrid) +
                    " points");

  std::vector<double> grid;
  if (mode == OffloadMode::MecOnly || fraction_grid == 1) {
    grid = {1.0};
  } else {
    for (std::size_t k = 0; k < fraction_grid; ++k)
      grid.push_back(static_cast<double>(k) / static_cast<double>(fraction_grid - 1));
  }

  std::vector<TaskId> order(n);
  std::iota(order.begin(), order.end(), TaskId{0});
  std::vector<std::size_t> servers(n, 0);
  std::vector<std::size_t> grid_index(n, 0);
  std::vector<double> fractions(n, 1.0);

  // Odometer over a vector of digits with the given base.
  auto advance = [](std::vector<std::size_t>& digits, std::size_t base) {
    for (auto& d : digits) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };

  OracleResult best;
  best.fitness.combined = std::numeric_limits<double>::infinity();
  do {
    std::fill(servers.begin(), servers.end(), 0);
    do {
      std::fill(grid_index.begin(), grid_index.end(), 0);
      do {
        for (std::size_t i = 0; i < n; ++i) fractions[i] = grid[grid_index[i]];
        AdmissionRequest req;
        req.mode = mode;
        req.policy = policy;
        req.order = order;
        req.servers = servers;
        req.desired_fraction = fractions;
        Schedule schedule = admit(scenario, req).schedule;
        const FitnessBreakdown f = fitness(schedule, scenario, policy, lambda);
        ++best.candidates;
        if (visit) visit(schedule, f);
        if (f.combined < best.fitness.combined) {
          best.fitness = f;
          best.schedule = std::move(schedule);
        }
      } while (advance(grid_index, grid.size()));
    } while (advance(servers, m));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace vecsim
