#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "vecsim/admission.hpp"
#include "vecsim/engine.hpp"

namespace vecsim {

struct PsoConfig {
  std::size_t swarm_size = 50;
  std::size_t max_iterations = 100;
  double cognitive_coef = 0.5;
  double social_coef = 0.5;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
  std::size_t stagnation_patience = 20;
  double lambda_weight = 0.3;
  double velocity_clamp = 0.5;
  // Start two particles from the FCFS and SDF decisions.
  bool seed_with_baselines = true;
  std::uint64_t seed = 1;
  // Threads for fitness evaluation within one iteration.
  std::size_t jobs = 1;

  void validate() const;
};

/// Position layout: three genes per task id, [priority, server, fraction],
/// all in [0, 1].
struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kGenesPerTask = 3;

struct FitnessBreakdown {
  double latency_term = 0.0;  // sum of kept e2e latencies / sum of range times
  double drop_term = 0.0;     // dropped / n
  double combined = 0.0;      // lambda * latency + (1 - lambda) * drop
};

/// Random-key decoding: order by priority key (ties by id), server
/// round(key * (m - 1)), then online admission. MecOnly offloads whole tasks
/// and drops infeasible ones; Partition caps the fraction gene by the
/// feasibility repair and never drops.
AdmissionResult decode(std::span<const double> position, const Scenario& scenario,
                       OffloadMode mode, BandwidthPolicy policy);

/// Inverse of decode for a schedule built by the admission step; decoding
/// the result reproduces the same schedule.
std::vector<double> encode(const AdmissionResult& admitted, const Scenario& scenario);

FitnessBreakdown fitness(const SimOutcome& outcome, const Scenario& scenario, double lambda);
FitnessBreakdown fitness(const Schedule& schedule, const Scenario& scenario,
                         BandwidthPolicy policy, double lambda);

struct ConvergencePoint {
  std::size_t iteration = 0;
  double best_fitness = 0.0;
  double drop_term = 0.0;
  double latency_term = 0.0;
};

struct OptimizeResult {
  Schedule schedule;
  FitnessBreakdown fitness;
  std::vector<double> best_position;
  std::vector<ConvergencePoint> convergence;  // index 0 is the initial swarm
  bool stopped_early = false;
  std::size_t evaluations = 0;
};

/// Global-best PSO with linearly decaying inertia, velocity clamping and
/// early stopping after `stagnation_patience` iterations without a strict
/// improvement. Every random draw comes from a stream keyed by
/// (seed, particle, iteration), so the result does not depend on `jobs`.
OptimizeResult optimize(const Scenario& scenario, const PsoConfig& config,
                        BandwidthPolicy policy, OffloadMode mode);

struct OracleResult {
  Schedule schedule;
  FitnessBreakdown fitness;
  std::size_t candidates = 0;
};

inline constexpr std::size_t kOracleMaxTasks = 6;
inline constexpr std::size_t kOracleMaxGrid = 5;

using OracleVisitor = std::function<void(const Schedule&, const FitnessBreakdown&)>;

/// Enumerates every order x assignment (x fraction grid in partition mode)
/// and returns the minimum objective. Throws SizeError beyond 6 tasks or a
/// grid of more than 5 points.
OracleResult exhaustive_oracle(const Scenario& scenario, BandwidthPolicy policy,
                               OffloadMode mode, std::size_t fraction_grid, double lambda,
                               const OracleVisitor& visit = {});

}  // namespace vecsim
