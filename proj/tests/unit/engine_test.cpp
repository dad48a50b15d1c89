#include <gtest/gtest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "vecsim/error.hpp"
#include "vecsim/random.hpp"

namespace vecsim {
namespace {

using testing::kBits1080p;
using testing::kBits480p;
using testing::kBits720p;
using testing::make_schedule;
using testing::make_scenario;

void expect_rel(double actual, double expected, double tol = 1e-9) {
  EXPECT_NEAR(actual, expected, tol * std::max(1.0, std::abs(expected)))
      << "expected " << expected;
}

Schedule three_task_schedule() {
  return make_schedule(OffloadMode::MecOnly, {0, 1, 2}, {0, 1, 0}, {1.0, 1.0, 1.0});
}

// Hand-traced timeline of three_task_scenario() under the fixed policy.
TEST(Engine, ThreeTaskFixedTimeline) {
  const Scenario s = testing::three_task_scenario();
  const SimOutcome out = simulate(s, three_task_schedule(), BandwidthPolicy::Fixed);
  const auto& t0 = out.timelines[0];
  const auto& t1 = out.timelines[1];
  const auto& t2 = out.timelines[2];

  expect_rel(t0.uplink_wait_s, 0.0);
  expect_rel(t0.rsu_arrival_s, 0.18255467700474143);
  expect_rel(t1.uplink_wait_s, 0.18255467700474143);
  expect_rel(t1.rsu_arrival_s, 0.2636900890068487);
  expect_rel(t2.uplink_wait_s, 0.1636900890068487);
  expect_rel(t2.rsu_arrival_s, 0.29073522634088445);

  expect_rel(t0.proc_end_s, 2.1825546770047413);
  expect_rel(t1.proc_end_s, 1.2636900890068488);
  expect_rel(t2.proc_wait_s, 1.8918194506638568);
  expect_rel(t2.proc_end_s, 2.6825546770047413);

  expect_rel(t1.vehicle_arrival_s, 1.344825501008956);
  expect_rel(t0.downlink_wait_s, 0.0);
  expect_rel(t0.vehicle_arrival_s, 2.3651093540094825);
  expect_rel(t2.vehicle_arrival_s, 2.709599814338777);

  expect_rel(t0.e2e_latency_s, 2.3651093540094825);
  expect_rel(t1.e2e_latency_s, 1.344825501008956);
  expect_rel(t2.e2e_latency_s, 2.609599814338777);
  EXPECT_EQ(out.uplink_shared_cohorts, 0u);
}

// Same tasks under the shared policy: the two t=0 frames split the band.
TEST(Engine, ThreeTaskSharedTimeline) {
  const Scenario s = testing::three_task_scenario();
  const SimOutcome out = simulate(s, three_task_schedule(), BandwidthPolicy::Shared);
  const auto& t0 = out.timelines[0];
  const auto& t1 = out.timelines[1];
  const auto& t2 = out.timelines[2];

  EXPECT_EQ(t0.uplink_cohort, 2u);
  EXPECT_EQ(t1.uplink_cohort, 2u);
  EXPECT_EQ(t2.uplink_cohort, 1u);
  expect_rel(t0.uplink_wait_s, 0.0);
  expect_rel(t1.uplink_wait_s, 0.0);
  expect_rel(t0.rsu_arrival_s, 0.36510935400948286);
  expect_rel(t1.rsu_arrival_s, 0.16227082400421458);
  expect_rel(t2.uplink_wait_s, 0.2651093540094829);
  expect_rel(t2.rsu_arrival_s, 0.3921544913435186);

  expect_rel(t1.proc_end_s, 1.1622708240042146);
  expect_rel(t1.vehicle_arrival_s, 1.2434062360063218);
  expect_rel(t0.proc_end_s, 2.365109354009483);
  expect_rel(t0.vehicle_arrival_s, 2.5476640310142242);
  expect_rel(t2.proc_end_s, 2.865109354009483);
  expect_rel(t2.vehicle_arrival_s, 2.892154491343519);
  EXPECT_EQ(out.uplink_shared_cohorts, 1u);
  EXPECT_EQ(out.downlink_shared_cohorts, 0u);
}

TEST(Engine, AccountingIdentityHoldsPerTask) {
  const Scenario s = testing::three_task_scenario();
  for (auto policy : {BandwidthPolicy::Fixed, BandwidthPolicy::Shared}) {
    const SimOutcome out = simulate(s, three_task_schedule(), policy);
    for (const auto& t : out.timelines) {
      expect_rel(t.comm_latency_s,
                 t.uplink_wait_s + t.uplink_tx_s + t.downlink_wait_s + t.downlink_tx_s);
      expect_rel(t.comp_latency_s, t.proc_wait_s + t.proc_time_s);
      expect_rel(t.e2e_latency_s, t.comm_latency_s + t.comp_latency_s + t.local_time_s);
      // With no local share the e2e latency is the time from ready to result.
      expect_rel(t.e2e_latency_s, t.vehicle_arrival_s - t.ready_time_s);
    }
  }
}

TEST(Engine, ServerStartRecurrence) {
  // Three 480p frames on one server, ready 1 ms apart: each starts when the
  // previous one finishes.
  const Scenario s = make_scenario({{0.0, kBits480p, 0.5, 1.5, 10},
                                    {0.001, kBits480p, 0.5, 1.5, 10},
                                    {0.002, kBits480p, 0.5, 1.5, 10}},
                                   1);
  const auto sched = make_schedule(OffloadMode::MecOnly, {0, 1, 2}, {0, 0, 0}, {1, 1, 1});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  const double tx = kBits480p / 272610928.49846536;
  expect_rel(out.timelines[0].proc_start_s, tx);
  expect_rel(out.timelines[1].proc_start_s, tx + 0.5);
  expect_rel(out.timelines[2].proc_start_s, tx + 1.0);
  for (int i = 1; i < 3; ++i)
    expect_rel(out.timelines[i].proc_start_s,
               std::max(out.timelines[i].rsu_arrival_s, out.timelines[i - 1].proc_end_s));
}

TEST(Engine, WaitsAreStartMinusRelease) {
  const Scenario s = testing::three_task_scenario();
  const SimOutcome out = simulate(s, three_task_schedule(), BandwidthPolicy::Fixed);
  for (const auto& t : out.timelines) {
    expect_rel(t.uplink_wait_s, t.rsu_arrival_s - t.uplink_tx_s - t.ready_time_s);
    expect_rel(t.downlink_wait_s, t.vehicle_arrival_s - t.downlink_tx_s - t.proc_end_s);
    EXPECT_GE(t.uplink_wait_s, 0.0);
    EXPECT_GE(t.downlink_wait_s, 0.0);
  }
}

TEST(Engine, PriorityOrderAppliesAtUplink) {
  // Reversing the order lets the 720p frame go first.
  const Scenario s = testing::three_task_scenario();
  const auto sched = make_schedule(OffloadMode::MecOnly, {1, 0, 2}, {0, 1, 0}, {1, 1, 1});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  expect_rel(out.timelines[1].uplink_wait_s, 0.0);
  expect_rel(out.timelines[0].uplink_wait_s, kBits720p / 272610928.49846536);
}

TEST(Engine, TaskNotServedBeforeReady) {
  // Highest priority but ready late: the channel does not idle for it.
  const Scenario s = make_scenario({{0.0, kBits480p, 0.5, 1.5, 10}, {5.0, kBits480p, 0.5, 1.5, 10}});
  const auto sched = make_schedule(OffloadMode::MecOnly, {1, 0}, {0, 0}, {1, 1});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  expect_rel(out.timelines[0].uplink_wait_s, 0.0);
  expect_rel(out.timelines[1].uplink_wait_s, 0.0);
  EXPECT_GE(out.timelines[1].rsu_arrival_s, 5.0);
}

TEST(Engine, PartialOffloadScalesRemoteStages) {
  const Scenario s = make_scenario({{0.0, kBits1080p, 2.0, 6.0, 20}});
  const auto sched = make_schedule(OffloadMode::Partition, {0}, {0}, {0.25});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  const auto& t = out.timelines[0];
  const double tx = 0.18255467700474143;
  expect_rel(t.uplink_tx_s, 0.25 * tx);
  expect_rel(t.downlink_tx_s, 0.25 * tx);
  expect_rel(t.proc_time_s, 0.5);
  expect_rel(t.local_time_s, 4.5);
  expect_rel(t.e2e_latency_s, 0.5 * tx + 0.5 + 4.5);
  expect_rel(t.weighted_e2e_s, t.e2e_latency_s);
  expect_rel(out.mean_remote_portion + out.mean_local_portion, 1.0);
}

TEST(Engine, FullyLocalTaskUsesNoChannel) {
  const Scenario s = make_scenario({{0.0, kBits720p, 1.0, 3.0, 20}});
  const auto sched = make_schedule(OffloadMode::Partition, {0}, {1}, {0.0});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Shared);
  const auto& t = out.timelines[0];
  EXPECT_FALSE(t.offloaded());
  EXPECT_EQ(t.uplink_tx_s, 0.0);
  expect_rel(t.e2e_latency_s, 3.0);
  EXPECT_TRUE(t.deadline_met);
}

TEST(Engine, DroppedTasksAreExcludedFromMeans) {
  const Scenario s = testing::three_task_scenario();
  const auto sched = make_schedule(OffloadMode::MecOnly, {0, 1, 2}, {0, std::nullopt, 0}, {1, 0, 1});
  const SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  EXPECT_EQ(out.drop_count, 1u);
  EXPECT_DOUBLE_EQ(out.drop_ratio, 1.0 / 3.0);
  expect_rel(out.mean_e2e_s,
             (out.timelines[0].e2e_latency_s + out.timelines[2].e2e_latency_s) / 2.0);
  EXPECT_EQ(out.timelines[1].e2e_latency_s, 0.0);
}

TEST(Engine, DeadlineCheck) {
  const Scenario s = make_scenario({{0.0, kBits1080p, 2.0, 6.0, 2.0}});
  const auto sched = make_schedule(OffloadMode::MecOnly, {0}, {0}, {1});
  SimOutcome out = simulate(s, sched, BandwidthPolicy::Fixed);
  EXPECT_FALSE(out.timelines[0].deadline_met);
  EXPECT_EQ(out.deadline_misses, 1u);
  apply_realized_drops(out);
  EXPECT_EQ(out.drop_count, 1u);
  EXPECT_EQ(out.deadline_misses, 0u);
}

TEST(Engine, FeasibleFraction) {
  Task t;
  t.range_deadline_s = 10.0;
  EXPECT_EQ(feasible_fraction(t, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(feasible_fraction(t, 15.0, 10.0), 0.4);
  t.range_deadline_s = 0.0;
  EXPECT_EQ(feasible_fraction(t, 1.0, 1.0), 0.0);
}

TEST(Engine, RejectsMalformedSchedules) {
  const Scenario s = testing::three_task_scenario();
  EXPECT_THROW(simulate(s, make_schedule(OffloadMode::MecOnly, {0, 1}, {0, 0, 0}, {1, 1, 1}),
                        BandwidthPolicy::Fixed),
               IntegrityError);
  EXPECT_THROW(simulate(s, make_schedule(OffloadMode::MecOnly, {0, 1, 1}, {0, 0, 0}, {1, 1, 1}),
                        BandwidthPolicy::Fixed),
               IntegrityError);
  EXPECT_THROW(simulate(s, make_schedule(OffloadMode::MecOnly, {0, 1, 2}, {0, 5, 0}, {1, 1, 1}),
                        BandwidthPolicy::Fixed),
               IntegrityError);
  EXPECT_THROW(simulate(s, make_schedule(OffloadMode::MecOnly, {0, 1, 2}, {0, 1, 0}, {1, 0.5, 1}),
                        BandwidthPolicy::Fixed),
               IntegrityError);
  EXPECT_THROW(simulate(s, make_schedule(OffloadMode::Partition, {0, 1, 2},
                                         {0, std::nullopt, 0}, {1, 0, 1}),
                        BandwidthPolicy::Fixed),
               IntegrityError);
}

TEST(Engine, SimultaneousCompletionsShareDownlink) {
  // Two identical frames ready together on different servers finish
  // processing together and leave as one downlink cohort.
  const Scenario s = make_scenario({{0.0, kBits480p, 0.5, 1.5, 10}, {0.0, kBits480p, 0.5, 1.5, 10}});
  const auto sched = make_schedule(OffloadMode::MecOnly, {0, 1}, {0, 1}, {1, 1});
  const SimOutcome shared = simulate(s, sched, BandwidthPolicy::Shared);
  EXPECT_EQ(shared.timelines[0].downlink_cohort, 2u);
  EXPECT_EQ(shared.downlink_shared_cohorts, 1u);
  expect_rel(shared.mean_downlink_wait_s, 0.0);
  const SimOutcome fixed = simulate(s, sched, BandwidthPolicy::Fixed);
  EXPECT_GT(fixed.mean_uplink_wait_s + fixed.mean_downlink_wait_s,
            shared.mean_uplink_wait_s + shared.mean_downlink_wait_s);
}

// Random small instances against the naive reference implementation.
TEST(Engine, MatchesReferenceOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.index(8);
    std::vector<testing::TaskSpec> specs;
    const double sizes[] = {kBits480p, kBits720p, kBits1080p};
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = rng.index(3);
      // Coarse ready grid so ties and cohorts are common.
      specs.push_back({static_cast<double>(rng.index(4)) * 0.5, sizes[r], 0.5 * (1 << r),
                       1.5 * (1 << r), 5.0 + rng.uniform(0, 10)});
    }
    const Scenario s = make_scenario(specs, 1 + rng.index(3));
    std::vector<TaskId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<TaskId>(i);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    const OffloadMode mode = rng.index(2) ? OffloadMode::Partition : OffloadMode::MecOnly;
    std::vector<std::optional<std::size_t>> servers(n);
    std::vector<double> fractions(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (mode == OffloadMode::MecOnly && rng.index(4) == 0) continue;
      servers[i] = rng.index(s.num_servers());
      fractions[i] = mode == OffloadMode::MecOnly ? 1.0 : std::round(rng.uniform() * 4) / 4;
    }
    const auto sched = make_schedule(mode, order, servers, fractions);
    for (auto policy : {BandwidthPolicy::Fixed, BandwidthPolicy::Shared}) {
      const SimOutcome got = simulate(s, sched, policy);
      const SimOutcome want = testing::reference_simulate(s, sched, policy);
      for (std::size_t i = 0; i < n; ++i) {
        SCOPED_TRACE("seed " + std::to_string(seed) + " task " + std::to_string(i));
        const auto& g = got.timelines[i];
        const auto& w = want.timelines[i];
        EXPECT_EQ(g.dropped, w.dropped);
        if (!g.offloaded()) continue;
        expect_rel(g.uplink_wait_s, w.uplink_wait_s);
        expect_rel(g.rsu_arrival_s, w.rsu_arrival_s);
        expect_rel(g.proc_start_s, w.proc_start_s);
        expect_rel(g.proc_end_s, w.proc_end_s);
        expect_rel(g.downlink_wait_s, w.downlink_wait_s);
        expect_rel(g.vehicle_arrival_s, w.vehicle_arrival_s);
        expect_rel(g.e2e_latency_s, w.e2e_latency_s);
        EXPECT_EQ(g.uplink_cohort, w.uplink_cohort);
        EXPECT_EQ(g.downlink_cohort, w.downlink_cohort);
      }
    }
  }
}

TEST(Engine, ModeNamesRoundTrip) {
  for (auto m : {OffloadMode::MecOnly, OffloadMode::Partition})
    EXPECT_EQ(parse_offload_mode(to_string(m)), m);
  EXPECT_THROW(parse_offload_mode("cloud"), ConfigError);
}

}  // namespace
}  // namespace vecsim
