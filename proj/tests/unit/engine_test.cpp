#include <gtest/gtest.h>

#include <cmath>

#include "nimbus/engine.hpp"
#include "nimbus/errors.hpp"
#include "support.hpp"

using namespace nimbus;

namespace {

ScenarioConfig step(const char* name, BalancerPolicy balancer, std::uint64_t seed = 0) {
  ScenarioConfig c = *find_builtin(name);
  c.balancer_policy = balancer;
  c.seed = seed;
  return c;
}

// Every request is its own batch and takes `service_ms` alone on a VM.
ScenarioConfig congested(std::uint32_t vms, double service_ms, BalancerPolicy balancer) {
  ScenarioConfig c = testkit::tiny_scenario(vms);
  c.duration_hours = 0.05;
  c.balancer_policy = balancer;
  c.sim_params.request_grouping_factor = 1;
  c.user_bases[0].avg_offpeak_users = 1000;
  c.user_bases[0].avg_peak_users = 1000;
  c.user_bases[0].requests_per_user_per_hour = 10;  // ~2.8 requests/s
  const double mips = place_vms(c.data_centers[0]).vm_mips[0];
  c.sim_params.instruction_length_per_request = service_ms * mips * 1e3;
  return c;
}

}  // namespace

TEST(EventQueue, OrdersByTimeThenInsertion) {
  EventQueue q;
  q.push({.time = 5, .subject = 1});
  q.push({.time = 1, .subject = 2});
  q.push({.time = 5, .subject = 3});
  q.push({.time = 1, .subject = 4});
  std::vector<std::size_t> order;
  while (!q.empty()) order.push_back(q.pop().subject);
  EXPECT_EQ(order, (std::vector<std::size_t>{2, 4, 1, 3}));
}

TEST(Engine, EmptyTraffic) {
  ScenarioConfig c = testkit::tiny_scenario();
  c.user_bases[0].avg_peak_users = 0;
  c.user_bases[0].avg_offpeak_users = 0;
  const auto r = run(ValidatedScenario::assume_valid(c));
  EXPECT_EQ(r.counters.requests_generated, 0u);
  EXPECT_TRUE(r.overall_response.empty());
  EXPECT_TRUE(r.overall_processing.empty());
  EXPECT_TRUE(r.user_bases[0].stats.empty());
  EXPECT_EQ(render_mean(r.data_centers[0].stats), "—");
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(Engine, SingleBatchWithoutNetworkTakesSoloTime) {
  ScenarioConfig c = testkit::tiny_scenario();
  c.duration_hours = 1;
  c.delay_matrix = testkit::uniform_matrix(0);
  c.user_bases[0].request_size_bytes = 0;
  c.user_bases[0].response_size_bytes = 0;
  c.user_bases[0].avg_offpeak_users = 100;
  c.user_bases[0].avg_peak_users = 100;
  c.user_bases[0].requests_per_user_per_hour = 1.5;  // 150 expected requests: one full batch
  const double solo = solo_duration_ms(100 * 250.0, 40000);
  int runs_with_one_batch = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    Engine engine(ValidatedScenario::assume_valid(c));
    const auto r = engine.run();
    if (r.counters.batches_generated != 1) continue;
    ++runs_with_one_batch;
    const auto& req = engine.requests().at(0);
    EXPECT_EQ(*req.arrived_dc_at, req.sent_at);
    EXPECT_NEAR(r.overall_response.mean_ms(), solo, 1e-8);
    EXPECT_NEAR(r.overall_processing.mean_ms(), solo, 1e-8);
    EXPECT_EQ(r.overall_response.count(), 100u);
  }
  EXPECT_GT(runs_with_one_batch, 5);
}

TEST(Engine, ThrottledQueueHandsOffAtCompletionTime) {
  const ScenarioConfig c = congested(2, 2000, BalancerPolicy::Throttled);
  Engine engine(validate(c));
  bool saw_queue = false;
  std::optional<Event> last_completion;
  int handoffs = 0;
  engine.set_observer([&](const Event& e, const Engine& en) {
    const auto& dc = en.data_center(0);
    if (e.kind == EventKind::BatchArrivesAtDc && !e.requeued && !dc.waiting_queue.empty() && !saw_queue) {
      // the third simultaneous task waits while both VMs are busy
      saw_queue = true;
      EXPECT_EQ(dc.vms[0].active_count(), 1u);
      EXPECT_EQ(dc.vms[1].active_count(), 1u);
      EXPECT_EQ(dc.waiting_queue.size(), 1u);
    }
    if (e.kind == EventKind::TaskCompletes) last_completion = e;
    if (e.requeued) {
      ++handoffs;
      ASSERT_TRUE(last_completion);
      EXPECT_EQ(e.time, last_completion->time);
      EXPECT_GT(e.seq, last_completion->seq);
      const auto& vm = dc.vms[en.requests()[e.subject].vm];
      EXPECT_EQ(vm.active_count(), 1u);
    }
    for (const auto& vm : dc.vms) EXPECT_LE(vm.active_count(), 1u);
  });
  const auto r = engine.run();
  EXPECT_TRUE(saw_queue);
  EXPECT_GT(handoffs, 0);
  EXPECT_EQ(r.counters.batches_generated, r.counters.batches_delivered);
  EXPECT_GE(r.overall_processing.max_ms(), 2000.0 * 1.5);  // some task waited
}

TEST(Engine, ProcessorSharingUnderRoundRobin) {
  const ScenarioConfig c = congested(2, 2000, BalancerPolicy::RoundRobin);
  Engine engine(validate(c));
  std::size_t most = 0;
  engine.set_observer([&](const Event&, const Engine& en) {
    for (const auto& vm : en.data_center(0).vms) most = std::max(most, vm.active_count());
  });
  const auto r = engine.run();
  EXPECT_GT(most, 1u);
  EXPECT_GE(r.overall_processing.min_ms(), 2000.0 * (1 - 1e-9));
  EXPECT_EQ(r.counters.batches_generated, r.counters.batches_delivered);
}

TEST(Engine, EquallySpreadLedgerTracksVms) {
  const ScenarioConfig c = congested(3, 1500, BalancerPolicy::EquallySpread);
  Engine engine(validate(c));
  engine.set_observer([&](const Event& e, const Engine& en) {
    if (e.kind != EventKind::BatchArrivesAtDc) return;
    const auto* esce = en.balancer(0).as<EquallySpreadBalancer>();
    ASSERT_NE(esce, nullptr);
    const auto& vms = en.data_center(0).vms;
    const auto& req = en.requests()[e.subject];
    for (std::size_t v = 0; v < vms.size(); ++v) {
      EXPECT_EQ(esce->allocations()[v], vms[v].active_count());
      // chosen VM held no more tasks than any other before admission
      if (v != req.vm) {
        EXPECT_LE(vms[req.vm].active_count() - 1, vms[v].active_count());
      }
    }
  });
  engine.run();
}

TEST(Engine, BalancerConsultedOncePerArrival) {
  const ScenarioConfig c = step("step1", BalancerPolicy::RoundRobin);
  Engine engine(validate(c));
  std::size_t arrivals = 0;
  engine.set_observer([&](const Event& e, const Engine& en) {
    if (e.kind != EventKind::BatchArrivesAtDc) return;
    ++arrivals;
    EXPECT_EQ(en.balancer(0).as<RoundRobinBalancer>()->cursor(), arrivals % 100);
  });
  engine.run();
  EXPECT_GT(arrivals, 0u);
}

TEST(Engine, HourBoundarySwitchesRate) {
  const ScenarioConfig c = step("step1", BalancerPolicy::RoundRobin);
  Engine engine(validate(c));
  std::vector<int> hours;
  engine.set_observer([&](const Event& e, const Engine& en) {
    if (e.kind != EventKind::HourBoundary) return;
    hours.push_back(en.current_hour());
    const bool peak = en.current_hour() >= 3 && en.current_hour() < 9;
    EXPECT_DOUBLE_EQ(en.current_request_rate(0), (peak ? 1000 : 100) * 60 / kMsPerHour);
  });
  engine.run();
  ASSERT_EQ(hours.size(), 23u);
  for (int h = 1; h < 24; ++h) EXPECT_EQ(hours[static_cast<std::size_t>(h - 1)], h);
}

TEST(Engine, ClockAndTimestampsAreOrdered) {
  for (auto policy : {BalancerPolicy::RoundRobin, BalancerPolicy::Throttled}) {
    ScenarioConfig c = step("step3", policy, 4);
    c.broker_policy = BrokerPolicy::OptimizeResponseTime;
    Engine engine(validate(c));
    Millis last = 0;
    std::uint64_t last_seq = 0;
    engine.set_observer([&](const Event& e, const Engine&) {
      ASSERT_GE(e.time, last);
      if (e.time == last && last > 0) {
        ASSERT_GT(e.seq, last_seq);
      }
      last = e.time;
      last_seq = e.seq;
    });
    engine.run();
    for (const auto& req : engine.requests()) {
      ASSERT_TRUE(req.delivered_at);
      EXPECT_LE(req.sent_at, *req.arrived_dc_at);
      EXPECT_LE(*req.arrived_dc_at, *req.processing_done_at);
      EXPECT_LE(*req.processing_done_at, *req.delivered_at);
    }
  }
}

TEST(Engine, ConservationOnBuiltins) {
  for (const char* name : {"step1", "step2", "step2-cost", "step3"}) {
    for (auto policy : {BalancerPolicy::RoundRobin, BalancerPolicy::EquallySpread, BalancerPolicy::Throttled}) {
      Engine engine(validate(step(name, policy)));
      const auto r = engine.run();
      EXPECT_EQ(r.counters.batches_generated, r.counters.batches_delivered) << name;
      EXPECT_EQ(r.counters.batches_in_flight_at_cutoff, 0u) << name;
      EXPECT_EQ(r.counters.requests_generated, r.counters.requests_delivered) << name;
      EXPECT_EQ(r.overall_response.count(), r.counters.requests_delivered) << name;
      EXPECT_EQ(r.overall_processing.count(), r.counters.requests_delivered) << name;
      EXPECT_TRUE(engine.channel_load().idle()) << name;
      std::uint64_t per_ub = 0;
      for (std::size_t i = 0; i < r.user_bases.size(); ++i) {
        EXPECT_EQ(r.user_bases[i].hourly.total_count(), r.user_bases[i].stats.count());
        EXPECT_EQ(r.requests_generated_per_ub[i], r.user_bases[i].stats.count());
        per_ub += r.requests_generated_per_ub[i];
      }
      EXPECT_EQ(per_ub, r.counters.requests_generated);
      for (const auto& dc : r.data_centers) EXPECT_EQ(dc.hourly.total_count(), dc.stats.count());
    }
  }
}

TEST(Engine, StepOneVolumeMatchesTraffic) {
  const auto r = run(validate(step("step1", BalancerPolicy::RoundRobin)));
  EXPECT_NEAR(static_cast<double>(r.counters.requests_generated), 1872000.0, 3 * std::sqrt(1872000.0));
}

TEST(Engine, Determinism) {
  for (const auto& base : builtin_scenarios()) {
    ScenarioConfig c = base;
    c.broker_policy = BrokerPolicy::OptimizeResponseTime;
    const auto a = report_to_json(run(validate(c)));
    const auto b = report_to_json(run(validate(c)));
    EXPECT_EQ(a, b) << c.name;
    c.seed = 1;
    EXPECT_NE(report_to_json(run(validate(c))), a) << c.name;
  }
}

TEST(Engine, DrainStopsAfterOneHour) {
  // A task far longer than the drain window stays in flight at cutoff.
  ScenarioConfig c = congested(1, 3 * kMsPerHour, BalancerPolicy::RoundRobin);
  Engine engine(validate(c));
  const auto r = engine.run();
  EXPECT_GT(r.counters.batches_generated, 0u);
  EXPECT_EQ(r.counters.batches_delivered, 0u);
  EXPECT_EQ(r.counters.batches_in_flight_at_cutoff, r.counters.batches_generated);
  EXPECT_LE(engine.now(), engine.cutoff());
}
