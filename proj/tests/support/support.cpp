#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nimbus/balancer.hpp"
#include "nimbus/datacenter.hpp"

namespace nimbus::testkit {

std::vector<Millis> brute_force_ps(const std::vector<PsJob>& jobs, double mips, Millis step_ms) {
  const double per_step = mips * 1e3 * step_ms;
  const auto step_us = static_cast<std::int64_t>(std::llround(step_ms * 1e3));
  std::vector<double> remaining;
  for (const auto& job : jobs) remaining.push_back(job.instructions);
  std::vector<Millis> done(jobs.size(), -1);
  std::size_t finished = 0;
  for (std::int64_t k = 0; finished < jobs.size(); ++k) {
    const std::int64_t t_us = k * step_us;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (done[i] >= 0 || jobs[i].arrival_us > t_us) continue;
      active.push_back(i);
    }
    const double share = active.empty() ? 0 : per_step / static_cast<double>(active.size());
    for (std::size_t i : active) {
      remaining[i] -= share;
      if (remaining[i] <= 1e-9) {
        done[i] = static_cast<double>(t_us + step_us) / 1e3;
        ++finished;
      }
    }
  }
  return done;
}

std::vector<Millis> event_driven_ps(const std::vector<PsJob>& jobs, double mips) {
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return jobs[a].arrival_us < jobs[b].arrival_us; });

  VmState vm(0, mips);
  std::vector<Millis> done(jobs.size(), -1);
  std::size_t next = 0;
  while (next < order.size() || !vm.idle()) {
    const auto completion = vm.next_completion();
    const bool arrival_pending = next < order.size();
    const Millis arrival = arrival_pending ? static_cast<double>(jobs[order[next]].arrival_us) / 1e3 : 0;
    if (completion && (!arrival_pending || *completion <= arrival)) {
      for (const auto& task : vm.complete_due(*completion)) done[task.id] = *completion;
    } else {
      vm.admit(order[next], jobs[order[next]].instructions, arrival);
      ++next;
    }
  }
  return done;
}

PsCase random_ps_case(RandomStream& rng) {
  static constexpr double kMips[] = {250, 800, 1000, 2500};
  PsCase c;
  c.mips = kMips[rng.next_u64() % 4];
  const auto n = 1 + rng.next_u64() % 5;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double solo_ms = 2.0 + 18.0 * rng.uniform();
    c.jobs.push_back({static_cast<std::int64_t>(rng.next_u64() % 15000), solo_ms * c.mips * 1e3});
  }
  return c;
}

PsComparison compare_ps(std::uint64_t seed, std::size_t n) {
  RandomStream rng(seed);
  PsComparison result;
  for (std::size_t i = 0; i < n; ++i) {
    const PsCase c = random_ps_case(rng);
    const auto exact = event_driven_ps(c.jobs, c.mips);
    const auto coarse = brute_force_ps(c.jobs, c.mips);
    for (std::size_t j = 0; j < exact.size(); ++j) {
      result.worst_relative_error = std::max(result.worst_relative_error, std::abs(exact[j] - coarse[j]) / coarse[j]);
    }
    ++result.cases;
  }
  return result;
}

namespace {

std::string at_step(int step, const std::string& what) { return "step " + std::to_string(step) + ": " + what; }

}  // namespace

std::optional<std::string> throttled_property(std::uint64_t seed, int steps) {
  RandomStream rng(seed);
  const std::size_t vms = 1 + rng.next_u64() % 8;
  ThrottledBalancer balancer(vms);
  std::vector<int> active(vms, 0);
  for (int s = 0; s < steps; ++s) {
    const bool any_busy = std::any_of(active.begin(), active.end(), [](int a) { return a > 0; });
    if (any_busy && rng.bernoulli(0.45)) {
      std::vector<std::size_t> busy;
      for (std::size_t v = 0; v < vms; ++v) {
        if (active[v] > 0) busy.push_back(v);
      }
      const std::size_t vm = busy[rng.next_u64() % busy.size()];
      balancer.notify_complete(vm);
      --active[vm];
      continue;
    }
    const auto vm = balancer.next();
    if (!vm) {
      if (std::any_of(active.begin(), active.end(), [](int a) { return a == 0; })) {
        return at_step(s, "queued while a VM was idle");
      }
      continue;
    }
    if (++active[*vm] > 1) return at_step(s, "VM " + std::to_string(*vm) + " holds two tasks");
  }
  return std::nullopt;
}

std::optional<std::string> esce_property(std::uint64_t seed, int steps) {
  RandomStream rng(seed);
  const std::size_t vms = 1 + rng.next_u64() % 8;
  EquallySpreadBalancer balancer(vms);
  std::vector<std::uint64_t> active(vms, 0);
  for (int s = 0; s < steps; ++s) {
    const bool any_busy = std::any_of(active.begin(), active.end(), [](auto a) { return a > 0; });
    if (any_busy && rng.bernoulli(0.4)) {
      std::vector<std::size_t> busy;
      for (std::size_t v = 0; v < vms; ++v) {
        if (active[v] > 0) busy.push_back(v);
      }
      const std::size_t vm = busy[rng.next_u64() % busy.size()];
      balancer.notify_complete(vm);
      --active[vm];
      continue;
    }
    const std::size_t vm = balancer.next();
    if (active[vm] != *std::min_element(active.begin(), active.end())) {
      return at_step(s, "VM " + std::to_string(vm) + " is not least loaded");
    }
    ++active[vm];
    if (balancer.allocations() != active) return at_step(s, "allocation ledger diverged");
  }
  return std::nullopt;
}

std::optional<std::string> round_robin_property(std::uint64_t seed, int steps) {
  RandomStream rng(seed);
  const std::size_t vms = 1 + rng.next_u64() % 8;
  RoundRobinBalancer balancer(vms);
  // Start the counting window at an arbitrary cursor position.
  const auto warmup = rng.next_u64() % 17;
  for (std::uint64_t i = 0; i < warmup; ++i) balancer.next();
  std::vector<int> counts(vms, 0);
  for (int s = 0; s < steps; ++s) {
    ++counts[balancer.next()];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (*hi - *lo > 1) return at_step(s, "assignment counts differ by more than one");
  }
  return std::nullopt;
}

ScenarioConfig tiny_scenario(std::uint32_t vm_count) {
  ScenarioConfig c;
  c.name = "tiny";
  c.delay_matrix = default_delay_matrix();
  c.bandwidth_matrix = default_bandwidth_matrix();
  UserBaseSpec ub;
  ub.name = "UB1";
  c.user_bases.push_back(ub);
  DataCenterSpec dc;
  dc.name = "DC1";
  dc.vm_count = vm_count;
  dc.hosts = default_hosts();
  c.data_centers.push_back(dc);
  return c;
}

RegionMatrix uniform_matrix(double value) {
  RegionMatrix m{};
  for (auto& row : m) row.fill(value);
  return m;
}

}  // namespace nimbus::testkit
