#include "nimbus/datacenter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nimbus/errors.hpp"
#include "nimbus/metrics.hpp"

namespace nimbus {

namespace {

// Instructions per millisecond for a capacity in MIPS.
constexpr double kInstructionsPerMsPerMips = 1e3;

// A task is finished once its residual work would take less than this
// (absolute floor, or relative to the clock so it stays above its ulp).
constexpr Millis kCompletionSlackMs = 1e-9;
constexpr double kCompletionSlackRelative = 1e-13;

void require_capacity(const char* resource, double demand, double supply) {
  if (demand > supply) {
    throw CapacityError(resource, std::string("insufficient host ") + resource + ": VMs need " +
                                      format_exact(demand) + ", hosts provide " +
                                      format_exact(supply));
  }
}

}  // namespace

VmPlacement place_vms(const DataCenterSpec& spec) {
  if (spec.hosts.empty()) throw CapacityError("hosts", "data center has no hosts");
  if (spec.vm_count == 0) throw CapacityError("vm_count", "data center has no VMs");

  double memory = 0, storage = 0, bandwidth = 0;
  for (const auto& host : spec.hosts) {
    if (host.processor_count == 0 || !(host.processor_mips > 0)) {
      throw CapacityError("processors", "host has no processing capacity");
    }
    memory += host.memory_mb;
    storage += host.storage_mb;
    bandwidth += host.bandwidth_mbps;
  }
  const double vms = spec.vm_count;
  require_capacity("memory", vms * spec.vm_memory_mb, memory);
  require_capacity("storage", vms * spec.vm_image_size, storage);
  require_capacity("bandwidth", vms * spec.vm_bandwidth_mbps, bandwidth);

  VmPlacement placement;
  placement.vms_per_host.assign(spec.hosts.size(), 0);
  placement.host_of_vm.reserve(spec.vm_count);
  for (std::uint32_t vm = 0; vm < spec.vm_count; ++vm) {
    const std::size_t host = vm % spec.hosts.size();
    placement.host_of_vm.push_back(host);
    ++placement.vms_per_host[host];
  }

  placement.vm_mips.reserve(spec.vm_count);
  for (std::size_t host : placement.host_of_vm) {
    const HostSpec& h = spec.hosts[host];
    const double share = h.processor_mips * h.processor_count / placement.vms_per_host[host];
    if (spec.vm_mips > 0) {
      require_capacity("mips", spec.vm_mips, share);
      placement.vm_mips.push_back(spec.vm_mips);
    } else {
      placement.vm_mips.push_back(share);
    }
  }
  return placement;
}

Millis solo_duration_ms(double instructions, double mips) {
  return instructions / (mips * kInstructionsPerMsPerMips);
}

double VmState::rate_per_task() const noexcept {
  if (tasks_.empty()) return 0.0;
  return mips_ * kInstructionsPerMsPerMips / static_cast<double>(tasks_.size());
}

void VmState::advance(Millis now) {
  if (now < last_update_) {
    throw InvariantError("VM " + std::to_string(id_) + " advanced backwards in time");
  }
  const Millis elapsed = now - last_update_;
  if (elapsed > 0 && !tasks_.empty()) {
    const double rate = rate_per_task();
    const double work = rate * elapsed;
    // Overshoot allowed from rounding the projected completion onto the clock.
    const double tolerance = rate * std::max(kCompletionSlackMs, std::abs(now) * kCompletionSlackRelative);
    for (auto& task : tasks_) {
      task.remaining_instructions -= work;
      if (task.remaining_instructions < -tolerance) {
        throw InvariantError("negative remaining work on VM " + std::to_string(id_) + " (task " +
                             std::to_string(task.id) + ")");
      }
    }
    busy_ms_ += elapsed;
  }
  last_update_ = now;
}

void VmState::admit(TaskId id, double instructions, Millis now) {
  advance(now);
  tasks_.push_back(ActiveTask{id, instructions, instructions, now});
  ++version_;
}

std::optional<Millis> VmState::next_completion() const {
  if (tasks_.empty()) return std::nullopt;
  const auto least = std::min_element(tasks_.begin(), tasks_.end(), [](const auto& a, const auto& b) {
    return a.remaining_instructions < b.remaining_instructions;
  });
  const double remaining = std::max(0.0, least->remaining_instructions);
  return last_update_ + remaining / rate_per_task();
}

std::vector<ActiveTask> VmState::complete_due(Millis now) {
  advance(now);
  std::vector<ActiveTask> done;
  if (tasks_.empty()) return done;
  const double slack = rate_per_task() * std::max(kCompletionSlackMs, std::abs(now) * kCompletionSlackRelative);
  auto finished = [slack](const ActiveTask& t) { return t.remaining_instructions <= slack; };
  std::copy_if(tasks_.begin(), tasks_.end(), std::back_inserter(done), finished);
  if (!done.empty()) {
    std::erase_if(tasks_, finished);
    ++version_;
  }
  return done;
}

DataCenterState DataCenterState::build(std::size_t dc_id, const DataCenterSpec& spec) {
  const VmPlacement placement = place_vms(spec);
  DataCenterState dc;
  dc.dc_id = dc_id;
  dc.region = spec.region;
  dc.vms.reserve(placement.vm_mips.size());
  for (std::size_t vm = 0; vm < placement.vm_mips.size(); ++vm) {
    dc.vms.emplace_back(vm, placement.vm_mips[vm]);
  }
  return dc;
}

}  // namespace nimbus
