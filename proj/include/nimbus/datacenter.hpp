#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "nimbus/scenario.hpp"
#include "nimbus/units.hpp"

namespace nimbus {

using TaskId = std::uint64_t;

/// VM-to-host assignment and the resulting per-VM capacity.
struct VmPlacement {
  std::vector<std::size_t> host_of_vm;
  std::vector<double> vm_mips;
  std::vector<std::uint32_t> vms_per_host;
};

/// Assigns VMs round-robin across hosts. A VM's capacity is its host's total
/// MIPS divided equally among the VMs on that host (or spec.vm_mips when set,
/// which may not exceed that share). Throws CapacityError naming the binding
/// resource when aggregate VM demand exceeds aggregate host supply.
VmPlacement place_vms(const DataCenterSpec& spec);

struct ActiveTask {
  TaskId id = 0;
  double total_instructions = 0;
  double remaining_instructions = 0;
  Millis admitted_at = 0;
};

/// One time-shared VM. Active tasks progress at mips / n each (processor
/// sharing); progress is settled lazily on every admit and completion.
class VmState {
 public:
  VmState(std::size_t id, double mips) : id_(id), mips_(mips) {}

  std::size_t id() const noexcept { return id_; }
  double mips() const noexcept { return mips_; }
  std::size_t active_count() const noexcept { return tasks_.size(); }
  bool idle() const noexcept { return tasks_.empty(); }
  const std::vector<ActiveTask>& tasks() const noexcept { return tasks_; }

  /// Bumped on every schedule change; completion events carry it so stale
  /// projections can be discarded.
  std::uint64_t version() const noexcept { return version_; }

  /// Instructions per millisecond granted to each active task right now.
  double rate_per_task() const noexcept;

  Millis cumulative_busy_ms() const noexcept { return busy_ms_; }

  /// Settles progress up to now. Throws InvariantError if now moves backwards.
  void advance(Millis now);

  void admit(TaskId id, double instructions, Millis now);

  /// Projected time the next task finishes under the current task set.
  std::optional<Millis> next_completion() const;

  /// Settles progress to now and removes every task whose work is done.
  std::vector<ActiveTask> complete_due(Millis now);

 private:
  std::size_t id_;
  double mips_;
  std::vector<ActiveTask> tasks_;
  Millis last_update_ = 0;
  Millis busy_ms_ = 0;
  std::uint64_t version_ = 0;
};

/// Solo service time of `instructions` on a VM of `mips` capacity.
Millis solo_duration_ms(double instructions, double mips);

struct QueuedTask {
  TaskId id = 0;
  double instructions = 0;
};

struct DataCenterState {
  std::size_t dc_id = 0;
  RegionIndex region = 0;
  std::vector<VmState> vms;
  std::deque<QueuedTask> waiting_queue;

  static DataCenterState build(std::size_t dc_id, const DataCenterSpec& spec);
};

}  // namespace nimbus
