#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "nimbus/scenario.hpp"

namespace nimbus {

/// Cyclic assignment over the VM list. Never queues.
class RoundRobinBalancer {
 public:
  explicit RoundRobinBalancer(std::size_t vm_count);

  std::size_t next();
  void notify_complete(std::size_t /*vm*/) {}

  std::size_t cursor() const noexcept { return cursor_; }
  std::size_t vm_count() const noexcept { return vm_count_; }

 private:
  std::size_t vm_count_;
  std::size_t cursor_ = 0;
};

/// Equally Spread Current Execution: picks the VM with the fewest allocated
/// tasks (lowest id on ties) from its own allocation ledger. Never queues.
class EquallySpreadBalancer {
 public:
  explicit EquallySpreadBalancer(std::size_t vm_count);

  std::size_t next();
  /// Throws InvariantError if the VM has no outstanding allocation.
  void notify_complete(std::size_t vm);

  const std::vector<std::uint64_t>& allocations() const noexcept { return allocations_; }

 private:
  std::vector<std::uint64_t> allocations_;
};

/// At most one active task per VM. Returns the lowest-id available VM, or
/// nullopt when all are busy (the data center then queues the task).
class ThrottledBalancer {
 public:
  explicit ThrottledBalancer(std::size_t vm_count);

  std::optional<std::size_t> next();
  /// Throws InvariantError if the VM was not busy.
  void notify_complete(std::size_t vm);

  bool available(std::size_t vm) const { return available_.at(vm); }
  std::size_t busy_count() const noexcept { return busy_; }

 private:
  std::vector<bool> available_;
  std::size_t busy_ = 0;
};

/// Policy-selected balancer behind one dispatch interface.
class LoadBalancer {
 public:
  LoadBalancer(BalancerPolicy policy, std::size_t vm_count);

  BalancerPolicy policy() const noexcept { return policy_; }

  /// VM for the next task, or nullopt if the task must wait.
  std::optional<std::size_t> select();
  void notify_complete(std::size_t vm);

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&state_);
  }

 private:
  BalancerPolicy policy_;
  std::variant<RoundRobinBalancer, EquallySpreadBalancer, ThrottledBalancer> state_;
};

}  // namespace nimbus
