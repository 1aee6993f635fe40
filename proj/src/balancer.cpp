#include "nimbus/balancer.hpp"

#include <algorithm>
#include <string>

#include "nimbus/errors.hpp"

namespace nimbus {

namespace {

void require_vms(std::size_t vm_count) {
  if (vm_count == 0) throw InvariantError("balancer needs at least one VM");
}

}  // namespace

RoundRobinBalancer::RoundRobinBalancer(std::size_t vm_count) : vm_count_(vm_count) { require_vms(vm_count); }

std::size_t RoundRobinBalancer::next() {
  const std::size_t vm = cursor_;
  cursor_ = (cursor_ + 1) % vm_count_;
  return vm;
}

EquallySpreadBalancer::EquallySpreadBalancer(std::size_t vm_count) : allocations_(vm_count, 0) {
  require_vms(vm_count);
}

std::size_t EquallySpreadBalancer::next() {
  // min_element returns the first minimum, i.e. the lowest id on ties.
  const auto it = std::min_element(allocations_.begin(), allocations_.end());
  ++*it;
  return static_cast<std::size_t>(it - allocations_.begin());
}

void EquallySpreadBalancer::notify_complete(std::size_t vm) {
  auto& count = allocations_.at(vm);
  if (count == 0) throw InvariantError("ESCE allocation below zero on VM " + std::to_string(vm));
  --count;
}

ThrottledBalancer::ThrottledBalancer(std::size_t vm_count) : available_(vm_count, true) { require_vms(vm_count); }

std::optional<std::size_t> ThrottledBalancer::next() {
  const auto it = std::find(available_.begin(), available_.end(), true);
  if (it == available_.end()) return std::nullopt;
  *it = false;
  ++busy_;
  return static_cast<std::size_t>(it - available_.begin());
}

void ThrottledBalancer::notify_complete(std::size_t vm) {
  if (available_.at(vm)) throw InvariantError("throttled release of idle VM " + std::to_string(vm));
  available_[vm] = true;
  --busy_;
}

namespace {

std::variant<RoundRobinBalancer, EquallySpreadBalancer, ThrottledBalancer> make_state(BalancerPolicy policy,
                                                                                       std::size_t vm_count) {
  switch (policy) {
    case BalancerPolicy::RoundRobin: return RoundRobinBalancer(vm_count);
    case BalancerPolicy::EquallySpread: return EquallySpreadBalancer(vm_count);
    case BalancerPolicy::Throttled: return ThrottledBalancer(vm_count);
  }
  throw InvariantError("unknown balancer policy");
}

}  // namespace

LoadBalancer::LoadBalancer(BalancerPolicy policy, std::size_t vm_count)
    : policy_(policy), state_(make_state(policy, vm_count)) {}

std::optional<std::size_t> LoadBalancer::select() {
  return std::visit([](auto& b) -> std::optional<std::size_t> { return b.next(); }, state_);
}

void LoadBalancer::notify_complete(std::size_t vm) {
  std::visit([vm](auto& b) { b.notify_complete(vm); }, state_);
}

}  // namespace nimbus
