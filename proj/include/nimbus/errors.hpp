#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nimbus {

/// One violated constraint in a scenario, located by its field path
/// (e.g. `user_bases[1].region`).
struct ValidationIssue {
  std::string path;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

/// Malformed or invalid scenario input. Maps to CLI exit status 1.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<ValidationIssue> issues);
  ScenarioError(std::string path, std::string message);

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// A VM set that cannot be placed on the configured hosts.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::string resource, const std::string& what)
      : std::runtime_error(what), resource_(std::move(resource)) {}

  const std::string& resource() const noexcept { return resource_; }

 private:
  std::string resource_;
};

/// Internal consistency breach inside a simulation run (an engine bug, never
/// a user error). Maps to CLI exit status 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nimbus
