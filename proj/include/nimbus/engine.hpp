#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "nimbus/balancer.hpp"
#include "nimbus/broker.hpp"
#include "nimbus/datacenter.hpp"
#include "nimbus/internet.hpp"
#include "nimbus/metrics.hpp"
#include "nimbus/random.hpp"
#include "nimbus/scenario.hpp"
#include "nimbus/traffic.hpp"
#include "nimbus/units.hpp"

namespace nimbus {

enum class EventKind : std::uint8_t { ScheduleBatch, BatchArrivesAtDc, TaskCompletes, ResponseDelivered, HourBoundary };

std::string_view to_string(EventKind kind);

struct Event {
  Millis time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::HourBoundary;
  /// ScheduleBatch: user base. BatchArrivesAtDc / ResponseDelivered: request.
  /// TaskCompletes: VM. HourBoundary: hour index.
  std::size_t subject = 0;
  std::size_t dc = 0;
  /// TaskCompletes: VM schedule version the projection was made against.
  std::uint64_t version = 0;
  /// BatchArrivesAtDc re-offered from the DC waiting queue.
  bool requeued = false;
};

/// Future event list ordered by (time, seq). push stamps a fresh sequence
/// number, so equal-time events pop in insertion order.
class EventQueue {
 public:
  const Event& push(Event event);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Lifecycle record of one batch.
struct Request {
  RequestBatch batch;
  std::size_t dc = 0;
  std::size_t vm = 0;
  Millis sent_at = 0;
  std::optional<Millis> arrived_dc_at;
  std::optional<Millis> processing_done_at;
  std::optional<Millis> delivered_at;
  std::uint64_t uplink_bytes = 0;
  std::uint64_t downlink_bytes = 0;
};

/// Single-threaded discrete-event simulation of one scenario.
///
/// Batch lifecycle: created by its user base's generator, routed by the
/// broker, carried over the uplink, dispatched by the DC's balancer (or
/// queued), executed under processor sharing, carried back over the downlink.
/// New traffic stops at the nominal duration; in-flight work then drains for
/// at most one further hour.
class Engine {
 public:
  using Observer = std::function<void(const Event&, const Engine&)>;

  explicit Engine(ValidatedScenario scenario);

  /// Processes events until finished and summarizes.
  SimulationReport run();

  /// Processes the next event, or returns nullopt when the run is over.
  std::optional<Event> step();
  bool finished() const;

  SimulationReport summarize() const;

  Millis now() const noexcept { return now_; }
  Millis cutoff() const noexcept { return cutoff_; }
  int current_hour() const noexcept { return current_hour_; }
  /// Request rate (per ms) of a user base for the hour the clock is in.
  double current_request_rate(std::size_t ub) const;

  const ScenarioConfig& config() const noexcept { return scenario_.config(); }
  const std::vector<Request>& requests() const noexcept { return requests_; }
  const DataCenterState& data_center(std::size_t dc) const { return dcs_.at(dc); }
  const LoadBalancer& balancer(std::size_t dc) const { return balancers_.at(dc); }
  const ChannelLoad& channel_load() const noexcept { return load_; }
  const RunCounters& counters() const noexcept { return counters_; }

  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  void schedule(Event event);
  void on_schedule_batch(const Event& e);
  void on_batch_arrives(const Event& e);
  void on_task_completes(const Event& e);
  void on_response_delivered(const Event& e);

  void dispatch(std::size_t dc, std::size_t request, bool front_of_queue);
  void project_completion(std::size_t dc, std::size_t vm);
  void check_vm_invariants(std::size_t dc, std::size_t vm) const;

  ValidatedScenario scenario_;
  RandomStream rng_;
  InternetModel internet_;
  ChannelLoad load_;
  ServiceBroker broker_;
  std::vector<TrafficGenerator> generators_;
  std::vector<std::optional<RequestBatch>> pending_;
  std::vector<DataCenterState> dcs_;
  std::vector<LoadBalancer> balancers_;
  MetricsRecorder metrics_;
  EventQueue queue_;
  std::vector<Request> requests_;
  std::vector<std::uint64_t> generated_per_ub_;
  RunCounters counters_;
  Millis now_ = 0;
  Millis cutoff_ = 0;
  int current_hour_ = 0;
  double wall_time_ms_ = 0;
  Observer observer_;
};

/// Convenience: Engine(scenario).run().
SimulationReport run(const ValidatedScenario& scenario);

}  // namespace nimbus
