#include "nimbus/engine.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "nimbus/errors.hpp"

namespace nimbus {

namespace {

constexpr Millis kDrainWindow = kMsPerHour;

std::vector<RegionIndex> dc_regions(const ScenarioConfig& c) {
  std::vector<RegionIndex> regions;
  for (const auto& dc : c.data_centers) regions.push_back(dc.region);
  return regions;
}

std::vector<std::string> ub_names(const ScenarioConfig& c) {
  std::vector<std::string> names;
  for (const auto& ub : c.user_bases) names.push_back(ub.name);
  return names;
}

std::vector<std::string> dc_names(const ScenarioConfig& c) {
  std::vector<std::string> names;
  for (const auto& dc : c.data_centers) names.push_back(dc.name);
  return names;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ScheduleBatch: return "schedule_batch";
    case EventKind::BatchArrivesAtDc: return "batch_arrives_at_dc";
    case EventKind::TaskCompletes: return "task_completes";
    case EventKind::ResponseDelivered: return "response_delivered";
    case EventKind::HourBoundary: return "hour_boundary";
  }
  return "?";
}

const Event& EventQueue::push(Event event) {
  event.seq = next_seq_++;
  heap_.push(event);
  return heap_.top();
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

// ---------------------------------------------------------------------------

Engine::Engine(ValidatedScenario scenario)
    : scenario_(std::move(scenario)),
      rng_(scenario_->seed),
      internet_(DelayMatrix(scenario_->delay_matrix), BandwidthMatrix(scenario_->bandwidth_matrix)),
      broker_(scenario_->broker_policy, dc_regions(scenario_.config()), DelayMatrix(scenario_->delay_matrix)),
      metrics_(ub_names(scenario_.config()), dc_names(scenario_.config())) {
  const ScenarioConfig& c = scenario_.config();
  cutoff_ = c.duration_hours * kMsPerHour + kDrainWindow;

  for (std::size_t dc = 0; dc < c.data_centers.size(); ++dc) {
    dcs_.push_back(DataCenterState::build(dc, c.data_centers[dc]));
    balancers_.emplace_back(c.balancer_policy, dcs_.back().vms.size());
  }

  for (int h = 1; h < c.duration_hours; ++h) {
    schedule(Event{.time = h * kMsPerHour, .kind = EventKind::HourBoundary, .subject = static_cast<std::size_t>(h)});
  }

  generated_per_ub_.assign(c.user_bases.size(), 0);
  pending_.resize(c.user_bases.size());
  for (std::size_t ub = 0; ub < c.user_bases.size(); ++ub) {
    generators_.emplace_back(ub, c.user_bases[ub], c.sim_params, c.duration_hours);
    pending_[ub] = generators_.back().schedule_next_batch(0.0, rng_);
    if (pending_[ub]) schedule(Event{.time = pending_[ub]->created_at, .kind = EventKind::ScheduleBatch, .subject = ub});
  }
}

double Engine::current_request_rate(std::size_t ub) const {
  return generators_.at(ub).request_rate_per_ms(current_hour_ * kMsPerHour);
}

void Engine::schedule(Event event) {
  if (event.time < now_) {
    throw InvariantError(std::string("event ") + std::string(to_string(event.kind)) + " scheduled into the past");
  }
  queue_.push(event);
}

bool Engine::finished() const { return queue_.empty() || queue_.top().time > cutoff_; }

std::optional<Event> Engine::step() {
  if (finished()) return std::nullopt;
  const Event e = queue_.pop();
  if (e.time < now_) throw InvariantError("event popped out of order");
  now_ = e.time;
  switch (e.kind) {
    case EventKind::ScheduleBatch: on_schedule_batch(e); break;
    case EventKind::BatchArrivesAtDc: on_batch_arrives(e); break;
    case EventKind::TaskCompletes: on_task_completes(e); break;
    case EventKind::ResponseDelivered: on_response_delivered(e); break;
    case EventKind::HourBoundary: current_hour_ = static_cast<int>(e.subject); break;
  }
  ++counters_.events_processed;
  if (observer_) observer_(e, *this);
  return e;
}

SimulationReport Engine::run() {
  const auto start = std::chrono::steady_clock::now();
  while (step()) {
  }
  wall_time_ms_ = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return summarize();
}

SimulationReport Engine::summarize() const {
  RunCounters counters = counters_;
  counters.batches_in_flight_at_cutoff = counters.batches_generated - counters.batches_delivered;
  if (counters.batches_in_flight_at_cutoff == 0 && !load_.idle()) {
    throw InvariantError("channel load unbalanced after all transfers completed");
  }
  SimulationReport report = metrics_.summarize(scenario_.config(), counters, generated_per_ub_);
  report.meta.wall_time_ms = wall_time_ms_;
  return report;
}

void Engine::on_schedule_batch(const Event& e) {
  const std::size_t ub = e.subject;
  if (!pending_[ub]) throw InvariantError("batch event without a pending batch");
  const RequestBatch batch = *pending_[ub];
  const ScenarioConfig& c = scenario_.config();
  const RegionIndex src = c.user_bases[ub].region;

  Request req;
  req.batch = batch;
  req.sent_at = now_;
  req.uplink_bytes = batch.request_size_bytes;
  req.downlink_bytes = batch.response_size_bytes;
  req.dc = broker_.select(src, rng_);
  const RegionIndex dst = dcs_[req.dc].region;

  load_.begin_transfer(src, dst);
  const Millis uplink = internet_.transfer_time(src, dst, req.uplink_bytes, load_, rng_);
  const std::size_t id = requests_.size();
  requests_.push_back(req);
  ++counters_.batches_generated;
  counters_.requests_generated += batch.group_size;
  generated_per_ub_[ub] += batch.group_size;
  schedule(Event{.time = now_ + uplink, .kind = EventKind::BatchArrivesAtDc, .subject = id, .dc = req.dc});

  pending_[ub] = generators_[ub].schedule_next_batch(now_, rng_);
  if (pending_[ub]) schedule(Event{.time = pending_[ub]->created_at, .kind = EventKind::ScheduleBatch, .subject = ub});
}

void Engine::on_batch_arrives(const Event& e) {
  Request& req = requests_[e.subject];
  if (!e.requeued) {
    load_.end_transfer(scenario_->user_bases[req.batch.ub_id].region, dcs_[req.dc].region);
    req.arrived_dc_at = now_;
  }
  dispatch(req.dc, e.subject, e.requeued);
}

void Engine::dispatch(std::size_t dc, std::size_t request, bool front_of_queue) {
  DataCenterState& state = dcs_[dc];
  const auto vm = balancers_[dc].select();
  const Request& req = requests_[request];
  const double instructions =
      static_cast<double>(req.batch.group_size) * scenario_->sim_params.instruction_length_per_request;
  if (!vm) {
    QueuedTask task{request, instructions};
    if (front_of_queue) {
      state.waiting_queue.push_front(task);
    } else {
      state.waiting_queue.push_back(task);
    }
    return;
  }
  requests_[request].vm = *vm;
  state.vms[*vm].admit(request, instructions, now_);
  check_vm_invariants(dc, *vm);
  project_completion(dc, *vm);
}

void Engine::project_completion(std::size_t dc, std::size_t vm) {
  const VmState& state = dcs_[dc].vms[vm];
  if (const auto at = state.next_completion()) {
    schedule(Event{.time = std::max(*at, now_), .kind = EventKind::TaskCompletes, .subject = vm, .dc = dc,
                   .version = state.version()});
  }
}

void Engine::check_vm_invariants(std::size_t dc, std::size_t vm) const {
  const VmState& state = dcs_[dc].vms[vm];
  const LoadBalancer& balancer = balancers_[dc];
  if (const auto* throttled = balancer.as<ThrottledBalancer>()) {
    if (state.active_count() > 1) throw InvariantError("throttled VM holds more than one task");
    if (throttled->available(vm) != state.idle()) throw InvariantError("throttled availability out of sync");
  } else if (const auto* esce = balancer.as<EquallySpreadBalancer>()) {
    if (esce->allocations()[vm] != state.active_count()) throw InvariantError("ESCE ledger out of sync");
  }
}

void Engine::on_task_completes(const Event& e) {
  const std::size_t dc = e.dc;
  const std::size_t vm = e.subject;
  VmState& state = dcs_[dc].vms[vm];
  if (e.version != state.version()) return;  // superseded projection

  const auto done = state.complete_due(now_);
  const ScenarioConfig& c = scenario_.config();
  for (const ActiveTask& task : done) {
    Request& req = requests_[task.id];
    req.processing_done_at = now_;
    metrics_.record_processing(dc, *req.arrived_dc_at, now_, req.batch.group_size);
    balancers_[dc].notify_complete(vm);

    const RegionIndex src = dcs_[dc].region;
    const RegionIndex dst = c.user_bases[req.batch.ub_id].region;
    load_.begin_transfer(src, dst);
    const Millis downlink = internet_.transfer_time(src, dst, req.downlink_bytes, load_, rng_);
    schedule(Event{.time = now_ + downlink, .kind = EventKind::ResponseDelivered, .subject = task.id, .dc = dc});
  }
  check_vm_invariants(dc, vm);
  project_completion(dc, vm);

  auto& waiting = dcs_[dc].waiting_queue;
  for (std::size_t freed = 0; freed < done.size() && !waiting.empty(); ++freed) {
    const QueuedTask next = waiting.front();
    waiting.pop_front();
    schedule(Event{.time = now_, .kind = EventKind::BatchArrivesAtDc, .subject = next.id, .dc = dc, .requeued = true});
  }
}

void Engine::on_response_delivered(const Event& e) {
  Request& req = requests_[e.subject];
  const RegionIndex ub_region = scenario_->user_bases[req.batch.ub_id].region;
  load_.end_transfer(dcs_[req.dc].region, ub_region);
  req.delivered_at = now_;
  if (!(req.sent_at <= *req.arrived_dc_at && *req.arrived_dc_at <= *req.processing_done_at &&
        *req.processing_done_at <= now_)) {
    throw InvariantError("request timestamps out of order");
  }
  metrics_.record_response(req.batch.ub_id, req.sent_at, now_, req.batch.group_size);
  metrics_.record_transfer_bytes(req.dc, req.uplink_bytes + req.downlink_bytes);
  broker_.record_response(req.dc, now_ - req.sent_at);
  ++counters_.batches_delivered;
  counters_.requests_delivered += req.batch.group_size;
}

SimulationReport run(const ValidatedScenario& scenario) { return Engine(scenario).run(); }

}  // namespace nimbus
