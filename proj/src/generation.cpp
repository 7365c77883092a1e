// SPDX-License-Identifier: Apache-2.0
#include "reshard/generation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reshard/planner.hpp"
#include "reshard/simulator.hpp"

namespace reshard {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::kStable: return "Stable";
    case Phase::kPrepare: return "Prepare";
    case Phase::kReady: return "Ready";
    case Phase::kSwitch: return "Switch";
    case Phase::kCleanup: return "Cleanup";
  }
  return "?";
}

const char* to_string(PrepTaskKind k) {
  switch (k) {
    case PrepTaskKind::kTcpBootstrap: return "tcp_bootstrap";
    case PrepTaskKind::kTopologyDiscovery: return "topology_discovery";
    case PrepTaskKind::kCommunicatorSetup: return "communicator_setup";
    case PrepTaskKind::kMockWarmup: return "mock_warmup";
    case PrepTaskKind::kPlanCompute: return "plan_compute";
  }
  return "?";
}

MockWarmupResult simulate_mock_warmup(int rank, bool cold, const CostModel& cm) {
  MockWarmupResult r;
  r.ledger.rank = rank;
  if (!cold) return r;  // warm ranks pay nothing
  r.duration_s = cm.warmup_s;
  // Model construction, parameter allocation and kernel autotuning issue
  // collectives; in mock mode every one returns locally.
  r.ledger.calls = {
      {"broadcast", 8ll << 20},
      {"all_reduce", 16ll << 20},
      {"all_reduce", 16ll << 20},
      {"all_gather", 4ll << 20},
      {"barrier", 0},
  };
  r.ledger.transport_bytes = 0;
  return r;
}

GenerationMachine::GenerationMachine(ParallelConfig initial, ModelSpec model,
                                     CostModel cost_model)
    : active_(std::move(initial)), model_(std::move(model)),
      cost_model_(std::move(cost_model)) {}

std::uint64_t GenerationMachine::last_checkpoint_iteration() const {
  std::uint64_t it = iteration();
  return it - it % static_cast<std::uint64_t>(checkpoint_interval_iters_);
}

void GenerationMachine::record(Phase to) {
  TransitionRecord r;
  r.t = now_;
  r.from = phase_;
  r.to = to;
  r.gen_active = active_.generation_id();
  if (shadow_) r.gen_shadow = shadow_->generation_id();
  r.pause_accrued_s = pause_accrued_s_;
  log_.push_back(r);
  phase_ = to;
}

void GenerationMachine::allocate(const std::string& what, std::int64_t bytes) {
  allocations_.push_back({what, bytes, false});
  allocation_live_ += bytes;
  allocation_peak_ = std::max(allocation_peak_, allocation_live_);
}

void GenerationMachine::release(const std::string& what) {
  for (auto it = allocations_.rbegin(); it != allocations_.rend(); ++it) {
    if (it->what == what && !it->released) {
      it->released = true;
      allocation_live_ -= it->bytes;
      return;
    }
  }
}

std::int64_t GenerationMachine::extra_allocation_bytes() const { return allocation_live_; }

void GenerationMachine::trigger_resize(const ParallelConfig& target,
                                       double warning_window_s) {
  if (phase_ != Phase::kStable) {
    queue_.push_back({target, warning_window_s});
    return;
  }
  if (target.generation_id() != active_.generation_id() + 1)
    throw std::invalid_argument("trigger_resize: target generation must be active+1");
  auto violations = validate_config(target, model_);
  if (!violations.empty())
    throw std::invalid_argument("trigger_resize: invalid target: " + violations.front());
  start_prepare(target, warning_window_s);
}

void GenerationMachine::start_prepare(const ParallelConfig& target,
                                      double warning_window_s) {
  shadow_ = target;
  last_fallback_.reset();
  prep_tasks_.clear();

  bool has_cold_joiners = false;
  for (int r : target.ranks())
    if (!active_.contains(r)) has_cold_joiners = true;

  const int w = target.world_size();
  const double bg = cost_model_.background_setup_factor;
  std::vector<std::pair<PrepTaskKind, double>> chain = {
      {PrepTaskKind::kTcpBootstrap, cost_model_.tcp_bootstrap_s},
      {PrepTaskKind::kTopologyDiscovery, bg * cost_model_.topology_discovery_s(w)},
      {PrepTaskKind::kCommunicatorSetup, bg * cost_model_.communicator_setup_s(w)},
  };
  if (has_cold_joiners) {
    // Surviving ranks keep their compiled kernels; only net-new ranks pay the
    // mock warmup, off the critical path.
    chain.push_back({PrepTaskKind::kMockWarmup, cost_model_.warmup_s});
  }
  chain.push_back({PrepTaskKind::kPlanCompute, cost_model_.plan_compute_s});

  double at = now_;
  prepare_total_s_ = 0;
  for (const auto& [kind, dur] : chain) {
    at += dur;
    prepare_total_s_ += dur;
    prep_tasks_.push_back({kind, dur, at, false});
  }
  prepare_started_ = now_;
  deadline_ = warning_window_s > 0 ? now_ + warning_window_s : 0;

  allocate("communicator_metadata", cost_model_.communicator_metadata_bytes);
  record(Phase::kPrepare);
}

void GenerationMachine::advance_iterations(double to) {
  double dt = to - now_;
  if (dt <= 0) {
    now_ = std::max(now_, to);
    return;
  }
  switch (phase_) {
    case Phase::kStable:
    case Phase::kReady: {
      double t_iter = cost_model_.iteration_time_s(active_, model_);
      iterations_ += dt / t_iter;
      break;
    }
    case Phase::kPrepare: {
      double t_iter = cost_model_.iteration_time_s(active_, model_) *
                      (1.0 + cost_model_.prepare_interference_factor);
      iterations_ += dt / t_iter;
      break;
    }
    case Phase::kSwitch:
      pause_accrued_s_ += dt;  // training is paused; iterations frozen
      break;
    case Phase::kCleanup:
      break;
  }
  now_ = to;
}

bool GenerationMachine::deadline_expired() const {
  return deadline_ > 0 && now_ >= deadline_ && phase_ != Phase::kStable;
}

void GenerationMachine::advance_to(double t) {
  if (t < now_) throw std::invalid_argument("advance_to: time moves backwards");

  int guard = 0;
  while (true) {
    if (++guard > 1000000) throw std::logic_error("advance_to: no progress");

    double next = t;
    enum class Milestone { kNone, kPrepDone, kBoundary, kSwitchEnd, kDeadline };
    Milestone m = Milestone::kNone;

    if (phase_ == Phase::kPrepare) {
      double pd = prepare_started_ + prepare_total_s_;
      if (pd <= next) {
        next = pd;
        m = Milestone::kPrepDone;
      }
    } else if (phase_ == Phase::kReady) {
      double t_iter = cost_model_.iteration_time_s(active_, model_);
      double frac = iterations_ - std::floor(iterations_);
      double tb = frac == 0 ? now_ : now_ + (1.0 - frac) * t_iter;
      if (tb <= next) {
        next = tb;
        m = Milestone::kBoundary;
      }
    } else if (phase_ == Phase::kSwitch) {
      if (switch_end_ <= next) {
        next = switch_end_;
        m = Milestone::kSwitchEnd;
      }
    }

    // An expired warning window before commit aborts the handoff.
    if (deadline_ > 0 && phase_ != Phase::kStable && deadline_ < next) {
      next = deadline_;
      m = Milestone::kDeadline;
    }

    advance_iterations(next);

    switch (m) {
      case Milestone::kNone:
        return;
      case Milestone::kPrepDone:
        for (auto& task : prep_tasks_)
          if (task.completes_at <= now_) task.completed = true;
        record(Phase::kReady);
        break;
      case Milestone::kBoundary:
        run_switch();
        break;
      case Milestone::kSwitchEnd: {
        atomic_switch();
        break;
      }
      case Milestone::kDeadline:
        abort_and_fallback(now_);
        break;
    }
  }
}

void GenerationMachine::run_switch() {
  // Consistent cut reached: in-flight work drained at the iteration
  // boundary; compute the transfer window and enter Switch.
  TransferPlan plan = compute_transfer_plan(active_, *shadow_, model_);
  double transfer_s = transfer_time_s(plan, cost_model_);

  SwitchStats stats;
  stats.trigger_t = prepare_started_;
  stats.prepare_s = prepare_total_s_;
  stats.switch_start = now_;
  stats.drain_s = cost_model_.drain_s;
  stats.transfer_s = transfer_s;
  stats.swap_s = cost_model_.swap_s;
  stats.pause_s = stats.drain_s + stats.transfer_s + stats.swap_s;
  stats.transfer_bytes = plan.total_bytes();
  stats.old_world = active_.world_size();
  stats.new_world = shadow_->world_size();
  {
    std::vector<int> u = active_.ranks();
    for (int r : shadow_->ranks())
      if (!active_.contains(r)) u.push_back(r);
    stats.union_world = static_cast<int>(u.size());
  }
  pending_switch_ = stats;
  switch_end_ = now_ + stats.pause_s;

  allocate("staging_buffer", cost_model_.staging_bytes);
  record(Phase::kSwitch);
  iterations_ = std::round(iterations_);  // exact boundary
}

void GenerationMachine::atomic_switch() {
  if (phase_ != Phase::kSwitch)
    throw std::logic_error("atomic_switch: not in Switch phase");
  if (now_ + 1e-12 < switch_end_)
    throw std::logic_error("atomic_switch: transfer not complete");

  // Pointer swap and metadata update; stale generation ids are rejected from
  // here on.
  active_ = *shadow_;
  shadow_.reset();
  last_switch_ = pending_switch_;
  pending_switch_.reset();
  deadline_ = 0;

  record(Phase::kCleanup);
  // Old-world reclamation is asynchronous and contributes no pause.
  release("staging_buffer");
  release("communicator_metadata");
  enter_stable_and_pop_queue();
}

void GenerationMachine::enter_stable_and_pop_queue() {
  record(Phase::kStable);
  if (!queue_.empty()) {
    Pending p = queue_.front();
    queue_.pop_front();
    // Rebase the queued target onto the new active generation.
    ParallelConfig target = p.target.with_generation(active_.generation_id() + 1);
    auto violations = validate_config(target, model_);
    if (violations.empty()) start_prepare(target, p.warning_window_s);
  }
}

GenerationMachine::LookupResult GenerationMachine::lookup(std::uint64_t gen) const {
  if (gen == active_.generation_id()) return LookupResult::kActive;
  if (gen < active_.generation_id()) return LookupResult::kStale;
  return LookupResult::kUnknown;
}

FallbackOutcome GenerationMachine::abort_and_fallback(double failure_time) {
  advance_iterations(std::max(failure_time, now_));

  FallbackOutcome out;
  out.recovery_mode = RecoveryMode::kCheckpointRestart;
  out.resume_iteration = last_checkpoint_iteration();
  for (const auto& task : prep_tasks_)
    if (task.completed || task.completes_at <= now_) out.reusable_prep.push_back(task.kind);

  // The active configuration's storage is untouched until the switch
  // commits, so recovery starts from a checkpoint <= the current iteration.
  shadow_.reset();
  pending_switch_.reset();
  prep_tasks_.clear();
  prepare_total_s_ = 0;
  deadline_ = 0;
  release("staging_buffer");
  release("communicator_metadata");
  if (phase_ != Phase::kStable) record(Phase::kStable);
  last_fallback_ = out;
  return out;
}

void GenerationMachine::shadow_rank_lost(int rank, const ParallelConfig& updated_target) {
  if (phase_ == Phase::kStable) return;
  bool in_shadow = shadow_ && shadow_->contains(rank);
  if (!in_shadow) return;

  // Cancel the pending handoff and restart preparation with the updated
  // target; the active world keeps training untouched.
  double remaining_window = deadline_ > 0 ? deadline_ - now_ : 0;
  shadow_.reset();
  pending_switch_.reset();
  prep_tasks_.clear();
  release("staging_buffer");
  release("communicator_metadata");
  record(Phase::kStable);
  ParallelConfig target = updated_target.with_generation(active_.generation_id() + 1);
  auto violations = validate_config(target, model_);
  if (!violations.empty())
    throw std::invalid_argument("shadow_rank_lost: invalid updated target: " +
                                violations.front());
  start_prepare(target, remaining_window);
}

void GenerationMachine::recover(const ParallelConfig& config, double t,
                                std::uint64_t resume_iteration) {
  if (t < now_) throw std::invalid_argument("recover: time moves backwards");
  ParallelConfig rebased = config.with_generation(active_.generation_id() + 1);
  now_ = t;
  iterations_ = static_cast<double>(resume_iteration);
  active_ = rebased;
  shadow_.reset();
  prep_tasks_.clear();
  deadline_ = 0;
  if (phase_ != Phase::kStable) record(Phase::kStable);
}

}  // namespace reshard
