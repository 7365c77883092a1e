// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "reshard/cost_model.hpp"
#include "reshard/model_spec.hpp"
#include "reshard/parallel_config.hpp"

namespace reshard {

enum class Phase { kStable, kPrepare, kReady, kSwitch, kCleanup };

const char* to_string(Phase p);

enum class PrepTaskKind {
  kTcpBootstrap,
  kTopologyDiscovery,
  kCommunicatorSetup,
  kMockWarmup,
  kPlanCompute
};

const char* to_string(PrepTaskKind k);

struct PrepTask {
  PrepTaskKind kind;
  double duration_s = 0;
  double completes_at = 0;
  bool completed = false;
};

struct MockCall {
  std::string name;
  std::int64_t payload_bytes = 0;
};

/// Intercepted collective calls recorded while a cold rank warms up in
/// isolation. transport_bytes stays zero: every call returns locally.
struct MockCollectiveLedger {
  int rank = -1;
  std::vector<MockCall> calls;
  std::int64_t transport_bytes = 0;
};

struct MockWarmupResult {
  double duration_s = 0;
  MockCollectiveLedger ledger;
};

/// Local-only warmup of one rank. Warm ranks pay nothing; cold ranks pay the
/// cost model's warmup constant. Never touches a transport.
MockWarmupResult simulate_mock_warmup(int rank, bool cold, const CostModel& cm);

struct TransitionRecord {
  double t = 0;
  Phase from = Phase::kStable;
  Phase to = Phase::kStable;
  std::uint64_t gen_active = 0;
  std::optional<std::uint64_t> gen_shadow;
  double pause_accrued_s = 0;
};

enum class RecoveryMode { kCheckpointRestart };

struct FallbackOutcome {
  RecoveryMode recovery_mode = RecoveryMode::kCheckpointRestart;
  std::uint64_t resume_iteration = 0;
  std::vector<PrepTaskKind> reusable_prep;  // completed tasks, reusable on recovery
};

/// Breakdown of one completed handoff, for the simulator.
struct SwitchStats {
  double trigger_t = 0;
  double prepare_s = 0;       // overlapped with training
  double switch_start = 0;    // iteration boundary where the pause begins
  double drain_s = 0;
  double transfer_s = 0;
  double swap_s = 0;
  double pause_s = 0;
  std::int64_t transfer_bytes = 0;
  int old_world = 0;
  int new_world = 0;
  int union_world = 0;
};

struct AllocationRecord {
  std::string what;
  std::int64_t bytes = 0;
  bool released = false;
};

/// The dual-world lifecycle: Stable -> Prepare -> Ready -> Switch -> Cleanup
/// -> Stable, with abort edges back to Stable. One serialized mutator; at
/// most two generations exist at any instant; training pause accrues only
/// inside Switch.
class GenerationMachine {
 public:
  GenerationMachine(ParallelConfig initial, ModelSpec model, CostModel cost_model);

  Phase phase() const { return phase_; }
  const ParallelConfig& active() const { return active_; }
  const std::optional<ParallelConfig>& shadow() const { return shadow_; }
  double now() const { return now_; }
  std::uint64_t iteration() const { return static_cast<std::uint64_t>(iterations_); }
  double pause_accrued_s() const { return pause_accrued_s_; }
  std::uint64_t last_checkpoint_iteration() const;
  std::size_t queued_events() const { return queue_.size(); }
  int checkpoint_interval_iters() const { return checkpoint_interval_iters_; }
  void set_checkpoint_interval_iters(int n) { checkpoint_interval_iters_ = n; }

  /// Requests a transition to `target` (generation must be active+1 when the
  /// machine is Stable). While a handoff is in flight the request is queued
  /// FIFO and processed after return to Stable. warning_window_s <= 0 means
  /// no deadline.
  void trigger_resize(const ParallelConfig& target, double warning_window_s);

  /// Drives the machine forward to absolute time t: completes due prep
  /// tasks, enters Ready, switches at the next iteration boundary, cleans
  /// up, pops queued events. Deadline breaches abort into fallback.
  void advance_to(double t);

  /// Commit step: redirects all routing to the shadow generation. Requires
  /// phase == Switch with the transfer window fully elapsed; advance_to
  /// invokes this at the right instant.
  void atomic_switch();

  enum class LookupResult { kActive, kStale, kUnknown };
  LookupResult lookup(std::uint64_t generation_id) const;

  /// Fail-stop before the switch committed: cancels the handoff. The active
  /// configuration is untouched and consistent; recovery resumes from the
  /// last durable checkpoint with completed prep marked reusable.
  FallbackOutcome abort_and_fallback(double failure_time);

  /// A shadow rank died before commit: cancel and restart preparation with
  /// the updated target. The active world is unaffected.
  void shadow_rank_lost(int rank, const ParallelConfig& updated_target);

  /// Installs the post-recovery world after a checkpoint restart (driven by
  /// the simulator's fallback path).
  void recover(const ParallelConfig& config, double t, std::uint64_t resume_iteration);

  const std::vector<TransitionRecord>& transition_log() const { return log_; }
  const std::vector<AllocationRecord>& allocation_ledger() const { return allocations_; }
  std::int64_t extra_allocation_bytes() const;  // currently live extra memory
  std::int64_t extra_allocation_peak() const { return allocation_peak_; }

  const std::optional<SwitchStats>& last_switch() const { return last_switch_; }
  const std::optional<FallbackOutcome>& last_fallback() const { return last_fallback_; }
  bool deadline_expired() const;

  /// Prepared-handoff latency pieces for the pending shadow, if any.
  double prepare_duration_s() const { return prepare_total_s_; }

 private:
  struct Pending {
    ParallelConfig target;
    double warning_window_s = 0;
  };

  void record(Phase to);
  void start_prepare(const ParallelConfig& target, double warning_window_s);
  void run_switch();
  void enter_stable_and_pop_queue();
  void advance_iterations(double to);
  void allocate(const std::string& what, std::int64_t bytes);
  void release(const std::string& what);

  ParallelConfig active_;
  std::optional<ParallelConfig> shadow_;
  ModelSpec model_;
  CostModel cost_model_;

  Phase phase_ = Phase::kStable;
  double now_ = 0;
  double iterations_ = 0;  // continuous; iteration() floors
  int checkpoint_interval_iters_ = 100;
  double pause_accrued_s_ = 0;

  std::vector<PrepTask> prep_tasks_;
  double prepare_total_s_ = 0;
  double prepare_started_ = 0;
  double deadline_ = 0;  // 0 = none
  double switch_end_ = 0;
  std::optional<SwitchStats> pending_switch_;
  std::deque<Pending> queue_;

  std::vector<TransitionRecord> log_;
  std::vector<AllocationRecord> allocations_;
  std::int64_t allocation_live_ = 0;
  std::int64_t allocation_peak_ = 0;
  std::optional<SwitchStats> last_switch_;
  std::optional<FallbackOutcome> last_fallback_;
};

}  // namespace reshard
