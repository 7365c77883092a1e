// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reshard {

enum class EventKind { kPlanned, kPreemptionWarning, kFailStop };

const char* to_string(EventKind k);

struct ScenarioEvent {
  double time_s = 0;
  EventKind kind = EventKind::kPlanned;
  double warning_window_s = 0;  // 0 for fail_stop; <= 0 means unbounded for planned
  std::string target;           // named ParallelConfig
};

/// Compact form expanded deterministically into an event list.
struct ScenarioGenerator {
  int count = 0;
  double start_s = 0;
  double interval_s = 0;
  double jitter_frac = 0;  // event k lands at start + k*interval +- U(jitter)*interval
  double warning_window_s = 120;
  std::vector<std::string> targets;       // cycled in order
  std::vector<int> fail_stop_indices;     // events forced to fail_stop
  std::uint64_t seed = 0;
};

struct ElasticityScenario {
  std::string regime;  // volatility label: low / medium / high / custom
  double duration_s = 0;
  int checkpoint_interval_iters = 100;
  std::uint64_t seed = 0;
  std::vector<ScenarioEvent> events;  // strictly increasing times

  std::vector<std::string> validate() const;
};

/// Expands the compact form; times are strictly increasing and clipped to
/// the open interval (0, duration).
std::vector<ScenarioEvent> expand_generator(const ScenarioGenerator& gen,
                                            double duration_s);

}  // namespace reshard
