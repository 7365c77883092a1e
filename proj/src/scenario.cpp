// SPDX-License-Identifier: Apache-2.0
#include "reshard/scenario.hpp"

#include <algorithm>
#include <random>

namespace reshard {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kPlanned: return "planned";
    case EventKind::kPreemptionWarning: return "preemption_warning";
    case EventKind::kFailStop: return "fail_stop";
  }
  return "?";
}

std::vector<std::string> ElasticityScenario::validate() const {
  std::vector<std::string> v;
  if (duration_s < 0) v.push_back("duration_s must be >= 0");
  if (checkpoint_interval_iters < 1) v.push_back("checkpoint_interval_iters must be >= 1");
  double prev = -1;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.time_s <= prev)
      v.push_back("event " + std::to_string(i) + ": times must be strictly increasing");
    prev = e.time_s;
    if (e.time_s < 0 || e.time_s > duration_s)
      v.push_back("event " + std::to_string(i) + ": time outside [0, duration]");
    if (e.warning_window_s < 0)
      v.push_back("event " + std::to_string(i) + ": warning_window_s must be >= 0");
    if (e.kind == EventKind::kFailStop && e.warning_window_s != 0)
      v.push_back("event " + std::to_string(i) + ": fail_stop must have window 0");
    if (e.target.empty()) v.push_back("event " + std::to_string(i) + ": missing target");
  }
  return v;
}

std::vector<ScenarioEvent> expand_generator(const ScenarioGenerator& gen,
                                            double duration_s) {
  std::mt19937_64 rng(gen.seed);
  std::uniform_real_distribution<double> jitter(-gen.jitter_frac, gen.jitter_frac);

  std::vector<ScenarioEvent> events;
  events.reserve(gen.count);
  double floor_t = 0;
  for (int k = 0; k < gen.count; ++k) {
    double t = gen.start_s + k * gen.interval_s;
    if (gen.jitter_frac > 0) t += jitter(rng) * gen.interval_s;
    t = std::max(t, floor_t + 1.0);  // keep strictly increasing
    if (t >= duration_s) break;
    floor_t = t;

    ScenarioEvent e;
    e.time_s = t;
    bool fail = std::find(gen.fail_stop_indices.begin(), gen.fail_stop_indices.end(), k) !=
                gen.fail_stop_indices.end();
    e.kind = fail ? EventKind::kFailStop : EventKind::kPreemptionWarning;
    e.warning_window_s = fail ? 0 : gen.warning_window_s;
    if (!gen.targets.empty()) e.target = gen.targets[k % gen.targets.size()];
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace reshard
