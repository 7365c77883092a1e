// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "reshard/shard_view.hpp"

namespace reshard {

/// One peer-to-peer byte movement. Bounds are in global tensor coordinates
/// and lie inside both the source's old view and the destination's new view.
/// Tasks with src_rank == dst_rank are local copies (the local byte layout
/// changed); they never touch the transport.
struct TransferTask {
  std::uint32_t tensor_index = 0;  // index into TransferPlan::tensor_ids
  int layer = 0;
  int src_rank = 0;
  int dst_rank = 0;
  ShardView bounds;
  std::int64_t byte_size = 0;

  bool is_local() const { return src_rank == dst_rank; }
};

/// A destination region whose bytes are already resident on the rank with an
/// unchanged local layout: no copy, no transport. Kept in the plan so the
/// executor and the completeness check know the region is satisfied.
struct CarryoverRegion {
  std::uint32_t tensor_index = 0;
  int layer = 0;
  int rank = 0;
  ShardView bounds;
  std::int64_t byte_size = 0;
};

struct LinkKey {
  int src = 0;
  int dst = 0;
  bool operator<(const LinkKey& o) const {
    return src != o.src ? src < o.src : dst < o.dst;
  }
  bool operator==(const LinkKey&) const = default;
};

class TransferPlan {
 public:
  std::uint64_t src_config_gen = 0;
  std::uint64_t dst_config_gen = 0;
  std::vector<std::string> tensor_ids;
  // Layer -> tasks, ascending layer order; tasks within a layer reference
  // only that layer's tensors.
  std::map<int, std::vector<TransferTask>> tasks_by_layer;
  std::map<int, std::vector<CarryoverRegion>> carryover_by_layer;

  std::int64_t total_bytes() const;
  std::int64_t task_count() const;
  /// Transport traffic per (src, dst) pair; local tasks are excluded.
  std::map<LinkKey, std::int64_t> per_link_bytes() const;

  bool empty() const;

  const std::string& tensor_id(std::uint32_t index) const {
    return tensor_ids.at(index);
  }
};

struct PlanCostSummary {
  std::int64_t total_bytes = 0;
  std::int64_t max_link_bytes = 0;
  std::int64_t task_count = 0;
};

PlanCostSummary plan_cost_summary(const TransferPlan& plan);

/// Line-oriented text record per task, stable ordering, for golden-file
/// diffing. Round-trips through read_plan.
void write_plan(std::ostream& os, const TransferPlan& plan);
TransferPlan read_plan(std::istream& is);

}  // namespace reshard
