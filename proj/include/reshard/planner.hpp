// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reshard/model_spec.hpp"
#include "reshard/parallel_config.hpp"
#include "reshard/transfer_plan.hpp"

namespace reshard {

struct PlanOptions {
  // Spread broadcast-like reads over equivalent DP source replicas instead of
  // always picking the lowest dp_index. Default off: deterministic golden
  // plans first.
  bool balance_sources = false;
};

struct PlannerStats {
  // (destination, candidate source block) pairs examined; the scalability
  // guard asserts this grows linearly, not quadratically, in rank count.
  std::int64_t pairs_checked = 0;
};

/// Computes the minimal layer-grouped peer-to-peer transfer plan between two
/// configurations. Metadata only; no tensor data is touched.
///
/// For every destination rank the new view is tiled exactly once. Regions a
/// rank already holds with an unchanged local layout become carryovers;
/// regions it holds under a different layout become local-copy tasks
/// (src == dst); everything else is sourced from the replica with the lowest
/// dp_index (then lowest rank id).
TransferPlan compute_transfer_plan(const ParallelConfig& c_old,
                                   const ParallelConfig& c_new, const ModelSpec& model,
                                   const PlanOptions& options = {},
                                   PlannerStats* stats = nullptr);

/// Brute-force plan oracle: enumerates every index tuple of every tensor and
/// confirms (a) each destination index is covered exactly once by an inbound
/// task or carryover, (b) each task lies inside its source's old view,
/// (c) no task is empty. O(total elements); intended for small instances.
std::vector<std::string> verify_plan(const TransferPlan& plan,
                                     const ParallelConfig& c_old,
                                     const ParallelConfig& c_new,
                                     const ModelSpec& model);

}  // namespace reshard
