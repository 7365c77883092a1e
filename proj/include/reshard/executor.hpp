// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reshard/shard_store.hpp"
#include "reshard/transfer_plan.hpp"
#include "reshard/transport.hpp"

namespace reshard {

struct ExecutionReport {
  bool ok = false;
  std::string error;
  std::optional<int> failed_layer;
  std::int64_t peak_staging_bytes = 0;  // per-rank high-water mark, max over ranks
  std::int64_t bytes_moved = 0;         // transport bytes; local copies excluded
  std::int64_t local_copy_bytes = 0;
  int layers_processed = 0;
};

/// Extracts the row-major bytes of the sub-hyper-rectangle `global_bounds`
/// from a buffer laid out as `owner_view`. Throws on bounds escape or size
/// mismatch.
std::vector<std::uint8_t> slice_local(std::span<const std::uint8_t> buffer,
                                      const ShardView& owner_view,
                                      const ShardView& global_bounds,
                                      std::int64_t bytes_per_element);

/// Inverse of slice_local: writes `payload` into the region `global_bounds`
/// of a buffer laid out as `owner_view`.
void scatter_local(std::span<std::uint8_t> buffer, const ShardView& owner_view,
                   const ShardView& global_bounds, std::span<const std::uint8_t> payload,
                   std::int64_t bytes_per_element);

/// Splits `bounds` into sub-rectangles of at most `max_bytes` each, splitting
/// along the outermost axis first. Throws if a single element exceeds the
/// budget.
std::vector<ShardView> chunk_bounds(const ShardView& bounds, std::int64_t max_bytes,
                                    std::int64_t bytes_per_element);

/// Runs the plan one layer at a time through a fixed staging budget: sources
/// slice and send, destinations receive into staging, scatter, then a barrier
/// closes the layer. Carryover regions are materialized locally with zero
/// transport. peak_staging_bytes never exceeds `staging_bytes`.
ExecutionReport execute_plan(const TransferPlan& plan, const ShardStore& src_store,
                             ShardStore& dst_store, Transport& transport,
                             std::int64_t staging_bytes,
                             std::int64_t bytes_per_element);

}  // namespace reshard
