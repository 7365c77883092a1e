// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>

#include "reshard/model_spec.hpp"
#include "reshard/parallel_config.hpp"
#include "reshard/shard_view.hpp"

namespace reshard {

/// The hyper-rectangular index region of `tensor` owned by `rank` under
/// `config`, or absent when the rank's pipeline stage does not host the
/// tensor's layer (or its TP block is empty on a short axis).
///
/// TP partitions the sharded axis into tp contiguous blocks of size
/// ceil(d/tp), the last block possibly shorter. Replicated tensors yield the
/// full view for every TP rank; DP never partitions state.
std::optional<ShardView> view(const TensorSpec& tensor, const ParallelConfig& config,
                              int rank);

/// TP block along one axis: [lo, hi) for block index `tp_index`, or absent
/// when the ceil-split leaves this block empty.
std::optional<Interval> tp_block(std::int64_t axis_len, int tp_degree, int tp_index);

/// All ranks whose view of `tensor` is present, with their views.
std::map<int, ShardView> owners(const TensorSpec& tensor, const ParallelConfig& config);

}  // namespace reshard
