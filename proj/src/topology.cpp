// SPDX-License-Identifier: Apache-2.0
#include "reshard/topology.hpp"

#include <stdexcept>

namespace reshard {

std::optional<Interval> tp_block(std::int64_t axis_len, int tp_degree, int tp_index) {
  std::int64_t block = (axis_len + tp_degree - 1) / tp_degree;  // ceil
  std::int64_t lo = static_cast<std::int64_t>(tp_index) * block;
  std::int64_t hi = std::min(lo + block, axis_len);
  if (lo >= hi) return std::nullopt;
  return Interval{lo, hi};
}

std::optional<ShardView> view(const TensorSpec& tensor, const ParallelConfig& config,
                              int rank) {
  if (tensor.layer < 0 ||
      tensor.layer >= static_cast<int>(config.layer_assignment().size()))
    throw std::invalid_argument("tensor " + tensor.tensor_id + ": layer out of range");
  RankCoord c = config.coord_of(rank);  // throws if rank not in config

  if (config.stage_of_layer(tensor.layer) != c.pp) return std::nullopt;

  std::vector<Interval> bounds;
  bounds.reserve(tensor.shape.size());
  for (std::size_t i = 0; i < tensor.shape.size(); ++i)
    bounds.push_back({0, tensor.shape[i]});

  if (tensor.tp_shard_axis) {
    int axis = *tensor.tp_shard_axis;
    auto blk = tp_block(tensor.shape.at(axis), config.tp(), c.tp);
    if (!blk) return std::nullopt;  // short axis, this tp rank owns nothing
    bounds[axis] = *blk;
  }
  return ShardView(std::move(bounds));
}

std::map<int, ShardView> owners(const TensorSpec& tensor, const ParallelConfig& config) {
  std::map<int, ShardView> out;
  int stage = config.stage_of_layer(tensor.layer);
  for (int rank : config.stage_ranks(stage)) {
    auto v = view(tensor, config, rank);
    if (v) out.emplace(rank, std::move(*v));
  }
  return out;
}

}  // namespace reshard
