// SPDX-License-Identifier: Apache-2.0
#include "reshard/parallel_config.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace reshard {

ParallelConfig::ParallelConfig(std::uint64_t generation_id, int tp, int pp, int dp,
                               std::vector<int> ranks, std::vector<int> layer_assignment)
    : generation_id_(generation_id),
      tp_(tp),
      pp_(pp),
      dp_(dp),
      ranks_(std::move(ranks)),
      layer_assignment_(std::move(layer_assignment)) {}

std::vector<int> ParallelConfig::default_layer_assignment(int num_layers, int pp) {
  std::vector<int> a(num_layers);
  int base = num_layers / pp;
  int extra = num_layers % pp;
  int layer = 0;
  for (int s = 0; s < pp; ++s) {
    int take = base + (s < extra ? 1 : 0);
    for (int k = 0; k < take && layer < num_layers; ++k) a[layer++] = s;
  }
  return a;
}

bool ParallelConfig::contains(int rank) const {
  return std::find(ranks_.begin(), ranks_.end(), rank) != ranks_.end();
}

int ParallelConfig::index_of(int rank) const {
  auto it = std::find(ranks_.begin(), ranks_.end(), rank);
  if (it == ranks_.end())
    throw std::invalid_argument("rank " + std::to_string(rank) + " not in config");
  return static_cast<int>(it - ranks_.begin());
}

RankCoord ParallelConfig::coord_of(int rank) const {
  int i = index_of(rank);
  RankCoord c;
  c.tp = i % tp_;
  c.dp = (i / tp_) % dp_;
  c.pp = i / (tp_ * dp_);
  return c;
}

int ParallelConfig::rank_at(const RankCoord& c) const {
  if (c.tp < 0 || c.tp >= tp_ || c.dp < 0 || c.dp >= dp_ || c.pp < 0 || c.pp >= pp_)
    throw std::invalid_argument("coordinate out of range");
  int i = c.tp + tp_ * (c.dp + dp_ * c.pp);
  return ranks_.at(i);
}

int ParallelConfig::stage_of_layer(int layer) const {
  if (layer < 0 || layer >= static_cast<int>(layer_assignment_.size()))
    throw std::invalid_argument("layer " + std::to_string(layer) + " out of range");
  return layer_assignment_[layer];
}

std::vector<int> ParallelConfig::stage_ranks(int stage) const {
  int per_stage = tp_ * dp_;
  std::vector<int> out;
  out.reserve(per_stage);
  for (int i = stage * per_stage; i < (stage + 1) * per_stage; ++i)
    out.push_back(ranks_.at(i));
  return out;
}

std::vector<std::string> validate_config(const ParallelConfig& config,
                                         const ModelSpec& model) {
  std::vector<std::string> v;
  if (config.tp() < 1 || config.pp() < 1 || config.dp() < 1)
    v.push_back("tp/pp/dp degrees must be positive");
  std::int64_t product = static_cast<std::int64_t>(config.tp()) * config.pp() * config.dp();
  if (product != config.world_size())
    v.push_back("tp*pp*dp = " + std::to_string(product) + " != world size " +
                std::to_string(config.world_size()));

  std::unordered_set<int> seen;
  for (int r : config.ranks()) {
    if (!seen.insert(r).second) v.push_back("duplicate rank id " + std::to_string(r));
    if (r < 0) v.push_back("negative rank id " + std::to_string(r));
  }

  const auto& la = config.layer_assignment();
  if (static_cast<int>(la.size()) != model.num_layers) {
    v.push_back("layer_assignment covers " + std::to_string(la.size()) +
                " layers, model has " + std::to_string(model.num_layers));
  } else {
    // Stages must form contiguous, non-empty, non-decreasing ranges.
    std::vector<int> count(config.pp(), 0);
    int prev = 0;
    for (int layer = 0; layer < model.num_layers; ++layer) {
      int s = la[layer];
      if (s < 0 || s >= config.pp()) {
        v.push_back("layer " + std::to_string(layer) + " assigned to stage " +
                    std::to_string(s) + " outside [0," + std::to_string(config.pp()) + ")");
        continue;
      }
      if (s < prev || s > prev + 1)
        v.push_back("layer assignment not contiguous at layer " + std::to_string(layer));
      prev = s;
      count[s]++;
    }
    for (int s = 0; s < config.pp(); ++s)
      if (s < static_cast<int>(count.size()) && count[s] == 0)
        v.push_back("pipeline stage " + std::to_string(s) + " receives no layers");
  }

  for (const auto& t : model.tensors) {
    if (t.tp_shard_axis) {
      std::int64_t axis_len = t.shape.at(*t.tp_shard_axis);
      if (axis_len < config.tp())
        v.push_back("tensor " + t.tensor_id + ": sharded axis length " +
                    std::to_string(axis_len) + " < tp " + std::to_string(config.tp()));
    }
  }
  return v;
}

}  // namespace reshard
