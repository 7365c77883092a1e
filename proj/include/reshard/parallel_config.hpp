// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reshard/model_spec.hpp"

namespace reshard {

struct RankCoord {
  int tp = 0;
  int pp = 0;
  int dp = 0;
  bool operator==(const RankCoord&) const = default;
};

/// A generation-tagged (TP, PP, DP) decomposition over a concrete rank set.
///
/// Rank order defines coordinates: position i in `ranks` maps to
/// tp = i % tp_degree, dp = (i / tp_degree) % dp_degree, pp = i / (tp*dp),
/// so each pipeline stage owns a contiguous slice of the rank list.
class ParallelConfig {
 public:
  ParallelConfig() = default;
  ParallelConfig(std::uint64_t generation_id, int tp, int pp, int dp,
                 std::vector<int> ranks, std::vector<int> layer_assignment);

  /// Ceil-split contiguous layer ranges; earlier stages take the extra layer.
  static std::vector<int> default_layer_assignment(int num_layers, int pp);

  std::uint64_t generation_id() const { return generation_id_; }
  int tp() const { return tp_; }
  int pp() const { return pp_; }
  int dp() const { return dp_; }
  int world_size() const { return static_cast<int>(ranks_.size()); }
  const std::vector<int>& ranks() const { return ranks_; }
  const std::vector<int>& layer_assignment() const { return layer_assignment_; }

  bool contains(int rank) const;
  /// Position of `rank` in the ordered rank list; throws if absent.
  int index_of(int rank) const;
  RankCoord coord_of(int rank) const;
  int rank_at(const RankCoord& c) const;
  int stage_of_layer(int layer) const;
  /// Ranks whose pp index equals `stage` (a contiguous slice of `ranks`).
  std::vector<int> stage_ranks(int stage) const;

  /// Layout equality ignores the generation id.
  bool same_layout(const ParallelConfig& o) const {
    return tp_ == o.tp_ && pp_ == o.pp_ && dp_ == o.dp_ && ranks_ == o.ranks_ &&
           layer_assignment_ == o.layer_assignment_;
  }

  ParallelConfig with_generation(std::uint64_t gen) const {
    ParallelConfig c = *this;
    c.generation_id_ = gen;
    return c;
  }

 private:
  std::uint64_t generation_id_ = 0;
  int tp_ = 1;
  int pp_ = 1;
  int dp_ = 1;
  std::vector<int> ranks_;
  std::vector<int> layer_assignment_;  // layer index -> pipeline stage
};

/// Structural validation of a config against a model; returns violations,
/// never throws.
std::vector<std::string> validate_config(const ParallelConfig& config,
                                         const ModelSpec& model);

}  // namespace reshard
