// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reshard/shard_view.hpp"

namespace reshard {

enum class TensorRole { kParameter, kOptimizerMoment1, kOptimizerMoment2 };

inline const char* to_string(TensorRole r) {
  switch (r) {
    case TensorRole::kParameter: return "parameter";
    case TensorRole::kOptimizerMoment1: return "optimizer_moment_1";
    case TensorRole::kOptimizerMoment2: return "optimizer_moment_2";
  }
  return "?";
}

/// One logical tensor of the training state: shape plus a sharding spec.
/// tp_shard_axis absent means the tensor is replicated across TP ranks.
struct TensorSpec {
  std::string tensor_id;
  int layer = 0;
  std::vector<std::int64_t> shape;
  std::optional<int> tp_shard_axis;  // nullopt = replicated
  TensorRole role = TensorRole::kParameter;

  std::int64_t element_count() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

/// The set of tensors comprising the training state, by layer.
struct ModelSpec {
  std::string name;
  int num_layers = 1;
  std::vector<TensorSpec> tensors;
  std::int64_t bytes_per_element = 4;
  // Bytes of total persistent state per parameter element (parameter plus
  // optimizer moments plus working copies); used by storage-path accounting.
  double state_multiplier = 16.0;

  std::int64_t total_param_elements() const {
    std::int64_t n = 0;
    for (const auto& t : tensors)
      if (t.role == TensorRole::kParameter) n += t.element_count();
    return n;
  }

  /// Persistent state volume, computable from metadata alone.
  double total_state_bytes() const {
    return static_cast<double>(total_param_elements()) * state_multiplier;
  }

  /// Sum of listed tensor bytes (what the planner/executor actually move).
  std::int64_t total_tensor_bytes() const {
    std::int64_t n = 0;
    for (const auto& t : tensors) n += t.element_count() * bytes_per_element;
    return n;
  }

  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (num_layers < 1) v.push_back("num_layers must be >= 1");
    if (bytes_per_element < 1) v.push_back("bytes_per_element must be >= 1");
    if (state_multiplier <= 0) v.push_back("state_multiplier must be > 0");
    for (const auto& t : tensors) {
      if (t.layer < 0 || t.layer >= num_layers)
        v.push_back("tensor " + t.tensor_id + ": layer " + std::to_string(t.layer) +
                    " out of range [0," + std::to_string(num_layers) + ")");
      if (t.shape.empty()) v.push_back("tensor " + t.tensor_id + ": empty shape");
      for (auto d : t.shape)
        if (d < 1) v.push_back("tensor " + t.tensor_id + ": dimension < 1");
      if (t.tp_shard_axis && (*t.tp_shard_axis < 0 ||
                              *t.tp_shard_axis >= static_cast<int>(t.shape.size())))
        v.push_back("tensor " + t.tensor_id + ": tp_shard_axis out of range");
    }
    return v;
  }
};

}  // namespace reshard
