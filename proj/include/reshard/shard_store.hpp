// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "reshard/model_spec.hpp"
#include "reshard/parallel_config.hpp"
#include "reshard/shard_view.hpp"

namespace reshard {

/// In-memory stand-in for per-rank parameter storage: one contiguous buffer
/// per (rank, tensor), holding that rank's shard in row-major order of its
/// view.
class ShardStore {
 public:
  struct Entry {
    ShardView view;
    std::vector<std::uint8_t> bytes;
  };

  /// Allocates zero-filled buffers for every present view under `config`.
  static ShardStore allocate(const ModelSpec& model, const ParallelConfig& config);

  bool has(int rank, std::uint32_t tensor_index) const;
  Entry& at(int rank, std::uint32_t tensor_index);
  const Entry& at(int rank, std::uint32_t tensor_index) const;

  /// Fills every buffer with the deterministic per-element pattern
  /// value(tensor_index, global linear element index, seed); replicas of the
  /// same region therefore hold identical bytes.
  void fill_pattern(const ModelSpec& model, std::uint64_t seed);

  /// The reference pattern, shared with the gather-reslice oracle.
  static std::uint8_t pattern_byte(std::uint32_t tensor_index, std::int64_t element,
                                   std::int64_t byte_in_element, std::uint64_t seed);

  std::int64_t total_bytes() const;
  std::size_t entry_count() const { return entries_.size(); }

 private:
  std::map<std::pair<int, std::uint32_t>, Entry> entries_;
};

}  // namespace reshard
