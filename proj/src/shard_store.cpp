// SPDX-License-Identifier: Apache-2.0
#include "reshard/shard_store.hpp"

#include <stdexcept>

#include "reshard/topology.hpp"

namespace reshard {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ShardStore ShardStore::allocate(const ModelSpec& model, const ParallelConfig& config) {
  ShardStore store;
  for (std::uint32_t ti = 0; ti < model.tensors.size(); ++ti) {
    for (const auto& [rank, v] : owners(model.tensors[ti], config)) {
      Entry e;
      e.view = v;
      e.bytes.assign(static_cast<std::size_t>(v.element_count() * model.bytes_per_element),
                     0);
      store.entries_.emplace(std::make_pair(rank, ti), std::move(e));
    }
  }
  return store;
}

bool ShardStore::has(int rank, std::uint32_t tensor_index) const {
  return entries_.count({rank, tensor_index}) > 0;
}

ShardStore::Entry& ShardStore::at(int rank, std::uint32_t tensor_index) {
  auto it = entries_.find({rank, tensor_index});
  if (it == entries_.end())
    throw std::invalid_argument("shard store: no buffer for rank " + std::to_string(rank) +
                                " tensor " + std::to_string(tensor_index));
  return it->second;
}

const ShardStore::Entry& ShardStore::at(int rank, std::uint32_t tensor_index) const {
  return const_cast<ShardStore*>(this)->at(rank, tensor_index);
}

std::uint8_t ShardStore::pattern_byte(std::uint32_t tensor_index, std::int64_t element,
                                      std::int64_t byte_in_element, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed ^ (0x1000003ULL * tensor_index) ^
                               static_cast<std::uint64_t>(element));
  return static_cast<std::uint8_t>(h >> ((byte_in_element % 8) * 8));
}

void ShardStore::fill_pattern(const ModelSpec& model, std::uint64_t seed) {
  const std::int64_t bpe = model.bytes_per_element;
  for (auto& [key, entry] : entries_) {
    const TensorSpec& tensor = model.tensors.at(key.second);
    // Global row-major strides over the full tensor shape.
    std::vector<std::int64_t> gstrides(tensor.shape.size(), 1);
    for (int i = static_cast<int>(tensor.shape.size()) - 2; i >= 0; --i)
      gstrides[i] = gstrides[i + 1] * tensor.shape[i + 1];

    const ShardView& v = entry.view;
    std::vector<std::int64_t> p(v.ndims());
    for (std::size_t i = 0; i < v.ndims(); ++i) p[i] = v.dim(i).lo;
    std::size_t out = 0;
    while (true) {
      std::int64_t g = 0;
      for (std::size_t i = 0; i < p.size(); ++i) g += p[i] * gstrides[i];
      for (std::int64_t b = 0; b < bpe; ++b)
        entry.bytes[out++] = pattern_byte(key.second, g, b, seed);
      int d = static_cast<int>(p.size()) - 1;
      while (d >= 0) {
        if (++p[d] < v.dim(d).hi) break;
        p[d] = v.dim(d).lo;
        --d;
      }
      if (d < 0) break;
    }
  }
}

std::int64_t ShardStore::total_bytes() const {
  std::int64_t n = 0;
  for (const auto& [key, entry] : entries_) n += static_cast<std::int64_t>(entry.bytes.size());
  return n;
}

}  // namespace reshard
