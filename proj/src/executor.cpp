// SPDX-License-Identifier: Apache-2.0
#include "reshard/executor.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <stdexcept>

namespace reshard {

namespace {

std::vector<std::int64_t> row_major_strides(const std::vector<std::int64_t>& extents) {
  std::vector<std::int64_t> s(extents.size(), 1);
  for (int i = static_cast<int>(extents.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * extents[i + 1];
  return s;
}

// Walks the rows (innermost contiguous runs) of `region` inside `owner_view`
// and calls fn(local_byte_offset, row_bytes) for each.
template <typename Fn>
void for_each_row(const ShardView& owner_view, const ShardView& region,
                  std::int64_t bytes_per_element, Fn&& fn) {
  const std::size_t nd = owner_view.ndims();
  auto strides = row_major_strides(owner_view.extents());
  const std::int64_t row_elems = region.dim(nd - 1).length();
  const std::int64_t row_bytes = row_elems * bytes_per_element;

  std::vector<std::int64_t> p(nd);
  for (std::size_t i = 0; i < nd; ++i) p[i] = region.dim(i).lo;
  while (true) {
    std::int64_t off = 0;
    for (std::size_t i = 0; i < nd; ++i) off += (p[i] - owner_view.dim(i).lo) * strides[i];
    fn(off * bytes_per_element, row_bytes);
    // Advance the multi-index, skipping the innermost dimension.
    int d = static_cast<int>(nd) - 2;
    while (d >= 0) {
      if (++p[d] < region.dim(d).hi) break;
      p[d] = region.dim(d).lo;
      --d;
    }
    if (d < 0) break;
  }
}

}  // namespace

std::vector<std::uint8_t> slice_local(std::span<const std::uint8_t> buffer,
                                      const ShardView& owner_view,
                                      const ShardView& global_bounds,
                                      std::int64_t bytes_per_element) {
  if (!owner_view.contains(global_bounds))
    throw std::invalid_argument("slice_local: bounds " + global_bounds.to_string() +
                                " escape owner view " + owner_view.to_string());
  if (static_cast<std::int64_t>(buffer.size()) !=
      owner_view.element_count() * bytes_per_element)
    throw std::invalid_argument("slice_local: buffer size does not match owner view");

  std::vector<std::uint8_t> out(
      static_cast<std::size_t>(global_bounds.element_count() * bytes_per_element));
  std::size_t cursor = 0;
  for_each_row(owner_view, global_bounds, bytes_per_element,
               [&](std::int64_t off, std::int64_t row_bytes) {
                 std::memcpy(out.data() + cursor, buffer.data() + off,
                             static_cast<std::size_t>(row_bytes));
                 cursor += static_cast<std::size_t>(row_bytes);
               });
  return out;
}

void scatter_local(std::span<std::uint8_t> buffer, const ShardView& owner_view,
                   const ShardView& global_bounds, std::span<const std::uint8_t> payload,
                   std::int64_t bytes_per_element) {
  if (!owner_view.contains(global_bounds))
    throw std::invalid_argument("scatter_local: bounds " + global_bounds.to_string() +
                                " escape owner view " + owner_view.to_string());
  if (static_cast<std::int64_t>(payload.size()) !=
      global_bounds.element_count() * bytes_per_element)
    throw std::invalid_argument("scatter_local: payload length mismatch");
  if (static_cast<std::int64_t>(buffer.size()) !=
      owner_view.element_count() * bytes_per_element)
    throw std::invalid_argument("scatter_local: buffer size does not match owner view");

  std::size_t cursor = 0;
  for_each_row(owner_view, global_bounds, bytes_per_element,
               [&](std::int64_t off, std::int64_t row_bytes) {
                 std::memcpy(buffer.data() + off, payload.data() + cursor,
                             static_cast<std::size_t>(row_bytes));
                 cursor += static_cast<std::size_t>(row_bytes);
               });
}

std::vector<ShardView> chunk_bounds(const ShardView& bounds, std::int64_t max_bytes,
                                    std::int64_t bytes_per_element) {
  std::vector<ShardView> out;
  std::int64_t total = bounds.element_count() * bytes_per_element;
  if (total <= max_bytes) {
    out.push_back(bounds);
    return out;
  }
  if (bytes_per_element > max_bytes)
    throw std::invalid_argument("chunk_bounds: one element exceeds the staging budget");

  // Split along the first dimension with extent > 1.
  std::size_t d = 0;
  while (d < bounds.ndims() && bounds.dim(d).length() <= 1) ++d;
  if (d == bounds.ndims())
    throw std::logic_error("chunk_bounds: single-element region over budget");

  const std::int64_t unit = total / bounds.dim(d).length();  // bytes per index along d
  const std::int64_t step = std::max<std::int64_t>(1, max_bytes / std::max<std::int64_t>(unit, 1));
  for (std::int64_t lo = bounds.dim(d).lo; lo < bounds.dim(d).hi; lo += step) {
    auto b = bounds.bounds();
    b[d] = {lo, std::min(lo + step, bounds.dim(d).hi)};
    ShardView piece{std::move(b)};
    if (piece.element_count() * bytes_per_element <= max_bytes) {
      out.push_back(std::move(piece));
    } else {
      auto sub = chunk_bounds(piece, max_bytes, bytes_per_element);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

ExecutionReport execute_plan(const TransferPlan& plan, const ShardStore& src_store,
                             ShardStore& dst_store, Transport& transport,
                             std::int64_t staging_bytes,
                             std::int64_t bytes_per_element) {
  ExecutionReport report;

  std::set<int> layers;
  for (const auto& [layer, tasks] : plan.tasks_by_layer) layers.insert(layer);
  for (const auto& [layer, keeps] : plan.carryover_by_layer) layers.insert(layer);

  for (int layer : layers) {
    try {
      // Regions already resident with unchanged layout: materialize locally,
      // no transport, no staging.
      auto keeps = plan.carryover_by_layer.find(layer);
      if (keeps != plan.carryover_by_layer.end()) {
        for (const auto& k : keeps->second) {
          const auto& src = src_store.at(k.rank, k.tensor_index);
          auto& dst = dst_store.at(k.rank, k.tensor_index);
          auto bytes = slice_local(src.bytes, src.view, k.bounds, bytes_per_element);
          scatter_local(dst.bytes, dst.view, k.bounds, bytes, bytes_per_element);
        }
      }

      auto tasks = plan.tasks_by_layer.find(layer);
      std::set<int> receivers;
      if (tasks != plan.tasks_by_layer.end()) {
        // Source phase: slice and send (or copy locally), chunked to the
        // staging budget.
        for (const auto& t : tasks->second) {
          const auto& src = src_store.at(t.src_rank, t.tensor_index);
          if (!src.view.contains(t.bounds))
            throw std::runtime_error("integrity: task bounds escape source view");
          for (const auto& piece : chunk_bounds(t.bounds, staging_bytes, bytes_per_element)) {
            auto bytes = slice_local(src.bytes, src.view, piece, bytes_per_element);
            if (t.is_local()) {
              auto& dst = dst_store.at(t.dst_rank, t.tensor_index);
              report.local_copy_bytes += static_cast<std::int64_t>(bytes.size());
              scatter_local(dst.bytes, dst.view, piece, bytes, bytes_per_element);
            } else {
              Frame f;
              f.tensor_index = t.tensor_index;
              f.layer = layer;
              f.bounds = piece;
              f.data = std::move(bytes);
              transport.send(t.src_rank, t.dst_rank, std::move(f));
              receivers.insert(t.dst_rank);
            }
          }
        }
      }

      // Destination phase: drain into the staging buffer, scatter, reuse.
      // The buffer is flushed whenever the next chunk would overflow it, so
      // resident staged data never exceeds the budget.
      for (int dst_rank : receivers) {
        std::vector<std::pair<int, Frame>> staged;
        std::int64_t occupancy = 0;
        auto flush = [&] {
          for (auto& [src_rank, frame] : staged) {
            auto& dst = dst_store.at(dst_rank, frame.tensor_index);
            scatter_local(dst.bytes, dst.view, frame.bounds, frame.data,
                          bytes_per_element);
          }
          staged.clear();
          occupancy = 0;
        };
        while (auto incoming = transport.receive(dst_rank)) {
          const std::int64_t sz = static_cast<std::int64_t>(incoming->second.data.size());
          if (sz > staging_bytes)
            throw std::runtime_error("integrity: chunk larger than staging buffer");
          if (occupancy + sz > staging_bytes) flush();
          occupancy += sz;
          report.bytes_moved += sz;
          report.peak_staging_bytes = std::max(report.peak_staging_bytes, occupancy);
          staged.emplace_back(incoming->first, std::move(incoming->second));
        }
        flush();
      }

      transport.barrier();
      report.layers_processed++;
    } catch (const std::exception& e) {
      report.ok = false;
      report.error = e.what();
      report.failed_layer = layer;
      return report;
    }
  }

  report.ok = true;
  return report;
}

}  // namespace reshard
