// SPDX-License-Identifier: Apache-2.0
#include "reshard/planner.hpp"

#include <algorithm>
#include <stdexcept>

#include "reshard/topology.hpp"

namespace reshard {

namespace {

// Row-major strides for a buffer with the given extents.
std::vector<std::int64_t> strides_for(const std::vector<std::int64_t>& extents) {
  std::vector<std::int64_t> s(extents.size(), 1);
  for (int i = static_cast<int>(extents.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * extents[i + 1];
  return s;
}

std::int64_t local_offset(const ShardView& owner, const std::vector<std::int64_t>& strides,
                          const std::vector<std::int64_t>& point) {
  std::int64_t off = 0;
  for (std::size_t i = 0; i < point.size(); ++i)
    off += (point[i] - owner.dim(i).lo) * strides[i];
  return off;
}

// True when every point of `region` sits at the same linear offset in both
// owner buffers, i.e. the bytes are already laid out correctly in place.
bool layout_identical(const ShardView& owner_old, const ShardView& owner_new,
                      const ShardView& region) {
  auto s_old = strides_for(owner_old.extents());
  auto s_new = strides_for(owner_new.extents());
  std::vector<std::int64_t> base(region.ndims());
  for (std::size_t i = 0; i < region.ndims(); ++i) base[i] = region.dim(i).lo;
  if (local_offset(owner_old, s_old, base) != local_offset(owner_new, s_new, base))
    return false;
  for (std::size_t i = 0; i < region.ndims(); ++i)
    if (region.dim(i).length() > 1 && s_old[i] != s_new[i]) return false;
  return true;
}

struct StageLookup {
  // Rank-list positions of one pipeline stage, grouped [dp][tp].
  const ParallelConfig* config;
  int stage;

  int rank_of(int tp_index, int dp_index) const {
    int i = tp_index + config->tp() * (dp_index + config->dp() * stage);
    return config->ranks()[i];
  }
};

}  // namespace

TransferPlan compute_transfer_plan(const ParallelConfig& c_old,
                                   const ParallelConfig& c_new, const ModelSpec& model,
                                   const PlanOptions& options, PlannerStats* stats) {
  if (c_old.generation_id() == c_new.generation_id())
    throw std::invalid_argument("compute_transfer_plan: identical generation ids");
  {
    auto v_old = validate_config(c_old, model);
    auto v_new = validate_config(c_new, model);
    if (!v_old.empty())
      throw std::invalid_argument("compute_transfer_plan: invalid source config: " +
                                  v_old.front());
    if (!v_new.empty())
      throw std::invalid_argument("compute_transfer_plan: invalid destination config: " +
                                  v_new.front());
  }

  TransferPlan plan;
  plan.src_config_gen = c_old.generation_id();
  plan.dst_config_gen = c_new.generation_id();
  plan.tensor_ids.reserve(model.tensors.size());

  std::int64_t pairs_checked = 0;
  std::int64_t broadcast_cursor = 0;  // round-robin state for balance_sources

  for (std::uint32_t ti = 0; ti < model.tensors.size(); ++ti) {
    const TensorSpec& tensor = model.tensors[ti];
    plan.tensor_ids.push_back(tensor.tensor_id);

    const int stage_old = c_old.stage_of_layer(tensor.layer);
    const int stage_new = c_new.stage_of_layer(tensor.layer);
    StageLookup old_stage{&c_old, stage_old};
    StageLookup new_stage{&c_new, stage_new};

    const bool sharded = tensor.tp_shard_axis.has_value();
    const int axis = sharded ? *tensor.tp_shard_axis : -1;
    const std::int64_t axis_len = sharded ? tensor.shape[axis] : 0;

    // Old TP block partition along the sharded axis (the only axis on which
    // source views differ); empty trailing blocks are dropped.
    std::vector<std::pair<int, Interval>> old_blocks;
    if (sharded) {
      for (int i = 0; i < c_old.tp(); ++i)
        if (auto blk = tp_block(axis_len, c_old.tp(), i)) old_blocks.push_back({i, *blk});
    } else {
      old_blocks.push_back({-1, Interval{0, 1}});  // single degenerate block
    }

    for (int dst_tp = 0; dst_tp < c_new.tp(); ++dst_tp) {
      // Destination view bounds shared by every dp replica at this tp index.
      std::vector<Interval> dst_bounds;
      dst_bounds.reserve(tensor.shape.size());
      for (auto d : tensor.shape) dst_bounds.push_back({0, d});
      if (sharded) {
        auto blk = tp_block(axis_len, c_new.tp(), dst_tp);
        if (!blk) continue;  // short axis: this tp index owns nothing
        dst_bounds[axis] = *blk;
      }
      const ShardView v_dst{std::vector<Interval>(dst_bounds)};

      for (int dst_dp = 0; dst_dp < c_new.dp(); ++dst_dp) {
        const int dst_rank = new_stage.rank_of(dst_tp, dst_dp);

        // Does the destination rank itself hold part of this tensor in the
        // old configuration?
        std::optional<ShardView> v_dst_old;
        std::optional<RankCoord> old_coord;
        if (c_old.contains(dst_rank)) {
          RankCoord oc = c_old.coord_of(dst_rank);
          if (oc.pp == stage_old) {
            old_coord = oc;
            std::vector<Interval> ob = dst_bounds;
            for (std::size_t i = 0; i < ob.size(); ++i) ob[i] = {0, tensor.shape[i]};
            bool have = true;
            if (sharded) {
              auto blk = tp_block(axis_len, c_old.tp(), oc.tp);
              if (blk)
                ob[axis] = *blk;
              else
                have = false;
            }
            if (have) v_dst_old = ShardView(std::move(ob));
          }
        }

        // Tile v_dst along the old block partition; each piece is a clean
        // hyper-rectangle because source views differ on one axis only.
        for (const auto& [src_tp, blk] : old_blocks) {
          ++pairs_checked;
          std::vector<Interval> region_bounds = dst_bounds;
          if (sharded) {
            Interval iv{std::max(dst_bounds[axis].lo, blk.lo),
                        std::min(dst_bounds[axis].hi, blk.hi)};
            if (iv.lo >= iv.hi) continue;
            region_bounds[axis] = iv;
          }
          ShardView region{std::move(region_bounds)};
          const std::int64_t bytes = region.element_count() * model.bytes_per_element;

          // Source choice: the destination itself when it already holds the
          // region, else the lowest dp replica (optionally round-robin).
          bool self_holds = old_coord && (!sharded || old_coord->tp == src_tp);
          if (self_holds) {
            if (layout_identical(*v_dst_old, v_dst, region)) {
              plan.carryover_by_layer[tensor.layer].push_back(
                  {ti, tensor.layer, dst_rank, region, bytes});
            } else {
              plan.tasks_by_layer[tensor.layer].push_back(
                  {ti, tensor.layer, dst_rank, dst_rank, region, bytes});
            }
            continue;
          }

          const int src_dp = options.balance_sources
                                 ? static_cast<int>(broadcast_cursor++ % c_old.dp())
                                 : 0;
          int src_rank;
          if (sharded) {
            // One rank per (tp, dp) coordinate holds this block.
            src_rank = old_stage.rank_of(src_tp, src_dp);
          } else {
            // Replicated: every (tp, dp) holds the full view; take the lowest
            // rank id within the chosen dp group.
            src_rank = old_stage.rank_of(0, src_dp);
            for (int tp = 1; tp < c_old.tp(); ++tp)
              src_rank = std::min(src_rank, old_stage.rank_of(tp, src_dp));
          }
          plan.tasks_by_layer[tensor.layer].push_back(
              {ti, tensor.layer, src_rank, dst_rank, region, bytes});
        }
      }
    }
  }

  if (stats) stats->pairs_checked = pairs_checked;
  return plan;
}

std::vector<std::string> verify_plan(const TransferPlan& plan,
                                     const ParallelConfig& c_old,
                                     const ParallelConfig& c_new,
                                     const ModelSpec& model) {
  std::vector<std::string> violations;
  auto complain = [&](const std::string& msg) {
    if (violations.size() < 64) violations.push_back(msg);
  };

  // Tensor name -> model index.
  std::vector<int> plan_to_model(plan.tensor_ids.size(), -1);
  for (std::size_t pi = 0; pi < plan.tensor_ids.size(); ++pi) {
    for (std::size_t mi = 0; mi < model.tensors.size(); ++mi)
      if (model.tensors[mi].tensor_id == plan.tensor_ids[pi])
        plan_to_model[pi] = static_cast<int>(mi);
    if (plan_to_model[pi] < 0)
      complain("plan references unknown tensor " + plan.tensor_ids[pi]);
  }

  for (std::size_t mi = 0; mi < model.tensors.size(); ++mi) {
    const TensorSpec& tensor = model.tensors[mi];
    auto dst_views = owners(tensor, c_new);
    auto src_views = owners(tensor, c_old);

    for (const auto& [dst_rank, v_dst] : dst_views) {
      // Coverage count per element of this destination view.
      const auto extents = v_dst.extents();
      const std::int64_t n = v_dst.element_count();
      std::vector<std::uint8_t> cover(static_cast<std::size_t>(n), 0);
      auto strides = [&] {
        std::vector<std::int64_t> s(extents.size(), 1);
        for (int i = static_cast<int>(extents.size()) - 2; i >= 0; --i)
          s[i] = s[i + 1] * extents[i + 1];
        return s;
      }();

      auto mark_region = [&](const ShardView& region, const char* what) {
        if (!v_dst.contains(region)) {
          complain(std::string(what) + " for tensor " + tensor.tensor_id + " rank " +
                   std::to_string(dst_rank) + " escapes destination view");
          return;
        }
        // Iterate all points of the region (small instances only).
        std::vector<std::int64_t> p(region.ndims());
        for (std::size_t i = 0; i < region.ndims(); ++i) p[i] = region.dim(i).lo;
        while (true) {
          std::int64_t off = 0;
          for (std::size_t i = 0; i < p.size(); ++i)
            off += (p[i] - v_dst.dim(i).lo) * strides[i];
          if (cover[static_cast<std::size_t>(off)] < 255) cover[static_cast<std::size_t>(off)]++;
          int d = static_cast<int>(p.size()) - 1;
          while (d >= 0) {
            if (++p[d] < region.dim(d).hi) break;
            p[d] = region.dim(d).lo;
            --d;
          }
          if (d < 0) break;
        }
      };

      auto layer_tasks = plan.tasks_by_layer.find(tensor.layer);
      if (layer_tasks != plan.tasks_by_layer.end()) {
        for (const auto& t : layer_tasks->second) {
          if (t.dst_rank != dst_rank) continue;
          if (plan_to_model.at(t.tensor_index) != static_cast<int>(mi)) continue;
          if (t.bounds.element_count() <= 0 || t.byte_size <= 0) {
            complain("empty task for tensor " + tensor.tensor_id);
            continue;
          }
          auto src_it = src_views.find(t.src_rank);
          if (src_it == src_views.end()) {
            complain("task source rank " + std::to_string(t.src_rank) +
                     " owns nothing of tensor " + tensor.tensor_id);
          } else if (!src_it->second.contains(t.bounds)) {
            complain("task bounds escape source view for tensor " + tensor.tensor_id +
                     " src " + std::to_string(t.src_rank));
          }
          mark_region(t.bounds, "task");
        }
      }
      auto layer_keeps = plan.carryover_by_layer.find(tensor.layer);
      if (layer_keeps != plan.carryover_by_layer.end()) {
        for (const auto& k : layer_keeps->second) {
          if (k.rank != dst_rank) continue;
          if (plan_to_model.at(k.tensor_index) != static_cast<int>(mi)) continue;
          auto src_it = src_views.find(k.rank);
          if (src_it == src_views.end() || !src_it->second.contains(k.bounds))
            complain("carryover not resident in old view for tensor " + tensor.tensor_id +
                     " rank " + std::to_string(k.rank));
          mark_region(k.bounds, "carryover");
        }
      }

      std::int64_t gaps = 0, overlaps = 0;
      for (auto c : cover) {
        if (c == 0) ++gaps;
        if (c > 1) ++overlaps;
      }
      if (gaps)
        complain("coverage gap: tensor " + tensor.tensor_id + " rank " +
                 std::to_string(dst_rank) + " missing " + std::to_string(gaps) +
                 " elements");
      if (overlaps)
        complain("coverage overlap: tensor " + tensor.tensor_id + " rank " +
                 std::to_string(dst_rank) + " has " + std::to_string(overlaps) +
                 " doubly-covered elements");
    }
  }
  return violations;
}

}  // namespace reshard
