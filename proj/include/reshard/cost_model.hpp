// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reshard/model_spec.hpp"
#include "reshard/parallel_config.hpp"

namespace reshard {

/// Calibrated latency and bandwidth constants. The bundled defaults are
/// fitted against testbed profiling figures; everything here is a modeled
/// stand-in for real CUDA/NCCL/storage work.
struct CostModel {
  // Compute: iteration wall time = iter_time_per_bparam_gpu_s * Bparams / world.
  double iter_time_per_bparam_gpu_s = 2.768;
  // Multiplicative slowdown of the active world while a shadow world is
  // being prepared.
  double prepare_interference_factor = 0.003;

  // Interconnect, effective per point-to-point connection under fan-out.
  double intra_node_bw_gbps = 48.0;
  double inter_node_bw_gbps = 16.0;
  int gpus_per_node = 8;

  // Persistent storage (checkpoint path).
  double storage_bw_gbps_per_gpu = 1.46293636;
  // Load-time reduction available to reshape-capable checkpoint loaders.
  double reshape_load_factor = 0.6;

  // Distributed initialization phases.
  double process_spawn_s = 5.0;
  double tcp_bootstrap_s = 2.0;
  double topology_discovery_base_s = 3.0;
  double topology_discovery_per_rank_s = 0.19;
  double communicator_setup_base_s = 4.4;
  double communicator_setup_per_rank_s = 0.30057;
  double warmup_s = 40.0;  // JIT/autotune per cold rank
  double misc_restart_s = 2.4;
  // Background (companion-thread) group construction runs concurrently and
  // off the critical path; it pays this fraction of the cold setup cost.
  double background_setup_factor = 0.2;
  double plan_compute_s = 0.5;

  // Switch window.
  double drain_s = 2.9;
  double swap_s = 0.4;

  // Memory constants: staging buffer B and communicator metadata C.
  std::int64_t staging_bytes = 512ll << 20;
  std::int64_t communicator_metadata_bytes = 1ll << 30;

  double iteration_time_s(const ParallelConfig& config, const ModelSpec& model) const {
    double bparams = static_cast<double>(model.total_param_elements()) / 1e9;
    return iter_time_per_bparam_gpu_s * bparams / config.world_size();
  }

  double topology_discovery_s(int world_size) const {
    return topology_discovery_base_s + topology_discovery_per_rank_s * world_size;
  }

  double communicator_setup_s(int world_size) const {
    return communicator_setup_base_s + communicator_setup_per_rank_s * world_size;
  }

  double storage_bw_bytes_per_s_per_gpu() const {
    return storage_bw_gbps_per_gpu * 1e9 / 8.0;
  }

  double link_bw_bytes_per_s(int src_rank, int dst_rank) const {
    bool same_node = (src_rank / gpus_per_node) == (dst_rank / gpus_per_node);
    return (same_node ? intra_node_bw_gbps : inter_node_bw_gbps) * 1e9 / 8.0;
  }

  std::vector<std::string> validate() const;
};

}  // namespace reshard
