// SPDX-License-Identifier: Apache-2.0
#include "reshard/cost_model.hpp"

namespace reshard {

std::vector<std::string> CostModel::validate() const {
  std::vector<std::string> v;
  auto nonneg = [&](double x, const char* name) {
    if (x < 0) v.push_back(std::string(name) + " must be >= 0");
  };
  auto positive = [&](double x, const char* name) {
    if (x <= 0) v.push_back(std::string(name) + " must be > 0");
  };
  positive(iter_time_per_bparam_gpu_s, "iter_time_per_bparam_gpu_s");
  positive(intra_node_bw_gbps, "intra_node_bw_gbps");
  positive(inter_node_bw_gbps, "inter_node_bw_gbps");
  positive(storage_bw_gbps_per_gpu, "storage_bw_gbps_per_gpu");
  if (gpus_per_node < 1) v.push_back("gpus_per_node must be >= 1");
  nonneg(prepare_interference_factor, "prepare_interference_factor");
  nonneg(process_spawn_s, "process_spawn_s");
  nonneg(tcp_bootstrap_s, "tcp_bootstrap_s");
  nonneg(topology_discovery_base_s, "topology_discovery_base_s");
  nonneg(topology_discovery_per_rank_s, "topology_discovery_per_rank_s");
  nonneg(communicator_setup_base_s, "communicator_setup_base_s");
  nonneg(communicator_setup_per_rank_s, "communicator_setup_per_rank_s");
  nonneg(warmup_s, "warmup_s");
  nonneg(misc_restart_s, "misc_restart_s");
  nonneg(drain_s, "drain_s");
  nonneg(swap_s, "swap_s");
  nonneg(plan_compute_s, "plan_compute_s");
  if (reshape_load_factor < 0 || reshape_load_factor > 1)
    v.push_back("reshape_load_factor must be in [0,1]");
  if (background_setup_factor < 0 || background_setup_factor > 1)
    v.push_back("background_setup_factor must be in [0,1]");
  if (staging_bytes <= 0) v.push_back("staging_bytes must be > 0");
  if (communicator_metadata_bytes < 0) v.push_back("communicator_metadata_bytes must be >= 0");
  return v;
}

}  // namespace reshard
