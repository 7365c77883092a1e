// SPDX-License-Identifier: Apache-2.0
#include "reshard/transfer_plan.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reshard {

std::int64_t TransferPlan::total_bytes() const {
  std::int64_t n = 0;
  for (const auto& [layer, tasks] : tasks_by_layer)
    for (const auto& t : tasks) n += t.byte_size;
  return n;
}

std::int64_t TransferPlan::task_count() const {
  std::int64_t n = 0;
  for (const auto& [layer, tasks] : tasks_by_layer) n += tasks.size();
  return n;
}

std::map<LinkKey, std::int64_t> TransferPlan::per_link_bytes() const {
  std::map<LinkKey, std::int64_t> out;
  for (const auto& [layer, tasks] : tasks_by_layer)
    for (const auto& t : tasks)
      if (!t.is_local()) out[{t.src_rank, t.dst_rank}] += t.byte_size;
  return out;
}

bool TransferPlan::empty() const {
  return task_count() == 0;
}

PlanCostSummary plan_cost_summary(const TransferPlan& plan) {
  PlanCostSummary s;
  s.total_bytes = plan.total_bytes();
  s.task_count = plan.task_count();
  for (const auto& [link, bytes] : plan.per_link_bytes())
    s.max_link_bytes = std::max(s.max_link_bytes, bytes);
  return s;
}

namespace {

std::string bounds_to_text(const ShardView& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.ndims(); ++i) {
    if (i) os << ",";
    os << v.dim(i).lo << ":" << v.dim(i).hi;
  }
  return os.str();
}

ShardView bounds_from_text(const std::string& s) {
  std::vector<Interval> b;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("plan parse: bad bounds '" + s + "'");
    b.push_back({std::stoll(part.substr(0, colon)), std::stoll(part.substr(colon + 1))});
  }
  return ShardView(std::move(b));
}

}  // namespace

void write_plan(std::ostream& os, const TransferPlan& plan) {
  os << "plan src_gen=" << plan.src_config_gen << " dst_gen=" << plan.dst_config_gen
     << "\n";
  for (const auto& [layer, tasks] : plan.tasks_by_layer) {
    for (const auto& t : tasks) {
      os << "task " << plan.tensor_id(t.tensor_index) << " " << t.layer << " "
         << t.src_rank << " " << t.dst_rank << " " << bounds_to_text(t.bounds) << " "
         << t.byte_size << (t.is_local() ? " local" : "") << "\n";
    }
  }
  for (const auto& [layer, keeps] : plan.carryover_by_layer) {
    for (const auto& k : keeps) {
      os << "keep " << plan.tensor_id(k.tensor_index) << " " << k.layer << " " << k.rank
         << " " << bounds_to_text(k.bounds) << " " << k.byte_size << "\n";
    }
  }
}

TransferPlan read_plan(std::istream& is) {
  TransferPlan plan;
  std::map<std::string, std::uint32_t> index_of;
  auto intern = [&](const std::string& id) -> std::uint32_t {
    auto it = index_of.find(id);
    if (it != index_of.end()) return it->second;
    std::uint32_t idx = static_cast<std::uint32_t>(plan.tensor_ids.size());
    plan.tensor_ids.push_back(id);
    index_of.emplace(id, idx);
    return idx;
  };

  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "plan") {
      std::string tok;
      while (ls >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        auto key = tok.substr(0, eq);
        auto val = std::stoull(tok.substr(eq + 1));
        if (key == "src_gen") plan.src_config_gen = val;
        if (key == "dst_gen") plan.dst_config_gen = val;
      }
    } else if (kind == "task") {
      TransferTask t;
      std::string id, bounds, flag;
      ls >> id >> t.layer >> t.src_rank >> t.dst_rank >> bounds >> t.byte_size;
      if (!ls) throw std::runtime_error("plan parse: bad task line '" + line + "'");
      ls >> flag;  // optional "local"
      t.tensor_index = intern(id);
      t.bounds = bounds_from_text(bounds);
      plan.tasks_by_layer[t.layer].push_back(std::move(t));
    } else if (kind == "keep") {
      CarryoverRegion k;
      std::string id, bounds;
      ls >> id >> k.layer >> k.rank >> bounds >> k.byte_size;
      if (!ls) throw std::runtime_error("plan parse: bad keep line '" + line + "'");
      k.tensor_index = intern(id);
      k.bounds = bounds_from_text(bounds);
      plan.carryover_by_layer[k.layer].push_back(std::move(k));
    } else {
      throw std::runtime_error("plan parse: unknown record '" + kind + "'");
    }
  }
  return plan;
}

}  // namespace reshard
