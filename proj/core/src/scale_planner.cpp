#include "primscope/scale_planner.hpp"

#include <algorithm>

#include "internal.hpp"
#include "json.hpp"
#include "primscope/error.hpp"

namespace primscope {

using nlohmann::json;

namespace {

void check_spec(const SystemSpec& spec) {
  if (spec.sockets < 1) throw InvalidParameterError("sockets must be >= 1");
  if (spec.cores_per_socket < 1) throw InvalidParameterError("cores_per_socket must be >= 1");
  if (!(spec.mem_total_gb > 0)) throw InvalidParameterError("mem_total_gb must be positive");
  if (!(spec.mem_per_rank_gb > 0)) throw InvalidParameterError("mem_per_rank_gb must be positive");
}

}  // namespace

std::vector<RankPlan> enumerate_plans(const SystemSpec& spec, std::int64_t local_batch) {
  check_spec(spec);
  if (local_batch < 1) throw InvalidParameterError("local_batch must be >= 1");

  // One thread per core and no socket spanning force
  // ranks_per_socket * threads_per_rank = cores_per_socket exactly,
  // so candidates are the divisor pairs of cores_per_socket.
  std::vector<RankPlan> plans;
  for (std::int64_t threads = 1; threads <= spec.cores_per_socket; ++threads) {
    if (spec.cores_per_socket % threads != 0) continue;
    RankPlan plan;
    plan.threads_per_rank = threads;
    plan.ranks_per_socket = spec.cores_per_socket / threads;
    plan.ranks = plan.ranks_per_socket * spec.sockets;
    plan.total_threads = plan.ranks * threads;
    plan.local_batch = local_batch;
    plan.global_batch = plan.ranks * local_batch;
    if (double(plan.ranks) * spec.mem_per_rank_gb > spec.mem_total_gb) continue;
    plans.push_back(plan);
  }
  if (plans.empty()) throw NoFeasiblePlanError("memory admits no rank placement");
  std::sort(plans.begin(), plans.end(),
            [](const RankPlan& a, const RankPlan& b) { return a.ranks > b.ranks; });
  return plans;
}

std::optional<std::string> check_plan(const SystemSpec& spec, const RankPlan& plan) {
  if (plan.ranks < 1 || plan.threads_per_rank < 1 || plan.local_batch < 1)
    return "counts must be positive";
  if (plan.total_threads != plan.ranks * plan.threads_per_rank)
    return "total_threads is not ranks * threads_per_rank";
  if (plan.total_threads != spec.sockets * spec.cores_per_socket)
    return "plan does not give every core exactly one thread";
  if (plan.ranks % spec.sockets != 0) return "ranks do not divide evenly across sockets";
  if (plan.ranks_per_socket != plan.ranks / spec.sockets)
    return "ranks_per_socket inconsistent with ranks";
  if (plan.ranks_per_socket * plan.threads_per_rank > spec.cores_per_socket)
    return "a rank would span sockets";
  if (double(plan.ranks) * spec.mem_per_rank_gb > spec.mem_total_gb)
    return "insufficient memory for this many ranks";
  if (plan.global_batch != plan.ranks * plan.local_batch)
    return "global_batch is not ranks * local_batch";
  return std::nullopt;
}

std::optional<std::string> batch_advisory(const RankPlan& plan, std::int64_t max_global_batch) {
  if (plan.global_batch <= max_global_batch) return std::nullopt;
  return "global batch " + std::to_string(plan.global_batch) + " exceeds the target " +
         std::to_string(max_global_batch) +
         " at " + std::to_string(plan.ranks) +
         " ranks; shrink the per-rank batch to keep the effective batch (and the point where "
         "training converges) steady while scaling out";
}

std::string plans_table(const std::vector<RankPlan>& plans,
                        std::optional<std::int64_t> max_global_batch) {
  std::string out;
  out += " ranks  threads_per_rank  ranks_per_socket  total_threads  local_batch  global_batch\n";
  out += "------  ----------------  ----------------  -------------  -----------  ------------\n";
  auto cell = [](std::int64_t v, std::size_t width) {
    std::string s = std::to_string(v);
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
  };
  for (const auto& p : plans) {
    out += cell(p.ranks, 6);
    out += "  " + cell(p.threads_per_rank, 16);
    out += "  " + cell(p.ranks_per_socket, 16);
    out += "  " + cell(p.total_threads, 13);
    out += "  " + cell(p.local_batch, 11);
    out += "  " + cell(p.global_batch, 12);
    out += '\n';
  }
  if (max_global_batch) {
    for (const auto& p : plans) {
      if (auto note = batch_advisory(p, *max_global_batch)) {
        out += '\n';
        out += "note: " + *note + '\n';
      }
    }
  }
  return out;
}

std::string plans_json(const SystemSpec& spec, const std::vector<RankPlan>& plans,
                       std::optional<std::int64_t> max_global_batch) {
  json j;
  j["type"] = "plan";
  j["system"] = {{"sockets", spec.sockets},
                 {"cores_per_socket", spec.cores_per_socket},
                 {"mem_total_gb", spec.mem_total_gb},
                 {"mem_per_rank_gb", spec.mem_per_rank_gb}};
  json items = json::array();
  for (const auto& p : plans) {
    json e;
    e["ranks"] = p.ranks;
    e["threads_per_rank"] = p.threads_per_rank;
    e["ranks_per_socket"] = p.ranks_per_socket;
    e["total_threads"] = p.total_threads;
    e["local_batch"] = p.local_batch;
    e["global_batch"] = p.global_batch;
    if (max_global_batch) {
      if (auto note = batch_advisory(p, *max_global_batch)) e["advisory"] = *note;
    }
    items.push_back(std::move(e));
  }
  j["plans"] = std::move(items);
  return j.dump(2) + "\n";
}

}  // namespace primscope
