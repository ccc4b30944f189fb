#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace primscope {

struct SystemSpec {
  std::int64_t sockets = 1;
  std::int64_t cores_per_socket = 1;
  double mem_total_gb = 0;     // > 0
  double mem_per_rank_gb = 0;  // > 0
};

struct RankPlan {
  std::int64_t ranks = 1;
  std::int64_t threads_per_rank = 1;
  std::int64_t ranks_per_socket = 1;
  std::int64_t total_threads = 1;  // = ranks * threads_per_rank = all cores
  std::int64_t local_batch = 1;
  std::int64_t global_batch = 1;  // = ranks * local_batch
};

/// All placements that keep every core busy with exactly one thread, never
/// let a rank span sockets (ranks divide evenly across sockets and fit within
/// a socket's cores), and fit memory. Sorted by ranks descending.
/// Throws InvalidParameterError on a bad spec/batch and NoFeasiblePlanError
/// when memory admits no plan.
std::vector<RankPlan> enumerate_plans(const SystemSpec& spec, std::int64_t local_batch);

/// Independent re-check of a plan against the spec; returns the first
/// violated constraint, if any.
std::optional<std::string> check_plan(const SystemSpec& spec, const RankPlan& plan);

/// Warns when a plan's global batch exceeds the given ceiling: large global
/// batches shift where training converges, so scale-out should shrink the
/// per-rank batch instead.
std::optional<std::string> batch_advisory(const RankPlan& plan, std::int64_t max_global_batch);

std::string plans_table(const std::vector<RankPlan>& plans,
                        std::optional<std::int64_t> max_global_batch = std::nullopt);
std::string plans_json(const SystemSpec& spec, const std::vector<RankPlan>& plans,
                       std::optional<std::int64_t> max_global_batch = std::nullopt);

}  // namespace primscope
