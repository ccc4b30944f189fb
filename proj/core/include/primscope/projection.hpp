#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "primscope/bench_descriptor.hpp"

namespace primscope {

/// flops for one problem: conv and matmul/ip count multiply-adds times two,
/// everything else falls back to the dst element count (memory-bound proxy).
/// Throws IncompleteDimsError when the driver's formula lacks dims.
std::int64_t estimate_flops(const ProblemDescriptor& d);

/// Synthetic stand-in for the external benchmark runner.
struct CostModel {
  enum class Mode {
    constant_per_driver,  // fixed ms per driver name
    flops_linear,         // ms = flops * seconds_per_flop * 1000
    echo,                 // ms = the entry's own observed average
  };
  Mode mode = Mode::echo;
  std::map<std::string, double> driver_constants_ms;  // keyed by driver_str
  double seconds_per_flop = 0.0;
};

/// Deterministic results for a descriptor set: avg_ms = min_ms = model cost,
/// runs = 1. constant_per_driver skips entries whose driver has no constant.
/// Throws InvalidParameterError on non-positive model parameters;
/// flops_linear propagates IncompleteDimsError.
BenchResultMap synthetic_run(const DescriptorSet& set, const CostModel& model);

struct ProjectionEntry {
  std::uint64_t calls = 0;
  double observed_avg_ms = 0;
  double achievable_ms = 0;  // benchmark best (or avg, per options)
  double observed_total_ms = 0;
  double achievable_total_ms = 0;
};

struct ProjectionReport {
  std::map<std::string, ProjectionEntry> per_entry;  // keyed by descriptor_id
  double overall_efficiency = 0;                     // achievable / observed, call-weighted
  std::map<std::string, double> per_kind_efficiency; // keyed by driver_str
  double coverage = 0;  // matched observed time / all observed time
};

struct ProjectOptions {
  /// Achievable defaults to the benchmark's best (min) time; set to use avg.
  bool use_avg_as_achievable = false;
};

/// Weighted efficiency projection over entries present in both the set and
/// the results. Throws NoCoverageError when nothing matches.
ProjectionReport project(const DescriptorSet& set, const BenchResultMap& results,
                         const ProjectOptions& opts = {});

/// Fixed-width text table; entries with per-entry efficiency below `threshold`
/// are marked as optimization candidates.
std::string projection_table(const ProjectionReport& report,
                             std::optional<double> threshold = std::nullopt);
std::string projection_json(const ProjectionReport& report);
ProjectionReport projection_from_json(const std::string& text);

}  // namespace primscope
