#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "primscope/verbose_log.hpp"

namespace primscope {

/// Aggregation granularity for kernel-time breakdowns.
enum class Granularity { kind, kind_direction, kind_direction_dtype };

std::string_view to_string(Granularity g);
std::optional<Granularity> granularity_from(std::string_view name);

/// Group identity at the selected granularity. Components beyond the
/// granularity are absent.
struct GroupKey {
  PrimitiveKind kind = PrimitiveKind::other;
  std::string kind_name;  // raw name when kind == other
  std::optional<Direction> direction;
  std::optional<std::string> data_type;  // dtype configuration string, e.g. "f32", "u8s8u8"

  std::string kind_str() const;
  std::string to_string() const;  // components joined by "/"

  bool operator==(const GroupKey&) const = default;
  bool operator<(const GroupKey& o) const;  // lexicographic by components
};

struct OpGroupStat {
  GroupKey key;
  std::uint64_t call_count = 0;
  double total_time_ms = 0;
  double avg_time_ms = 0;
  double share = 0;  // fraction of summary total, in [0,1]
};

/// Per-group totals sorted by total_time_ms descending (ties by key).
struct ProfileSummary {
  std::vector<OpGroupStat> groups;
  double total_time_ms = 0;
  std::uint64_t total_calls = 0;
  Granularity granularity = Granularity::kind;
};

struct SummarizeOptions {
  bool include_create = false;  // create events are one-time setup; off by default
};

/// The dtype component used at kind_direction_dtype granularity: src/wei/dst
/// dtypes (diff_* fall back for missing forward roles), collapsed to a single
/// name when uniform, "f32" when the record carries no tensors.
std::string configuration_of(const PrimitiveRecord& rec);

ProfileSummary summarize(const ProfileLog& log, Granularity granularity,
                         const SummarizeOptions& opts = {});

struct DiffEntry {
  double ref_time_ms = 0;
  double target_time_ms = 0;
  double ratio = 0;  // target/ref; +inf when ref is 0 and target > 0; 1 when both 0
  std::uint64_t ref_calls = 0;
  std::uint64_t target_calls = 0;
};

/// Pairwise comparison of two summaries at the same granularity.
struct ProfileDiff {
  std::map<GroupKey, DiffEntry> per_key;
  std::set<GroupKey> missing_in_target;
  std::set<GroupKey> missing_in_reference;
  double overall_ratio = 0;
  Granularity granularity = Granularity::kind;
};

/// Throws GranularityMismatchError when the summaries disagree.
ProfileDiff compare(const ProfileSummary& reference, const ProfileSummary& target);

struct TraceSpan {
  std::string name;
  double start = 0;
  double end = 0;  // >= start
  std::optional<std::size_t> parent;
};

/// Adjacent-name-switch density in [0,1]: switches / (len-1); 0 for len <= 1.
double fragmentation(std::span<const TraceSpan> spans);

/// Synthesizes spans from exec records (cumulative time axis) for
/// fragmentation scoring of a log.
std::vector<TraceSpan> spans_from_log(const ProfileLog& log);

/// CSV export: key,calls,total_ms,avg_ms,share
std::string summary_csv(const ProfileSummary& summary);
std::string summary_json(const ProfileSummary& summary,
                         std::optional<double> fragmentation_score = std::nullopt);
ProfileSummary summary_from_json(const std::string& text);

/// CSV export: key,status,ref_calls,target_calls,ref_total_ms,target_total_ms,ratio
std::string diff_csv(const ProfileDiff& diff);
std::string diff_json(const ProfileDiff& diff);
ProfileDiff diff_from_json(const std::string& text);

}  // namespace primscope
