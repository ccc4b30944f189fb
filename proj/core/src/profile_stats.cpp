#include "primscope/profile_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "internal.hpp"
#include "json.hpp"

namespace primscope {

using nlohmann::json;

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kind: return "kind";
    case Granularity::kind_direction: return "kind-dir";
    case Granularity::kind_direction_dtype: return "kind-dir-dtype";
  }
  return "kind";
}

std::optional<Granularity> granularity_from(std::string_view name) {
  if (name == "kind") return Granularity::kind;
  if (name == "kind-dir") return Granularity::kind_direction;
  if (name == "kind-dir-dtype") return Granularity::kind_direction_dtype;
  return std::nullopt;
}

std::string GroupKey::kind_str() const {
  if (kind == PrimitiveKind::other && !kind_name.empty()) return kind_name;
  return std::string(primscope::to_string(kind));
}

std::string GroupKey::to_string() const {
  std::string out = kind_str();
  if (direction) {
    out += '/';
    out += primscope::to_string(*direction);
  }
  if (data_type) {
    out += '/';
    out += *data_type;
  }
  return out;
}

bool GroupKey::operator<(const GroupKey& o) const {
  auto dir_str = [](const std::optional<Direction>& d) {
    return d ? std::string(primscope::to_string(*d)) : std::string();
  };
  return std::make_tuple(kind_str(), dir_str(direction), data_type.value_or(std::string())) <
         std::make_tuple(o.kind_str(), dir_str(o.direction), o.data_type.value_or(std::string()));
}

std::string configuration_of(const PrimitiveRecord& rec) {
  // Slot order follows the benchmark configuration convention: data in,
  // weights, data out. Backward tensors stand in for missing forward roles.
  auto find = [&](TensorRole a, TensorRole b) -> const TensorDesc* {
    for (const auto& t : rec.tensors)
      if (t.role == a) return &t;
    for (const auto& t : rec.tensors)
      if (t.role == b) return &t;
    return nullptr;
  };
  const TensorDesc* slots[3] = {
      find(TensorRole::src, TensorRole::diff_src),
      find(TensorRole::wei, TensorRole::diff_wei),
      find(TensorRole::dst, TensorRole::diff_dst),
  };
  std::vector<std::string> parts;
  for (const TensorDesc* t : slots) {
    if (t && t->data_type != DataType::undef) parts.emplace_back(primscope::to_string(t->data_type));
  }
  if (parts.empty()) return "f32";
  bool uniform = std::all_of(parts.begin(), parts.end(),
                             [&](const std::string& p) { return p == parts.front(); });
  if (uniform) return parts.front();
  std::string out;
  for (const auto& p : parts) out += p;
  return out;
}

static GroupKey key_of(const PrimitiveRecord& rec, Granularity g) {
  GroupKey key;
  key.kind = rec.primitive_kind;
  if (rec.primitive_kind == PrimitiveKind::other) key.kind_name = rec.primitive_name;
  if (g == Granularity::kind_direction || g == Granularity::kind_direction_dtype)
    key.direction = rec.direction;
  if (g == Granularity::kind_direction_dtype) key.data_type = configuration_of(rec);
  return key;
}

ProfileSummary summarize(const ProfileLog& log, Granularity granularity,
                         const SummarizeOptions& opts) {
  ProfileSummary out;
  out.granularity = granularity;
  std::map<GroupKey, OpGroupStat> acc;
  for (const auto& rec : log.records) {
    if (rec.event_kind == EventKind::create && !opts.include_create) continue;
    GroupKey key = key_of(rec, granularity);
    auto& stat = acc[key];
    stat.key = key;
    stat.call_count += 1;
    stat.total_time_ms += rec.time_ms;
  }
  for (auto& [key, stat] : acc) {
    out.total_time_ms += stat.total_time_ms;
    out.total_calls += stat.call_count;
  }
  out.groups.reserve(acc.size());
  for (auto& [key, stat] : acc) {
    stat.avg_time_ms = stat.call_count ? stat.total_time_ms / double(stat.call_count) : 0.0;
    stat.share = out.total_time_ms > 0 ? stat.total_time_ms / out.total_time_ms : 0.0;
    out.groups.push_back(std::move(stat));
  }
  std::sort(out.groups.begin(), out.groups.end(), [](const OpGroupStat& a, const OpGroupStat& b) {
    if (a.total_time_ms != b.total_time_ms) return a.total_time_ms > b.total_time_ms;
    return a.key < b.key;
  });
  return out;
}

static double ratio_of(double ref, double target) {
  if (ref == 0.0 && target == 0.0) return 1.0;
  if (ref == 0.0) return std::numeric_limits<double>::infinity();
  return target / ref;
}

ProfileDiff compare(const ProfileSummary& reference, const ProfileSummary& target) {
  if (reference.granularity != target.granularity)
    throw GranularityMismatchError("cannot compare summaries at different granularities");
  ProfileDiff out;
  out.granularity = reference.granularity;
  std::map<GroupKey, const OpGroupStat*> ref_by_key, tgt_by_key;
  for (const auto& g : reference.groups) ref_by_key.emplace(g.key, &g);
  for (const auto& g : target.groups) tgt_by_key.emplace(g.key, &g);
  for (const auto& [key, rg] : ref_by_key) {
    auto it = tgt_by_key.find(key);
    if (it == tgt_by_key.end()) {
      out.missing_in_target.insert(key);
      continue;
    }
    DiffEntry e;
    e.ref_time_ms = rg->total_time_ms;
    e.target_time_ms = it->second->total_time_ms;
    e.ref_calls = rg->call_count;
    e.target_calls = it->second->call_count;
    e.ratio = ratio_of(e.ref_time_ms, e.target_time_ms);
    out.per_key.emplace(key, e);
  }
  for (const auto& [key, tg] : tgt_by_key) {
    if (!ref_by_key.count(key)) out.missing_in_reference.insert(key);
  }
  out.overall_ratio = ratio_of(reference.total_time_ms, target.total_time_ms);
  return out;
}

double fragmentation(std::span<const TraceSpan> spans) {
  if (spans.size() <= 1) return 0.0;
  std::size_t switches = 0;
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i].name != spans[i - 1].name) ++switches;
  return double(switches) / double(spans.size() - 1);
}

std::vector<TraceSpan> spans_from_log(const ProfileLog& log) {
  std::vector<TraceSpan> out;
  double clock = 0.0;
  for (const auto& rec : log.records) {
    if (rec.event_kind != EventKind::exec) continue;
    TraceSpan s;
    s.name = rec.primitive_str();
    s.start = clock;
    clock += rec.time_ms;
    s.end = clock;
    out.push_back(std::move(s));
  }
  return out;
}

std::string summary_csv(const ProfileSummary& summary) {
  std::string out = "key,calls,total_ms,avg_ms,share\n";
  for (const auto& g : summary.groups) {
    out += g.key.to_string();
    out += ',';
    out += std::to_string(g.call_count);
    out += ',';
    out += detail::fmt_double(g.total_time_ms);
    out += ',';
    out += detail::fmt_double(g.avg_time_ms);
    out += ',';
    out += detail::fmt_double(g.share);
    out += '\n';
  }
  return out;
}

static json key_to_json(const GroupKey& key) {
  json j;
  j["kind"] = key.kind_str();
  if (key.direction) j["direction"] = std::string(to_string(*key.direction));
  if (key.data_type) j["data_type"] = *key.data_type;
  return j;
}

static GroupKey key_from_json(const json& j) {
  GroupKey key;
  std::string kind = j.at("kind").get<std::string>();
  key.kind = primitive_kind_from(kind);
  if (key.kind == PrimitiveKind::other) key.kind_name = kind;
  if (j.contains("direction")) key.direction = direction_from(j["direction"].get<std::string>());
  if (j.contains("data_type")) key.data_type = j["data_type"].get<std::string>();
  return key;
}

std::string summary_json(const ProfileSummary& summary, std::optional<double> fragmentation_score) {
  json j;
  j["type"] = "summary";
  j["granularity"] = std::string(to_string(summary.granularity));
  j["total_time_ms"] = summary.total_time_ms;
  j["total_calls"] = summary.total_calls;
  if (fragmentation_score) j["fragmentation"] = *fragmentation_score;
  json groups = json::array();
  for (const auto& g : summary.groups) {
    json e;
    e["key"] = key_to_json(g.key);
    e["call_count"] = g.call_count;
    e["total_time_ms"] = g.total_time_ms;
    e["avg_time_ms"] = g.avg_time_ms;
    e["share"] = g.share;
    groups.push_back(std::move(e));
  }
  j["groups"] = std::move(groups);
  return j.dump(2) + "\n";
}

static json parse_json_or_throw(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError(0, std::string("invalid JSON for ") + what);
  return j;
}

ProfileSummary summary_from_json(const std::string& text) {
  json j = parse_json_or_throw(text, "summary");
  if (!j.is_object() || j.value("type", "") != "summary")
    throw FormatError(0, "expected a summary document (type=\"summary\")");
  ProfileSummary out;
  auto g = granularity_from(j.value("granularity", "kind"));
  out.granularity = g.value_or(Granularity::kind);
  out.total_time_ms = j.value("total_time_ms", 0.0);
  out.total_calls = j.value("total_calls", std::uint64_t(0));
  for (const auto& e : j.value("groups", json::array())) {
    OpGroupStat stat;
    stat.key = key_from_json(e.at("key"));
    stat.call_count = e.value("call_count", std::uint64_t(0));
    stat.total_time_ms = e.value("total_time_ms", 0.0);
    stat.avg_time_ms = e.value("avg_time_ms", 0.0);
    stat.share = e.value("share", 0.0);
    out.groups.push_back(std::move(stat));
  }
  return out;
}

static std::string csv_ratio(double r) {
  if (std::isinf(r)) return "inf";
  return detail::fmt_double(r);
}

std::string diff_csv(const ProfileDiff& diff) {
  std::string out = "key,status,ref_calls,target_calls,ref_total_ms,target_total_ms,ratio\n";
  for (const auto& [key, e] : diff.per_key) {
    out += key.to_string();
    out += ",both,";
    out += std::to_string(e.ref_calls);
    out += ',';
    out += std::to_string(e.target_calls);
    out += ',';
    out += detail::fmt_double(e.ref_time_ms);
    out += ',';
    out += detail::fmt_double(e.target_time_ms);
    out += ',';
    out += csv_ratio(e.ratio);
    out += '\n';
  }
  for (const auto& key : diff.missing_in_target) out += key.to_string() + ",missing_in_target,,,,,\n";
  for (const auto& key : diff.missing_in_reference)
    out += key.to_string() + ",missing_in_reference,,,,,\n";
  return out;
}

std::string diff_json(const ProfileDiff& diff) {
  json j;
  j["type"] = "diff";
  j["granularity"] = std::string(to_string(diff.granularity));
  if (std::isinf(diff.overall_ratio))
    j["overall_ratio"] = nullptr;  // +inf sentinel; JSON has no Inf literal
  else
    j["overall_ratio"] = diff.overall_ratio;
  json per_key = json::array();
  for (const auto& [key, e] : diff.per_key) {
    json entry;
    entry["key"] = key_to_json(key);
    entry["ref_time_ms"] = e.ref_time_ms;
    entry["target_time_ms"] = e.target_time_ms;
    if (std::isinf(e.ratio))
      entry["ratio"] = nullptr;
    else
      entry["ratio"] = e.ratio;
    entry["ref_calls"] = e.ref_calls;
    entry["target_calls"] = e.target_calls;
    per_key.push_back(std::move(entry));
  }
  j["per_key"] = std::move(per_key);
  json mt = json::array(), mr = json::array();
  for (const auto& key : diff.missing_in_target) mt.push_back(key_to_json(key));
  for (const auto& key : diff.missing_in_reference) mr.push_back(key_to_json(key));
  j["missing_in_target"] = std::move(mt);
  j["missing_in_reference"] = std::move(mr);
  return j.dump(2) + "\n";
}

static double ratio_from_json(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

ProfileDiff diff_from_json(const std::string& text) {
  json j = parse_json_or_throw(text, "diff");
  if (!j.is_object() || j.value("type", "") != "diff")
    throw FormatError(0, "expected a diff document (type=\"diff\")");
  ProfileDiff out;
  auto g = granularity_from(j.value("granularity", "kind"));
  out.granularity = g.value_or(Granularity::kind);
  out.overall_ratio = ratio_from_json(j.at("overall_ratio"));
  for (const auto& e : j.value("per_key", json::array())) {
    DiffEntry entry;
    entry.ref_time_ms = e.value("ref_time_ms", 0.0);
    entry.target_time_ms = e.value("target_time_ms", 0.0);
    entry.ratio = ratio_from_json(e.at("ratio"));
    entry.ref_calls = e.value("ref_calls", std::uint64_t(0));
    entry.target_calls = e.value("target_calls", std::uint64_t(0));
    out.per_key.emplace(key_from_json(e.at("key")), entry);
  }
  for (const auto& k : j.value("missing_in_target", json::array()))
    out.missing_in_target.insert(key_from_json(k));
  for (const auto& k : j.value("missing_in_reference", json::array()))
    out.missing_in_reference.insert(key_from_json(k));
  return out;
}

}  // namespace primscope
