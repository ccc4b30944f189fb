#include "primscope/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "json.hpp"

namespace primscope {

using nlohmann::json;

namespace {

std::int64_t dim_or_throw(const ProblemDescriptor& d, const char* key) {
  auto it = d.dims.find(key);
  if (it == d.dims.end())
    throw IncompleteDimsError(std::string("missing dim \"") + key + "\" for driver " +
                              d.driver_str());
  return it->second;
}

std::optional<std::int64_t> dim_of(const ProblemDescriptor& d, const char* key) {
  auto it = d.dims.find(key);
  if (it == d.dims.end()) return std::nullopt;
  return it->second;
}

std::int64_t conv_flops(const ProblemDescriptor& d) {
  std::int64_t flops = 2;
  for (const char* key : {"mb", "oc", "ic", "oh", "ow", "kh", "kw"})
    flops *= dim_or_throw(d, key);
  // Depth axis participates only when the problem is 3-D.
  auto od = dim_of(d, "od"), kd = dim_of(d, "kd");
  if (od) flops *= *od;
  if (kd) flops *= *kd;
  return flops;
}

std::int64_t matmul_flops(const ProblemDescriptor& d) {
  return 2 * dim_or_throw(d, "m") * dim_or_throw(d, "n") * dim_or_throw(d, "k");
}

std::int64_t ip_flops(const ProblemDescriptor& d) {
  if (dim_of(d, "m") && dim_of(d, "n") && dim_of(d, "k")) return matmul_flops(d);
  // Inner product as matmul: rows = batch, cols = oc, depth = ic x spatial.
  std::int64_t m = dim_or_throw(d, "mb");
  std::int64_t n = dim_or_throw(d, "oc");
  std::int64_t k = dim_or_throw(d, "ic");
  for (const char* key : {"id", "ih", "iw"})
    if (auto v = dim_of(d, key)) k *= *v;
  return 2 * m * n * k;
}

std::int64_t dst_element_count(const ProblemDescriptor& d) {
  std::int64_t count = 1;
  bool any = false;
  auto mul = [&](std::optional<std::int64_t> v) {
    if (v) {
      count *= *v;
      any = true;
    }
  };
  mul(dim_of(d, "mb"));
  if (auto oc = dim_of(d, "oc"))
    mul(oc);
  else
    mul(dim_of(d, "ic"));
  const char* out_axes[][2] = {{"od", "id"}, {"oh", "ih"}, {"ow", "iw"}};
  for (auto& axis : out_axes) {
    if (auto o = dim_of(d, axis[0]))
      mul(o);
    else
      mul(dim_of(d, axis[1]));
  }
  if (!any && dim_of(d, "m") && dim_of(d, "n")) {
    count = *dim_of(d, "m") * *dim_of(d, "n");
    any = true;
  }
  if (!any)
    throw IncompleteDimsError("cannot infer dst element count for driver " + d.driver_str());
  return count;
}

}  // namespace

std::int64_t estimate_flops(const ProblemDescriptor& d) {
  switch (d.driver) {
    case Driver::conv: return conv_flops(d);
    case Driver::matmul: return matmul_flops(d);
    case Driver::ip: return ip_flops(d);
    default: return dst_element_count(d);
  }
}

BenchResultMap synthetic_run(const DescriptorSet& set, const CostModel& model) {
  if (model.mode == CostModel::Mode::constant_per_driver) {
    for (const auto& [driver, ms] : model.driver_constants_ms)
      if (!(ms > 0))
        throw InvalidParameterError("driver constant for " + driver + " must be positive");
  }
  if (model.mode == CostModel::Mode::flops_linear && !(model.seconds_per_flop > 0))
    throw InvalidParameterError("seconds_per_flop must be positive");

  BenchResultMap out;
  for (const auto& [id, stats] : set.entries) {
    double cost_ms = 0;
    switch (model.mode) {
      case CostModel::Mode::constant_per_driver: {
        auto it = model.driver_constants_ms.find(stats.descriptor.driver_str());
        if (it == model.driver_constants_ms.end()) continue;  // driver not modeled
        cost_ms = it->second;
        break;
      }
      case CostModel::Mode::flops_linear:
        cost_ms = double(estimate_flops(stats.descriptor)) * model.seconds_per_flop * 1000.0;
        break;
      case CostModel::Mode::echo: cost_ms = stats.observed_avg_ms; break;
    }
    BenchResult r;
    r.descriptor_id = id;
    r.avg_ms = cost_ms;
    r.min_ms = cost_ms;
    r.runs = 1;
    out.emplace(id, std::move(r));
  }
  return out;
}

namespace {

double safe_ratio(double numerator, double denominator) {
  if (denominator == 0.0 && numerator == 0.0) return 1.0;
  if (denominator == 0.0) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

}  // namespace

ProjectionReport project(const DescriptorSet& set, const BenchResultMap& results,
                         const ProjectOptions& opts) {
  ProjectionReport report;
  double all_observed = set.unmapped_time_ms;
  double matched_observed = 0, matched_achievable = 0;
  std::map<std::string, std::pair<double, double>> by_driver;  // observed, achievable

  for (const auto& [id, stats] : set.entries) {
    all_observed += stats.observed_total_ms;
    auto it = results.find(id);
    if (it == results.end()) continue;
    ProjectionEntry e;
    e.calls = stats.call_count;
    e.observed_avg_ms = stats.observed_avg_ms;
    e.achievable_ms = opts.use_avg_as_achievable ? it->second.avg_ms : it->second.min_ms;
    e.observed_total_ms = stats.observed_total_ms;
    e.achievable_total_ms = double(e.calls) * e.achievable_ms;
    matched_observed += e.observed_total_ms;
    matched_achievable += e.achievable_total_ms;
    auto& acc = by_driver[stats.descriptor.driver_str()];
    acc.first += e.observed_total_ms;
    acc.second += e.achievable_total_ms;
    report.per_entry.emplace(id, e);
  }
  if (report.per_entry.empty())
    throw NoCoverageError("no benchmark result matches any descriptor");
  report.overall_efficiency = safe_ratio(matched_achievable, matched_observed);
  for (const auto& [driver, acc] : by_driver)
    report.per_kind_efficiency.emplace(driver, safe_ratio(acc.second, acc.first));
  report.coverage = all_observed == 0.0 ? 1.0 : matched_observed / all_observed;
  return report;
}

namespace {

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string fmt_cell(double v, int precision) {
  if (std::isinf(v)) return "inf";
  return detail::fmt_fixed(v, precision);
}

}  // namespace

std::string projection_table(const ProjectionReport& report, std::optional<double> threshold) {
  std::string out;
  out += " calls  observed_avg_ms  achievable_ms  efficiency  descriptor\n";
  out += "------  ---------------  -------------  ----------  ----------\n";
  for (const auto& [id, e] : report.per_entry) {
    double eff = safe_ratio(e.achievable_total_ms, e.observed_total_ms);
    out += pad_left(std::to_string(e.calls), 6);
    out += "  " + pad_left(fmt_cell(e.observed_avg_ms, 6), 15);
    out += "  " + pad_left(fmt_cell(e.achievable_ms, 6), 13);
    out += "  " + pad_left(fmt_cell(eff, 4), 10);
    out += "  " + id;
    if (threshold && eff < *threshold) out += "  [candidate]";
    out += '\n';
  }
  out += '\n';
  out += "overall_efficiency  " + fmt_cell(report.overall_efficiency, 6) + '\n';
  out += "coverage            " + fmt_cell(report.coverage, 6) + '\n';
  for (const auto& [driver, eff] : report.per_kind_efficiency)
    out += "efficiency[" + driver + "]  " + fmt_cell(eff, 6) + '\n';
  return out;
}

namespace {

json finite_or_null(double v) {
  if (std::isinf(v) || std::isnan(v)) return nullptr;
  return v;
}

double from_finite_or_null(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  return v.get<double>();
}

}  // namespace

std::string projection_json(const ProjectionReport& report) {
  json j;
  j["type"] = "projection";
  j["overall_efficiency"] = finite_or_null(report.overall_efficiency);
  j["coverage"] = report.coverage;
  json kinds = json::object();
  for (const auto& [driver, eff] : report.per_kind_efficiency) kinds[driver] = finite_or_null(eff);
  j["per_kind_efficiency"] = std::move(kinds);
  json entries = json::array();
  for (const auto& [id, e] : report.per_entry) {
    json entry;
    entry["descriptor_id"] = id;
    entry["calls"] = e.calls;
    entry["observed_avg_ms"] = e.observed_avg_ms;
    entry["achievable_ms"] = e.achievable_ms;
    entry["observed_total_ms"] = e.observed_total_ms;
    entry["achievable_total_ms"] = e.achievable_total_ms;
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

ProjectionReport projection_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError(0, "invalid JSON for projection");
  if (!j.is_object() || j.value("type", "") != "projection")
    throw FormatError(0, "expected a projection document (type=\"projection\")");
  ProjectionReport report;
  report.overall_efficiency = from_finite_or_null(j.at("overall_efficiency"));
  report.coverage = j.value("coverage", 0.0);
  const json per_kind = j.value("per_kind_efficiency", json::object());
  for (const auto& [driver, eff] : per_kind.items())
    report.per_kind_efficiency.emplace(driver, from_finite_or_null(eff));
  for (const auto& e : j.value("entries", json::array())) {
    ProjectionEntry entry;
    entry.calls = e.value("calls", std::uint64_t(0));
    entry.observed_avg_ms = e.value("observed_avg_ms", 0.0);
    entry.achievable_ms = e.value("achievable_ms", 0.0);
    entry.observed_total_ms = e.value("observed_total_ms", 0.0);
    entry.achievable_total_ms = e.value("achievable_total_ms", 0.0);
    report.per_entry.emplace(e.at("descriptor_id").get<std::string>(), entry);
  }
  return report;
}

}  // namespace primscope
