#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "primscope/profile_stats.hpp"

namespace primscope {

enum class OutputFormat { text, csv, json, svg };

std::string_view to_string(OutputFormat f);
std::optional<OutputFormat> format_from(std::string_view name);

struct ReportConfig {
  OutputFormat output_format = OutputFormat::text;
  int top_n = 10;                 // >= 1; SVG folds smaller groups into "other"
  std::uint64_t color_seed = 0;   // varies the SVG palette deterministically
  bool log_scale = false;         // diff SVG bar lengths on a log axis
};

/// Renders a summary in the configured format. text/csv/json emit valid
/// empty documents for an empty summary; svg throws EmptyChartError.
/// Output is byte-identical for identical inputs and config.
std::string render_summary(const ProfileSummary& summary, const ReportConfig& cfg);

/// Renders a diff: per-key ratios plus "missing in ..." callouts.
/// Same format/error behavior as render_summary.
std::string render_diff(const ProfileDiff& diff, const ReportConfig& cfg);

}  // namespace primscope
