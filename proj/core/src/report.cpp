#include "primscope/report.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "internal.hpp"

namespace primscope {

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::text: return "text";
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "text";
}

std::optional<OutputFormat> format_from(std::string_view name) {
  if (name == "text") return OutputFormat::text;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "svg") return OutputFormat::svg;
  return std::nullopt;
}

namespace {

void check_config(const ReportConfig& cfg) {
  if (cfg.top_n < 1) throw InvalidParameterError("top_n must be >= 1");
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pct(double share) { return detail::fmt_fixed(share * 100.0, 1) + "%"; }

std::string ratio_text(double r) {
  if (std::isinf(r)) return "inf";
  return detail::fmt_fixed(r, 4);
}

// FNV-1a over the name, stirred with the seed; mapped to an HSL color so
// nearby hashes still give visually distinct hues.
std::string color_for(const std::string& name, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9E3779B97F4A7C15ull);
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  unsigned hue = unsigned(h % 360);
  unsigned sat = 45 + unsigned((h / 360) % 31);
  unsigned light = 38 + unsigned((h / 11160) % 25);
  return "hsl(" + std::to_string(hue) + "," + std::to_string(sat) + "%," +
         std::to_string(light) + "%)";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Segment {
  std::string name;
  double total_ms = 0;
  double share = 0;
};

std::string text_summary(const ProfileSummary& summary) {
  std::string out;
  out += "granularity " + std::string(to_string(summary.granularity)) + "\n";
  out += "total_time_ms " + detail::fmt_double(summary.total_time_ms) + "\n";
  out += "total_calls " + std::to_string(summary.total_calls) + "\n";
  out += "\n";
  out += " share      calls     total_ms       avg_ms  key\n";
  out += "------  ---------  -----------  -----------  ---\n";
  for (const auto& g : summary.groups) {
    out += pad_left(pct(g.share), 6);
    out += "  " + pad_left(std::to_string(g.call_count), 9);
    out += "  " + pad_left(detail::fmt_fixed(g.total_time_ms, 4), 11);
    out += "  " + pad_left(detail::fmt_fixed(g.avg_time_ms, 4), 11);
    out += "  " + g.key.to_string();
    out += '\n';
  }
  return out;
}

std::string svg_header(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
}

std::string svg_summary(const ProfileSummary& summary, const ReportConfig& cfg) {
  if (summary.groups.empty()) throw EmptyChartError("empty summary has nothing to chart");

  // groups arrive sorted by total time, so the fold keeps the heaviest ones
  std::vector<Segment> segments;
  for (const auto& g : summary.groups) {
    if (int(segments.size()) < cfg.top_n) {
      segments.push_back({g.key.to_string(), g.total_time_ms, g.share});
      continue;
    }
    if (segments.size() == std::size_t(cfg.top_n)) segments.push_back({"other", 0, 0});
    segments.back().total_ms += g.total_time_ms;
    segments.back().share += g.share;
  }

  const int kWidth = 800, kHeight = 120;
  const int bar_y = 40, bar_h = 40;
  double total = 0;
  for (const auto& s : segments) total += s.total_ms;

  std::string out = svg_header(kWidth, kHeight);
  out += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"120\" fill=\"white\"/>\n";

  // Cumulative rounding: segment widths always sum to exactly the bar width.
  double cum = 0;
  int prev_edge = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    double frac = total > 0 ? s.total_ms / total : 1.0 / double(segments.size());
    cum += frac;
    int edge = int(std::lround(cum * kWidth));
    if (i + 1 == segments.size()) edge = kWidth;
    int x = prev_edge, w = edge - prev_edge;
    prev_edge = edge;
    std::string label = xml_escape(s.name) + " " + pct(s.share);
    out += "  <g>\n";
    out += "    <title>" + label + "</title>\n";
    out += "    <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(bar_y) +
           "\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(bar_h) +
           "\" fill=\"" + color_for(s.name, cfg.color_seed) + "\" stroke=\"white\"/>\n";
    if (w >= 48) {
      out += "    <text x=\"" + std::to_string(x + w / 2) + "\" y=\"" +
             std::to_string(bar_y + bar_h / 2 + 4) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
             "fill=\"white\">" +
             pct(s.share) + "</text>\n";
    }
    out += "  </g>\n";
  }
  out += "  <text x=\"0\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">" +
         std::string("total ") + detail::fmt_fixed(summary.total_time_ms, 3) + " ms, " +
         std::to_string(summary.total_calls) + " calls (" +
         std::string(to_string(summary.granularity)) + ")</text>\n";
  out += "</svg>\n";
  return out;
}

std::string text_diff(const ProfileDiff& diff) {
  std::string out;
  out += "granularity " + std::string(to_string(diff.granularity)) + "\n";
  out += "overall_ratio " + ratio_text(diff.overall_ratio) + "\n";
  out += "\n";
  out += "   ratio  ref_calls  tgt_calls   ref_total_ms   tgt_total_ms  key\n";
  out += "--------  ---------  ---------  -------------  -------------  ---\n";
  for (const auto& [key, e] : diff.per_key) {
    out += pad_left(ratio_text(e.ratio), 8);
    out += "  " + pad_left(std::to_string(e.ref_calls), 9);
    out += "  " + pad_left(std::to_string(e.target_calls), 9);
    out += "  " + pad_left(detail::fmt_fixed(e.ref_time_ms, 4), 13);
    out += "  " + pad_left(detail::fmt_fixed(e.target_time_ms, 4), 13);
    out += "  " + key.to_string();
    out += '\n';
  }
  for (const auto& key : diff.missing_in_target)
    out += "missing in target: " + key.to_string() + "\n";
  for (const auto& key : diff.missing_in_reference)
    out += "missing in reference: " + key.to_string() + "\n";
  return out;
}

std::string svg_diff(const ProfileDiff& diff, const ReportConfig& cfg) {
  if (diff.per_key.empty() && diff.missing_in_target.empty() && diff.missing_in_reference.empty())
    throw EmptyChartError("empty diff has nothing to chart");

  const int kWidth = 800, kRowH = 120;
  const int rows = int(diff.per_key.size());
  const int callouts = int(diff.missing_in_target.size() + diff.missing_in_reference.size());
  const int height = std::max(kRowH, rows * kRowH + (callouts > 0 ? callouts * 20 + 10 : 0));

  double max_ratio = 1.0;
  bool has_inf = false;
  for (const auto& [key, e] : diff.per_key) {
    if (std::isinf(e.ratio))
      has_inf = true;
    else
      max_ratio = std::max(max_ratio, e.ratio);
  }
  auto bar_frac = [&](double r) -> double {
    if (std::isinf(r)) return 1.0;
    if (cfg.log_scale) {
      // map [1e-3, max] onto (0, 1] on a log axis
      double lo = -3.0, hi = std::log10(std::max(max_ratio, 1.001e-3));
      double v = std::log10(std::max(r, 1e-3));
      return (v - lo) / (hi - lo);
    }
    return r / max_ratio;
  };
  (void)has_inf;

  std::string out = svg_header(kWidth, height);
  out += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";
  int row = 0;
  for (const auto& [key, e] : diff.per_key) {
    int y0 = row * kRowH;
    std::string name = key.to_string();
    int w = std::max(1, int(std::lround(bar_frac(e.ratio) * kWidth)));
    std::string label = xml_escape(name) + " ratio=" + ratio_text(e.ratio);
    out += "  <g>\n";
    out += "    <title>" + label + "</title>\n";
    out += "    <text x=\"0\" y=\"" + std::to_string(y0 + 30) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">" + label +
           "</text>\n";
    out += "    <rect x=\"0\" y=\"" + std::to_string(y0 + 45) + "\" width=\"" +
           std::to_string(w) + "\" height=\"40\" fill=\"" + color_for(name, cfg.color_seed) +
           "\"/>\n";
    out += "  </g>\n";
    ++row;
  }
  int text_y = rows * kRowH + 20;
  for (const auto& key : diff.missing_in_target) {
    out += "  <text x=\"0\" y=\"" + std::to_string(text_y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">missing in target: " +
           xml_escape(key.to_string()) + "</text>\n";
    text_y += 20;
  }
  for (const auto& key : diff.missing_in_reference) {
    out += "  <text x=\"0\" y=\"" + std::to_string(text_y) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">missing in reference: " +
           xml_escape(key.to_string()) + "</text>\n";
    text_y += 20;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_summary(const ProfileSummary& summary, const ReportConfig& cfg) {
  check_config(cfg);
  switch (cfg.output_format) {
    case OutputFormat::text: return text_summary(summary);
    case OutputFormat::csv: return summary_csv(summary);
    case OutputFormat::json: return summary_json(summary);
    case OutputFormat::svg: return svg_summary(summary, cfg);
  }
  throw InvalidParameterError("bad output format");
}

std::string render_diff(const ProfileDiff& diff, const ReportConfig& cfg) {
  check_config(cfg);
  switch (cfg.output_format) {
    case OutputFormat::text: return text_diff(diff);
    case OutputFormat::csv: return diff_csv(diff);
    case OutputFormat::json: return diff_json(diff);
    case OutputFormat::svg: return svg_diff(diff, cfg);
  }
  throw InvalidParameterError("bad output format");
}

}  // namespace primscope
