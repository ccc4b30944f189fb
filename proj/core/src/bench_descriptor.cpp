#include "primscope/bench_descriptor.hpp"

#include <algorithm>
#include <array>

#include "internal.hpp"
#include "primscope/error.hpp"
#include "primscope/profile_stats.hpp"

namespace primscope {

using detail::split;
using detail::split_ws;
using detail::strip_cr;

std::string_view to_string(Driver d) {
  switch (d) {
    case Driver::conv: return "conv";
    case Driver::eltwise: return "eltwise";
    case Driver::matmul: return "matmul";
    case Driver::rnn: return "rnn";
    case Driver::bnorm: return "bnorm";
    case Driver::pool: return "pool";
    case Driver::reorder: return "reorder";
    case Driver::softmax: return "softmax";
    case Driver::ip: return "ip";
    case Driver::other: return "other";
  }
  return "other";
}

std::optional<Driver> driver_from(std::string_view name) {
  if (name == "conv") return Driver::conv;
  if (name == "eltwise" || name == "relu") return Driver::eltwise;
  if (name == "matmul") return Driver::matmul;
  if (name == "rnn") return Driver::rnn;
  if (name == "bnorm") return Driver::bnorm;
  if (name == "pool") return Driver::pool;
  if (name == "reorder") return Driver::reorder;
  if (name == "softmax") return Driver::softmax;
  if (name == "ip") return Driver::ip;
  return std::nullopt;
}

std::string_view to_string(Directory d) {
  switch (d) {
    case Directory::FWD_I: return "FWD_I";
    case Directory::FWD_D: return "FWD_D";
    case Directory::FWD_B: return "FWD_B";
    case Directory::BWD_D: return "BWD_D";
    case Directory::BWD_W: return "BWD_W";
    case Directory::BWD_WB: return "BWD_WB";
    case Directory::BWD_DW: return "BWD_DW";
  }
  return "FWD_I";
}

std::optional<Directory> directory_from(std::string_view name) {
  if (name == "FWD_I") return Directory::FWD_I;
  if (name == "FWD_D") return Directory::FWD_D;
  if (name == "FWD_B") return Directory::FWD_B;
  if (name == "BWD_D") return Directory::BWD_D;
  if (name == "BWD_W") return Directory::BWD_W;
  if (name == "BWD_WB") return Directory::BWD_WB;
  if (name == "BWD_DW") return Directory::BWD_DW;
  return std::nullopt;
}

std::string ProblemDescriptor::driver_str() const {
  if (driver == Driver::other && !driver_name.empty()) return driver_name;
  return std::string(primscope::to_string(driver));
}

std::string ProblemDescriptor::problem_string() const {
  // Batch/group/channel dims first, then spatial in/out, kernel, stride, pad,
  // dilation, then the matmul triple; anything else trails alphabetically.
  static constexpr std::array<std::string_view, 25> canon = {
      "mb", "g",  "ic", "id", "ih", "iw", "oc", "od", "oh", "ow", "kd", "kh", "kw",
      "sd", "sh", "sw", "pd", "ph", "pw", "dd", "dh", "dw", "m",  "n",  "k"};
  std::string out;
  auto append = [&](const std::string& key, std::int64_t v) {
    out += key;
    out += std::to_string(v);
  };
  for (auto key : canon) {
    auto it = dims.find(std::string(key));
    if (it != dims.end()) append(it->first, it->second);
  }
  for (const auto& [key, v] : dims) {
    if (std::find(canon.begin(), canon.end(), key) == canon.end()) append(key, v);
  }
  return out;
}

std::string ProblemDescriptor::batch_line() const {
  std::string out = "--";
  out += driver_str();
  out += " --dir=";
  out += primscope::to_string(directory);
  out += " --cfg=";
  out += configuration;
  if (algorithm) {
    out += " --alg=";
    out += *algorithm;
  }
  if (post_ops) {
    out += " --attr-post-ops=";
    out += *post_ops;
  }
  if (layout_tag != "abcd") {
    out += " --tag=";
    out += layout_tag;
  }
  std::string problem = problem_string();
  if (!problem.empty()) {
    out += ' ';
    out += problem;
  }
  return out;
}

std::optional<std::string> check_descriptor(const ProblemDescriptor& d) {
  if (d.layout_tag.empty()) return "layout_tag is empty";
  for (const auto& [key, v] : d.dims) {
    if (v <= 0) return "dim " + key + " is not positive";
  }
  if (d.driver != Driver::conv) return std::nullopt;
  auto dim = [&](const char* key) -> std::optional<std::int64_t> {
    auto it = d.dims.find(key);
    if (it == d.dims.end()) return std::nullopt;
    return it->second;
  };
  struct Axis {
    const char *in, *out, *kernel, *stride, *pad, *dilation;
  };
  static constexpr Axis axes[] = {
      {"id", "od", "kd", "sd", "pd", "dd"},
      {"ih", "oh", "kh", "sh", "ph", "dh"},
      {"iw", "ow", "kw", "sw", "pw", "dw"},
  };
  for (const Axis& ax : axes) {
    auto in = dim(ax.in), out = dim(ax.out), kernel = dim(ax.kernel);
    if (!in || !out || !kernel) continue;
    if (dim(ax.dilation)) continue;  // formula below assumes dilation 0
    std::int64_t stride = dim(ax.stride).value_or(1);
    std::int64_t pad = dim(ax.pad).value_or(0);
    std::int64_t numerator = *in + 2 * pad - *kernel;
    if (numerator < 0 || *out != numerator / stride + 1) {
      return std::string("conv shape mismatch on axis ") + ax.out + ": expected " +
             std::to_string(numerator < 0 ? -1 : numerator / stride + 1) + ", got " +
             std::to_string(*out);
    }
  }
  return std::nullopt;
}

namespace {

Driver driver_of(const PrimitiveRecord& rec, std::string& name_out) {
  switch (rec.primitive_kind) {
    case PrimitiveKind::convolution: return Driver::conv;
    case PrimitiveKind::inner_product: return Driver::ip;
    case PrimitiveKind::matmul: return Driver::matmul;
    case PrimitiveKind::batch_normalization: return Driver::bnorm;
    case PrimitiveKind::eltwise: return Driver::eltwise;
    case PrimitiveKind::pooling: return Driver::pool;
    case PrimitiveKind::reorder: return Driver::reorder;
    case PrimitiveKind::softmax: return Driver::softmax;
    case PrimitiveKind::rnn: return Driver::rnn;
    // Real driver names of their own; carried as named "other" drivers.
    case PrimitiveKind::sum:
    case PrimitiveKind::binary:
    case PrimitiveKind::reduction:
    case PrimitiveKind::concat: name_out = std::string(to_string(rec.primitive_kind)); return Driver::other;
    case PrimitiveKind::other: break;
  }
  throw UnsupportedDriverError("no benchmark driver for primitive \"" + rec.primitive_str() +
                               "\"");
}

bool has_role(const PrimitiveRecord& rec, TensorRole role) {
  return std::any_of(rec.tensors.begin(), rec.tensors.end(),
                     [&](const TensorDesc& t) { return t.role == role; });
}

Directory directory_of(const PrimitiveRecord& rec) {
  switch (rec.direction) {
    case Direction::forward_inference: return Directory::FWD_I;
    case Direction::forward_training:
      return has_role(rec, TensorRole::bia) ? Directory::FWD_B : Directory::FWD_D;
    case Direction::backward_data: return Directory::BWD_D;
    case Direction::backward_weights:
      return has_role(rec, TensorRole::bia) ? Directory::BWD_WB : Directory::BWD_W;
    case Direction::backward: return Directory::BWD_DW;
    case Direction::undef: return Directory::FWD_I;
  }
  return Directory::FWD_I;
}

std::string layout_of(const PrimitiveRecord& rec) {
  const TensorDesc* src = nullptr;
  for (const auto& t : rec.tensors) {
    if (t.role == TensorRole::src) {
      src = &t;
      break;
    }
    if (!src && t.role == TensorRole::diff_src) src = &t;
  }
  if (!src) return "abcd";
  const std::string& tag = src->layout_tag;
  if (tag.empty() || tag == "undef" || tag == "any") return "abcd";
  return tag;
}

std::optional<std::string> algorithm_of(const PrimitiveRecord& rec) {
  if (!rec.algorithm || rec.algorithm->empty() || *rec.algorithm == "undef") return std::nullopt;
  std::string alg = *rec.algorithm;
  std::string prefix = rec.primitive_str() + "_";
  if (alg.size() > prefix.size() && alg.compare(0, prefix.size(), prefix) == 0)
    alg = alg.substr(prefix.size());
  return alg;
}

std::optional<std::string> post_ops_of(const PrimitiveRecord& rec) {
  for (auto token : split_ws(rec.attributes)) {
    if (token.starts_with("attr-post-ops:")) {
      auto value = token.substr(std::string_view("attr-post-ops:").size());
      if (!value.empty()) return std::string(value);
    }
  }
  return std::nullopt;
}

}  // namespace

ProblemDescriptor descriptor_from_record(const PrimitiveRecord& rec) {
  ProblemDescriptor d;
  d.driver = driver_of(rec, d.driver_name);
  d.configuration = configuration_of(rec);
  d.directory = directory_of(rec);
  d.post_ops = post_ops_of(rec);
  d.algorithm = algorithm_of(rec);
  d.dims = rec.dims;
  d.layout_tag = layout_of(rec);
  return d;
}

DescriptorSet dedupe(const std::vector<PrimitiveRecord>& records) {
  DescriptorSet set;
  for (const auto& rec : records) {
    if (rec.event_kind != EventKind::exec) continue;
    ProblemDescriptor d;
    try {
      d = descriptor_from_record(rec);
    } catch (const UnsupportedDriverError&) {
      set.unmapped_records += 1;
      set.unmapped_time_ms += rec.time_ms;
      continue;
    }
    std::string id = d.batch_line();
    auto [it, inserted] = set.entries.try_emplace(id);
    if (inserted) it->second.descriptor = std::move(d);
    it->second.call_count += 1;
    it->second.observed_total_ms += rec.time_ms;
  }
  for (auto& [id, stats] : set.entries)
    stats.observed_avg_ms = stats.observed_total_ms / double(stats.call_count);
  return set;
}

DescriptorSet dedupe(const ProfileLog& log) { return dedupe(log.records); }

std::string emit_batch(const DescriptorSet& set) {
  if (set.entries.empty()) throw EmptySetError("no descriptors to emit");
  std::string out;
  for (const auto& [id, stats] : set.entries) {
    if (auto violation = check_descriptor(stats.descriptor))
      throw DescriptorValidationError(id + ": " + *violation);
    out += id;
    out += '\n';
  }
  return out;
}

ProblemDescriptor descriptor_from_batch_line(std::string_view line, std::size_t line_no) {
  auto tokens = split_ws(strip_cr(line));
  if (tokens.empty() || !tokens[0].starts_with("--") || tokens[0].size() <= 2)
    throw FormatError(line_no, "batch line must start with a --<driver> token");
  ProblemDescriptor d;
  std::string_view driver_name = tokens[0].substr(2);
  if (auto known = driver_from(driver_name)) {
    d.driver = *known;
  } else {
    d.driver = Driver::other;
    d.driver_name = std::string(driver_name);
  }
  bool have_problem = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    std::string_view tok = tokens[i];
    auto value_of = [&](std::string_view flag) -> std::optional<std::string_view> {
      if (tok.starts_with(flag)) return tok.substr(flag.size());
      return std::nullopt;
    };
    if (auto v = value_of("--dir=")) {
      auto dir = directory_from(*v);
      if (!dir) throw FormatError(line_no, "unknown directory \"" + std::string(*v) + "\"");
      d.directory = *dir;
    } else if (auto v = value_of("--cfg=")) {
      d.configuration = std::string(*v);
    } else if (auto v = value_of("--alg=")) {
      d.algorithm = std::string(*v);
    } else if (auto v = value_of("--attr-post-ops=")) {
      d.post_ops = std::string(*v);
    } else if (auto v = value_of("--tag=")) {
      d.layout_tag = std::string(*v);
    } else if (tok.starts_with("--")) {
      throw FormatError(line_no, "unknown flag \"" + std::string(tok) + "\"");
    } else {
      if (have_problem) throw FormatError(line_no, "more than one problem token");
      d.dims = parse_problem_dims(tok);
      have_problem = true;
    }
  }
  return d;
}

BenchResultMap ingest_results(std::string_view text) {
  constexpr std::string_view kHeader = "descriptor_id,avg_ms,min_ms,runs";
  auto lines = split(text, '\n');
  if (lines.empty() || strip_cr(lines[0]) != kHeader)
    throw FormatError(1, std::string("expected header \"") + std::string(kHeader) + "\"");
  BenchResultMap out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = strip_cr(lines[i]);
    if (line.empty()) continue;
    std::size_t line_no = i + 1;
    auto fields = split(line, ',');
    if (fields.size() != 4) throw FormatError(line_no, "expected 4 comma-separated fields");
    BenchResult r;
    r.descriptor_id = std::string(fields[0]);
    if (r.descriptor_id.empty()) throw FormatError(line_no, "empty descriptor_id");
    if (!detail::parse_double(fields[1], r.avg_ms) || !(r.avg_ms > 0))
      throw FormatError(line_no, "avg_ms must be a positive number");
    if (!detail::parse_double(fields[2], r.min_ms) || !(r.min_ms > 0))
      throw FormatError(line_no, "min_ms must be a positive number");
    if (r.min_ms > r.avg_ms) throw FormatError(line_no, "min_ms exceeds avg_ms");
    if (!detail::parse_u64(fields[3], r.runs) || r.runs < 1)
      throw FormatError(line_no, "runs must be a positive integer");
    auto it = out.find(r.descriptor_id);
    if (it == out.end() || r.min_ms < it->second.min_ms) out[r.descriptor_id] = std::move(r);
  }
  return out;
}

std::string results_csv(const BenchResultMap& results) {
  std::string out = "descriptor_id,avg_ms,min_ms,runs\n";
  for (const auto& [id, r] : results) {
    out += id;
    out += ',';
    out += detail::fmt_double(r.avg_ms);
    out += ',';
    out += detail::fmt_double(r.min_ms);
    out += ',';
    out += std::to_string(r.runs);
    out += '\n';
  }
  return out;
}

}  // namespace primscope
