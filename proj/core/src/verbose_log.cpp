#include "primscope/verbose_log.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "internal.hpp"

namespace primscope {

namespace {

using detail::split;
using detail::split_ws;

constexpr std::array<std::string_view, 3> kMarkers = {"dnnl_verbose", "onednn_verbose",
                                                      "mkldnn_verbose"};

bool is_marker(std::string_view field) {
  for (auto m : kMarkers)
    if (field == m) return true;
  return false;
}

}  // namespace

std::string_view to_string(EventKind k) {
  return k == EventKind::create ? "create" : "exec";
}

std::string_view to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::convolution: return "convolution";
    case PrimitiveKind::inner_product: return "inner_product";
    case PrimitiveKind::matmul: return "matmul";
    case PrimitiveKind::batch_normalization: return "batch_normalization";
    case PrimitiveKind::eltwise: return "eltwise";
    case PrimitiveKind::pooling: return "pooling";
    case PrimitiveKind::reorder: return "reorder";
    case PrimitiveKind::softmax: return "softmax";
    case PrimitiveKind::rnn: return "rnn";
    case PrimitiveKind::sum: return "sum";
    case PrimitiveKind::binary: return "binary";
    case PrimitiveKind::reduction: return "reduction";
    case PrimitiveKind::concat: return "concat";
    case PrimitiveKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::forward_training: return "forward_training";
    case Direction::forward_inference: return "forward_inference";
    case Direction::backward_data: return "backward_data";
    case Direction::backward_weights: return "backward_weights";
    case Direction::backward: return "backward";
    case Direction::undef: return "undef";
  }
  return "undef";
}

std::string_view to_string(TensorRole r) {
  switch (r) {
    case TensorRole::src: return "src";
    case TensorRole::wei: return "wei";
    case TensorRole::bia: return "bia";
    case TensorRole::dst: return "dst";
    case TensorRole::diff_src: return "diff_src";
    case TensorRole::diff_wei: return "diff_wei";
    case TensorRole::diff_dst: return "diff_dst";
    case TensorRole::other: return "other";
  }
  return "other";
}

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::f32: return "f32";
    case DataType::bf16: return "bf16";
    case DataType::f16: return "f16";
    case DataType::f64: return "f64";
    case DataType::s32: return "s32";
    case DataType::s8: return "s8";
    case DataType::u8: return "u8";
    case DataType::undef: return "undef";
  }
  return "undef";
}

PrimitiveKind primitive_kind_from(std::string_view name) {
  if (name == "convolution") return PrimitiveKind::convolution;
  if (name == "inner_product") return PrimitiveKind::inner_product;
  if (name == "matmul") return PrimitiveKind::matmul;
  if (name == "batch_normalization") return PrimitiveKind::batch_normalization;
  if (name == "eltwise") return PrimitiveKind::eltwise;
  if (name == "pooling") return PrimitiveKind::pooling;
  if (name == "reorder") return PrimitiveKind::reorder;
  if (name == "softmax") return PrimitiveKind::softmax;
  if (name == "rnn") return PrimitiveKind::rnn;
  if (name == "sum") return PrimitiveKind::sum;
  if (name == "binary") return PrimitiveKind::binary;
  if (name == "reduction") return PrimitiveKind::reduction;
  if (name == "concat") return PrimitiveKind::concat;
  return PrimitiveKind::other;
}

Direction direction_from(std::string_view name) {
  if (name == "forward_training") return Direction::forward_training;
  if (name == "forward_inference") return Direction::forward_inference;
  if (name == "backward_data") return Direction::backward_data;
  if (name == "backward_weights") return Direction::backward_weights;
  if (name == "backward") return Direction::backward;
  return Direction::undef;
}

TensorRole tensor_role_from(std::string_view name) {
  if (name == "src") return TensorRole::src;
  if (name == "wei") return TensorRole::wei;
  if (name == "bia") return TensorRole::bia;
  if (name == "dst") return TensorRole::dst;
  if (name == "diff_src") return TensorRole::diff_src;
  if (name == "diff_wei") return TensorRole::diff_wei;
  if (name == "diff_dst") return TensorRole::diff_dst;
  return TensorRole::other;
}

DataType data_type_from(std::string_view name) {
  if (name == "f32") return DataType::f32;
  if (name == "bf16") return DataType::bf16;
  if (name == "f16") return DataType::f16;
  if (name == "f64") return DataType::f64;
  if (name == "s32") return DataType::s32;
  if (name == "s8") return DataType::s8;
  if (name == "u8") return DataType::u8;
  return DataType::undef;
}

std::string TensorDesc::role_str() const {
  return role == TensorRole::other ? role_name : std::string(to_string(role));
}

std::string TensorDesc::canonical() const {
  std::string out = role_str();
  out += '_';
  out += to_string(data_type);
  out += "::";
  out += layout_tag;
  if (!extra.empty()) {
    out += ':';
    out += extra;
  }
  return out;
}

std::string PrimitiveRecord::engine_str() const {
  switch (engine) {
    case EngineKind::cpu: return "cpu";
    case EngineKind::gpu: return "gpu";
    case EngineKind::other: return engine_name;
  }
  return engine_name;
}

std::string PrimitiveRecord::primitive_str() const {
  return primitive_kind == PrimitiveKind::other ? primitive_name
                                                : std::string(to_string(primitive_kind));
}

namespace {

TensorDesc parse_tensor_desc(std::string_view token) {
  TensorDesc td;
  auto comps = split(token, ':');
  std::string_view head = comps[0];
  std::size_t us = head.rfind('_');
  std::string_view role_part = us == std::string_view::npos ? head : head.substr(0, us);
  std::string_view dtype_part = us == std::string_view::npos ? std::string_view{} : head.substr(us + 1);
  td.role = tensor_role_from(role_part);
  if (td.role == TensorRole::other) td.role_name = std::string(role_part);
  td.data_type = data_type_from(dtype_part);

  // Locate the layout tag: skip empty components and the "blocked" format-kind
  // marker; everything after the tag is kept verbatim as extra.
  std::size_t tag_idx = 0;
  for (std::size_t i = 1; i < comps.size(); ++i) {
    if (comps[i].empty() || comps[i] == "blocked") continue;
    tag_idx = i;
    break;
  }
  if (tag_idx != 0) {
    td.layout_tag = std::string(comps[tag_idx]);
    std::string extra;
    for (std::size_t i = tag_idx + 1; i < comps.size(); ++i) {
      if (!extra.empty()) extra += ':';
      extra += std::string(comps[i]);
    }
    td.extra = std::move(extra);
  } else {
    td.layout_tag = "undef";
  }
  return td;
}

}  // namespace

// A run of letters followed by a run of digits makes one dim. Non-positive
// values are ignored, as is anything that does not match.
DimMap parse_problem_dims(std::string_view problem) {
  DimMap dims;
  std::size_t i = 0;
  const std::size_t n = problem.size();
  while (i < n) {
    if (!std::isalpha(static_cast<unsigned char>(problem[i]))) {
      ++i;
      continue;
    }
    std::size_t key_start = i;
    while (i < n && std::isalpha(static_cast<unsigned char>(problem[i]))) ++i;
    std::size_t key_end = i;
    if (i >= n || !std::isdigit(static_cast<unsigned char>(problem[i]))) continue;
    std::size_t val_start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(problem[i]))) ++i;
    std::int64_t value = 0;
    if (!detail::parse_i64(problem.substr(val_start, i - val_start), value)) continue;
    if (value <= 0) continue;
    dims.emplace(std::string(problem.substr(key_start, key_end - key_start)), value);
  }
  return dims;
}

namespace {

std::optional<std::string> extract_algorithm(std::string_view aux) {
  for (auto token : split_ws(aux)) {
    if (token.starts_with("alg:")) return std::string(token.substr(4));
  }
  return std::nullopt;
}

}  // namespace

ParsedLine parse_line(std::string_view line, std::size_t line_no, bool lenient) {
  ParsedLine out;
  line = detail::strip_cr(line);
  if (line.empty()) return out;

  auto fields = split(line, ',');

  // Newer format: a leading numeric timestamp before the marker. Drop it.
  std::size_t base = 0;
  if (fields.size() >= 2 && is_marker(fields[1])) {
    double ts = 0;
    if (detail::parse_double(fields[0], ts)) base = 1;
  }
  if (fields.size() <= base || !is_marker(fields[base])) return out;

  std::string_view event = fields.size() > base + 1 ? fields[base + 1] : std::string_view{};
  if (event == "info") {
    out.kind = ParsedLine::Kind::header;
    std::string text;
    for (std::size_t i = base + 2; i < fields.size(); ++i) {
      if (i > base + 2) text += ',';
      text += std::string(fields[i]);
    }
    out.header_text = std::move(text);
    return out;
  }
  if (event != "exec" && event != "create") return out;  // marker with unknown event

  // marker,event,engine,primitive,impl,direction,tensors,attributes,aux,problem,time
  constexpr std::size_t kFieldCount = 11;
  auto fail = [&](const std::string& msg) -> ParsedLine {
    if (lenient) return ParsedLine{};  // downgrade to skip
    throw MalformedRecordError(line_no, msg);
  };
  if (fields.size() - base < kFieldCount)
    return fail("expected " + std::to_string(kFieldCount) + " fields, got " +
                std::to_string(fields.size() - base));

  double time_ms = 0;
  if (!detail::parse_double(fields[base + 10], time_ms) || !std::isfinite(time_ms))
    return fail("non-numeric time field '" + std::string(fields[base + 10]) + "'");
  if (time_ms < 0) return fail("negative time field");

  PrimitiveRecord rec;
  rec.event_kind = event == "exec" ? EventKind::exec : EventKind::create;

  std::string_view engine = fields[base + 2];
  if (engine == "cpu") {
    rec.engine = EngineKind::cpu;
  } else if (engine == "gpu") {
    rec.engine = EngineKind::gpu;
  } else {
    rec.engine = EngineKind::other;
    rec.engine_name = std::string(engine);
  }

  std::string_view primitive = fields[base + 3];
  rec.primitive_kind = primitive_kind_from(primitive);
  if (rec.primitive_kind == PrimitiveKind::other) rec.primitive_name = std::string(primitive);

  rec.impl_name = std::string(fields[base + 4]);
  rec.direction = direction_from(fields[base + 5]);
  for (auto token : split_ws(fields[base + 6])) rec.tensors.push_back(parse_tensor_desc(token));
  rec.attributes = std::string(fields[base + 7]);
  rec.aux = std::string(fields[base + 8]);
  rec.algorithm = extract_algorithm(rec.aux);
  rec.problem = std::string(fields[base + 9]);
  rec.dims = parse_problem_dims(rec.problem);
  rec.time_ms = time_ms;

  // Anything beyond the time field is preserved in attributes, space-joined so
  // the canonical line stays an 11-field record.
  for (std::size_t i = base + kFieldCount; i < fields.size(); ++i) {
    if (!rec.attributes.empty()) rec.attributes += ' ';
    rec.attributes += std::string(fields[i]);
  }

  out.kind = ParsedLine::Kind::record;
  out.record = std::move(rec);
  return out;
}

ProfileLog parse_log(std::istream& in, const ParseOptions& opts) {
  ProfileLog log;
  log.source_name = opts.source_name;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++log.lines_total;
    ParsedLine parsed = parse_line(line, line_no, opts.lenient);
    switch (parsed.kind) {
      case ParsedLine::Kind::record:
        log.records.push_back(std::move(*parsed.record));
        break;
      case ParsedLine::Kind::header:
        ++log.lines_header;
        if (!log.header_info) log.header_info = std::move(parsed.header_text);
        break;
      case ParsedLine::Kind::skip:
        ++log.lines_skipped;
        break;
    }
  }
  return log;
}

ProfileLog parse_log_text(std::string_view text, const ParseOptions& opts) {
  std::istringstream in{std::string(text)};
  return parse_log(in, opts);
}

ProfileLog parse_log_file(const std::string& path, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open log file: " + path);
  ParseOptions opts;
  opts.lenient = lenient;
  opts.source_name = path;
  return parse_log(in, opts);
}

std::string to_verbose_line(const PrimitiveRecord& rec) {
  std::string out = "dnnl_verbose,";
  out += to_string(rec.event_kind);
  out += ',';
  out += rec.engine_str();
  out += ',';
  out += rec.primitive_str();
  out += ',';
  out += rec.impl_name;
  out += ',';
  out += to_string(rec.direction);
  out += ',';
  for (std::size_t i = 0; i < rec.tensors.size(); ++i) {
    if (i) out += ' ';
    out += rec.tensors[i].canonical();
  }
  out += ',';
  out += rec.attributes;
  out += ',';
  if (!rec.aux.empty())
    out += rec.aux;
  else if (rec.algorithm)
    out += "alg:" + *rec.algorithm;
  out += ',';
  out += rec.problem;
  out += ',';
  out += detail::fmt_double(rec.time_ms);
  return out;
}

std::string to_csv(const ProfileLog& log) {
  std::string out =
      "idx,event,engine,primitive,impl,direction,dtypes,layout,attributes,algorithm,problem,"
      "time_ms\n";
  std::size_t idx = 0;
  for (const auto& rec : log.records) {
    out += std::to_string(idx++);
    out += ',';
    out += to_string(rec.event_kind);
    out += ',';
    out += rec.engine_str();
    out += ',';
    out += rec.primitive_str();
    out += ',';
    out += rec.impl_name;
    out += ',';
    out += to_string(rec.direction);
    out += ',';
    for (std::size_t i = 0; i < rec.tensors.size(); ++i) {
      if (i) out += '|';
      out += rec.tensors[i].role_str();
      out += ':';
      out += to_string(rec.tensors[i].data_type);
    }
    out += ',';
    for (std::size_t i = 0; i < rec.tensors.size(); ++i) {
      if (i) out += '|';
      out += rec.tensors[i].role_str();
      out += ':';
      out += rec.tensors[i].layout_tag;
    }
    out += ',';
    out += rec.attributes;
    out += ',';
    if (rec.algorithm) out += *rec.algorithm;
    out += ',';
    out += rec.problem;
    out += ',';
    out += detail::fmt_double(rec.time_ms);
    out += '\n';
  }
  return out;
}

std::optional<std::string> validate(const PrimitiveRecord& rec) {
  if (!(rec.time_ms >= 0)) return "time_ms must be >= 0";
  if (rec.direction == Direction::forward_training ||
      rec.direction == Direction::forward_inference) {
    for (const auto& td : rec.tensors) {
      if (td.role == TensorRole::diff_src || td.role == TensorRole::diff_wei ||
          td.role == TensorRole::diff_dst)
        return "forward record carries diff_* tensor role";
    }
  }
  for (const auto& [key, value] : rec.dims) {
    if (value <= 0) return "dimension '" + key + "' is not positive";
  }
  return std::nullopt;
}

}  // namespace primscope
