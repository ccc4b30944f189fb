#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "primscope/error.hpp"

namespace primscope {

enum class EventKind { create, exec };
enum class EngineKind { cpu, gpu, other };

enum class PrimitiveKind {
  convolution,
  inner_product,
  matmul,
  batch_normalization,
  eltwise,
  pooling,
  reorder,
  softmax,
  rnn,
  sum,
  binary,
  reduction,
  concat,
  other,
};

enum class Direction {
  forward_training,
  forward_inference,
  backward_data,
  backward_weights,
  backward,
  undef,
};

enum class TensorRole { src, wei, bia, dst, diff_src, diff_wei, diff_dst, other };

enum class DataType { f32, bf16, f16, f64, s32, s8, u8, undef };

std::string_view to_string(EventKind k);
std::string_view to_string(PrimitiveKind k);
std::string_view to_string(Direction d);
std::string_view to_string(TensorRole r);
std::string_view to_string(DataType t);

PrimitiveKind primitive_kind_from(std::string_view name);
Direction direction_from(std::string_view name);
TensorRole tensor_role_from(std::string_view name);
DataType data_type_from(std::string_view name);  // unknown names map to undef

/// One memory descriptor from a verbose line ("src_f32::blocked:abcd:f0").
struct TensorDesc {
  TensorRole role = TensorRole::other;
  std::string role_name;  // raw role text; meaningful when role == other
  DataType data_type = DataType::undef;
  std::string layout_tag = "undef";  // never empty; "undef" when the line carries none
  std::string extra;

  bool operator==(const TensorDesc&) const = default;

  std::string role_str() const;
  std::string canonical() const;  // role_dtype::tag[:extra]
};

/// Parsed problem dimensions, e.g. {mb:32, ic:16, ...}. Best-effort; values > 0.
using DimMap = std::map<std::string, std::int64_t>;

/// Best-effort key/value scan of a compact problem string ("mb32ic16ih32...").
/// Unmatched text is ignored; the map may come out partially filled.
DimMap parse_problem_dims(std::string_view problem);

/// One primitive execution/creation event parsed from a verbose log line.
struct PrimitiveRecord {
  EventKind event_kind = EventKind::exec;
  EngineKind engine = EngineKind::cpu;
  std::string engine_name;  // raw engine text; meaningful when engine == other
  PrimitiveKind primitive_kind = PrimitiveKind::other;
  std::string primitive_name;  // raw primitive text; meaningful when kind == other
  std::string impl_name;
  Direction direction = Direction::undef;
  std::vector<TensorDesc> tensors;
  std::string attributes;  // field 8 verbatim; extra trailing fields are appended
  std::string aux;         // field 9 verbatim (e.g. "alg:convolution_direct")
  std::optional<std::string> algorithm;  // the alg: token parsed out of aux
  std::string problem;                   // verbatim problem descriptor string
  DimMap dims;                           // best-effort parse of problem
  double time_ms = 0.0;                  // milliseconds, >= 0

  bool operator==(const PrimitiveRecord&) const = default;

  std::string engine_str() const;
  std::string primitive_str() const;
};

/// An entire parsed log. Records preserve file order;
/// lines_total == records.size() + lines_header + lines_skipped.
struct ProfileLog {
  std::vector<PrimitiveRecord> records;
  std::string source_name;
  std::size_t lines_total = 0;
  std::size_t lines_skipped = 0;
  std::size_t lines_header = 0;
  std::optional<std::string> header_info;  // first info line payload
};

/// Outcome of parsing one line.
struct ParsedLine {
  enum class Kind { record, header, skip };
  Kind kind = Kind::skip;
  std::optional<PrimitiveRecord> record;  // set when kind == record
  std::string header_text;                // set when kind == header
};

/// Parse one line (no terminator). A marker line with event exec/create yields
/// a record; a marker line with "info" yields header; anything else skips.
/// Lines of the newer format that carry a leading numeric timestamp field are
/// detected and the timestamp is dropped. Malformed record lines throw
/// MalformedRecordError unless `lenient`, in which case they skip.
ParsedLine parse_line(std::string_view line, std::size_t line_no = 0, bool lenient = false);

struct ParseOptions {
  bool lenient = false;
  std::string source_name;
};

ProfileLog parse_log(std::istream& in, const ParseOptions& opts = {});
ProfileLog parse_log_text(std::string_view text, const ParseOptions& opts = {});
ProfileLog parse_log_file(const std::string& path, bool lenient = false);

/// Canonical verbose line for a record; parse_line() of it reproduces the
/// record field-for-field.
std::string to_verbose_line(const PrimitiveRecord& rec);

/// CSV export, one row per record:
/// idx,event,engine,primitive,impl,direction,dtypes,layout,attributes,algorithm,problem,time_ms
/// where dtypes/layout are role:value pairs joined by "|". LF line endings.
std::string to_csv(const ProfileLog& log);

/// Record invariant check: time >= 0, forward directions carry no diff_* roles,
/// dim values positive. Returns a description of the first violation, if any.
std::optional<std::string> validate(const PrimitiveRecord& rec);

}  // namespace primscope
