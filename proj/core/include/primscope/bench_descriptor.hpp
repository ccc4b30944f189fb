#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "primscope/verbose_log.hpp"

namespace primscope {

/// Micro-benchmark driver selecting the problem family.
enum class Driver { conv, eltwise, matmul, rnn, bnorm, pool, reorder, softmax, ip, other };

std::string_view to_string(Driver d);
std::optional<Driver> driver_from(std::string_view name);

/// Propagation direction in benchmark notation.
enum class Directory { FWD_I, FWD_D, FWD_B, BWD_D, BWD_W, BWD_WB, BWD_DW };

std::string_view to_string(Directory d);
std::optional<Directory> directory_from(std::string_view name);

/// One benchmarkable problem: driver + dtype configuration + direction +
/// shape, plus optional algorithm/post-ops and the memory layout tag.
struct ProblemDescriptor {
  Driver driver = Driver::other;
  std::string driver_name;  // raw name when driver == other
  std::string configuration = "f32";
  Directory directory = Directory::FWD_I;
  std::optional<std::string> post_ops;
  std::optional<std::string> algorithm;
  DimMap dims;
  std::string layout_tag = "abcd";  // nchw unless the log says otherwise

  bool operator==(const ProblemDescriptor&) const = default;

  std::string driver_str() const;
  /// Compact shape string, canonical dim order: "mb32ic16ih32iw32oc32...".
  std::string problem_string() const;
  /// The full batch-file line; doubles as the canonical descriptor id.
  std::string batch_line() const;
};

/// Returns a description of the first invariant violation, if any:
/// conv output shape must satisfy o = (i + 2p - k)/s + 1 per axis (dilation 0)
/// whenever all participating dims are present; forward directories must not
/// carry diff roles (structurally impossible here, checked for dims).
std::optional<std::string> check_descriptor(const ProblemDescriptor& d);

struct DescriptorStats {
  ProblemDescriptor descriptor;
  std::uint64_t call_count = 0;
  double observed_total_ms = 0;
  double observed_avg_ms = 0;
};

/// Deduplicated descriptors keyed by canonical id (the batch line).
struct DescriptorSet {
  std::map<std::string, DescriptorStats> entries;
  std::uint64_t unmapped_records = 0;  // exec records with no known driver
  double unmapped_time_ms = 0;
};

/// Maps one exec record to its descriptor.
/// Throws UnsupportedDriverError when the primitive has no driver.
ProblemDescriptor descriptor_from_record(const PrimitiveRecord& rec);

/// Merges identical descriptors, accumulating call counts and observed time.
/// create events are ignored; records without a driver are tallied as
/// unmapped instead of failing.
DescriptorSet dedupe(const std::vector<PrimitiveRecord>& records);
DescriptorSet dedupe(const ProfileLog& log);

/// One line per entry, sorted by descriptor id, LF endings.
/// Throws EmptySetError on an empty set and DescriptorValidationError when an
/// entry fails check_descriptor.
std::string emit_batch(const DescriptorSet& set);

/// Parses a single emit_batch line back into a descriptor.
/// Throws FormatError on malformed input.
ProblemDescriptor descriptor_from_batch_line(std::string_view line, std::size_t line_no = 0);

struct BenchResult {
  std::string descriptor_id;
  double avg_ms = 0;  // > 0
  double min_ms = 0;  // > 0, <= avg_ms
  std::uint64_t runs = 1;

  bool operator==(const BenchResult&) const = default;
};

using BenchResultMap = std::map<std::string, BenchResult>;

/// Reads the results CSV (`descriptor_id,avg_ms,min_ms,runs`). Duplicate ids
/// keep the row with the smaller min_ms. Throws FormatError (with line
/// number) on a missing header, short rows, or non-positive times.
BenchResultMap ingest_results(std::string_view text);

/// Writes the same CSV format ingest_results reads.
std::string results_csv(const BenchResultMap& results);

}  // namespace primscope
