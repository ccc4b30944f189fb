#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "primscope/verbose_log.hpp"

using namespace primscope;

namespace {

std::string data_path(const char* name) {
  return std::string(PRIMSCOPE_TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const ProfileLog& golden() {
  static ProfileLog log = parse_log_file(data_path("verbose_1000.log"), true);
  return log;
}

}  // namespace

TEST_SUITE("golden_log") {

TEST_CASE("line accounting matches the bundled log") {
  const ProfileLog& log = golden();
  CHECK(log.lines_total == 1000);
  CHECK(log.records.size() == 880);
  CHECK(log.lines_header == 4);
  CHECK(log.lines_skipped == 116);

  std::size_t execs = 0, creates = 0;
  for (const auto& r : log.records)
    (r.event_kind == EventKind::exec ? execs : creates)++;
  CHECK(execs == 850);
  CHECK(creates == 30);

  REQUIRE(log.header_info.has_value());
  CHECK(*log.header_info ==
        "oneDNN v3.3.0 (commit 8bc5e804e7e9d4a4a60e0dcbcee55a4e3a0f0c21)");
}

TEST_CASE("primitive and engine composition") {
  const ProfileLog& log = golden();
  std::size_t conv = 0, reorder = 0, other = 0, accel = 0, gpu = 0;
  for (const auto& r : log.records) {
    if (r.primitive_kind == PrimitiveKind::convolution) ++conv;
    if (r.primitive_kind == PrimitiveKind::reorder) ++reorder;
    if (r.primitive_kind == PrimitiveKind::other) ++other;
    if (r.engine == EngineKind::other) ++accel;
    if (r.engine == EngineKind::gpu) ++gpu;
  }
  CHECK(conv == 310);
  CHECK(reorder == 103);
  CHECK(other == 10);
  CHECK(accel == 10);
  CHECK(gpu > 0);
}

TEST_CASE("csv export is byte-identical to the checked-in file") {
  CHECK(to_csv(golden()) == slurp(data_path("verbose_1000_golden.csv")));
}

TEST_CASE("every record is a canonical-line fixed point") {
  for (const auto& r : golden().records) {
    std::string line = to_verbose_line(r);
    ProfileLog one = parse_log_text(line, {});
    REQUIRE(one.records.size() == 1);
    CHECK(one.records[0] == r);
    CHECK(to_verbose_line(one.records[0]) == line);
  }
}

TEST_CASE("strict mode rejects the malformed lines") {
  CHECK_THROWS_AS(parse_log_file(data_path("verbose_1000.log"), false),
                  MalformedRecordError);
}

}
