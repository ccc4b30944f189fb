#include <string>
#include <vector>

#include "doctest.h"
#include "primscope/bench_descriptor.hpp"
#include "test_helpers.hpp"

using namespace primscope;
using testing::log_of;
using testing::record;
using testing::tensor;

namespace {

PrimitiveRecord conv_record(double time_ms = 12.345) {
  ParsedLine parsed = parse_line(
      "dnnl_verbose,exec,cpu,convolution,jit:avx512_core,forward_training,"
      "src_f32::blocked:abcd:f0 wei_f32::blocked:Abcd16a:f0 dst_f32::blocked:aBcd16b:f0,,"
      "alg:convolution_direct,mb32_ic16oc32_ih32oh16kh3sh2ph1_iw32ow16kw3sw2pw1,12.345");
  PrimitiveRecord rec = *parsed.record;
  rec.time_ms = time_ms;
  return rec;
}

}  // namespace

TEST_SUITE("bench_descriptor") {

TEST_CASE("maps a convolution record without bias") {
  ProblemDescriptor d = descriptor_from_record(conv_record());
  CHECK(d.driver == Driver::conv);
  CHECK(d.configuration == "f32");
  CHECK(d.directory == Directory::FWD_D);  // forward_training, no bias tensor
  CHECK(d.algorithm == "direct");
  CHECK(d.layout_tag == "abcd");
  CHECK(d.dims.at("mb") == 32);
  CHECK(d.dims.at("ic") == 16);
  CHECK(d.dims.at("oc") == 32);
  CHECK(d.dims.at("ih") == 32);
  CHECK(d.dims.at("oh") == 16);
  CHECK(d.dims.at("kh") == 3);
  CHECK(d.dims.at("sh") == 2);
  CHECK(d.dims.at("ph") == 1);
}

TEST_CASE("bias tensor upgrades the forward directory") {
  PrimitiveRecord rec = conv_record();
  rec.tensors.push_back(tensor(TensorRole::bia, DataType::f32, "a"));
  CHECK(descriptor_from_record(rec).directory == Directory::FWD_B);

  rec.direction = Direction::forward_inference;
  CHECK(descriptor_from_record(rec).directory == Directory::FWD_I);
}

TEST_CASE("backward directions map to backward directories") {
  PrimitiveRecord rec = conv_record();
  rec.direction = Direction::backward_data;
  CHECK(descriptor_from_record(rec).directory == Directory::BWD_D);

  rec.direction = Direction::backward_weights;
  CHECK(descriptor_from_record(rec).directory == Directory::BWD_W);
  rec.tensors.push_back(tensor(TensorRole::bia, DataType::f32, "a"));
  CHECK(descriptor_from_record(rec).directory == Directory::BWD_WB);

  rec.direction = Direction::backward;
  CHECK(descriptor_from_record(rec).directory == Directory::BWD_DW);
}

TEST_CASE("layout defaults to nchw and honors a log override") {
  PrimitiveRecord no_layout = conv_record();
  for (auto& td : no_layout.tensors) td.layout_tag = "undef";
  CHECK(descriptor_from_record(no_layout).layout_tag == "abcd");

  PrimitiveRecord channels_last = conv_record();
  channels_last.tensors[0].layout_tag = "acdb";
  CHECK(descriptor_from_record(channels_last).layout_tag == "acdb");
}

TEST_CASE("records with no mappable driver are rejected") {
  PrimitiveRecord rec = record(PrimitiveKind::other, Direction::undef, 1.0);
  rec.primitive_name = "shuffle";
  CHECK_THROWS_AS(descriptor_from_record(rec), UnsupportedDriverError);
}

TEST_CASE("dedupe merges identical problems and averages time") {
  auto set = dedupe(log_of({conv_record(2.0), conv_record(4.0)}));
  REQUIRE(set.entries.size() == 1);
  const DescriptorStats& stats = set.entries.begin()->second;
  CHECK(stats.call_count == 2);
  CHECK(stats.observed_total_ms == doctest::Approx(6.0));
  CHECK(stats.observed_avg_ms == doctest::Approx(3.0));
}

TEST_CASE("dedupe keeps distinct configurations apart") {
  PrimitiveRecord bf16 = conv_record();
  for (auto& td : bf16.tensors) td.data_type = DataType::bf16;
  auto set = dedupe(log_of({conv_record(), bf16}));
  CHECK(set.entries.size() == 2);
}

TEST_CASE("dedupe of empty input is empty") {
  auto set = dedupe(log_of({}));
  CHECK(set.entries.empty());
  CHECK(set.unmapped_records == 0);
}

TEST_CASE("dedupe tallies unmappable records instead of failing") {
  PrimitiveRecord odd = record(PrimitiveKind::other, Direction::undef, 2.5);
  odd.primitive_name = "shuffle";
  auto set = dedupe(log_of({conv_record(1.0), odd}));
  CHECK(set.entries.size() == 1);
  CHECK(set.unmapped_records == 1);
  CHECK(set.unmapped_time_ms == doctest::Approx(2.5));
}

TEST_CASE("dedupe conserves mapped observed time") {
  std::vector<PrimitiveRecord> records = {conv_record(1.5), conv_record(2.25),
                                          conv_record(0.125)};
  PrimitiveRecord mm = record(PrimitiveKind::matmul, Direction::undef, 3.5, {}, "m8n8k8");
  records.push_back(mm);
  double expected = 1.5 + 2.25 + 0.125 + 3.5;

  auto set = dedupe(log_of(records));
  double total = 0;
  for (const auto& [id, stats] : set.entries) total += stats.observed_total_ms;
  CHECK(total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("batch line for the convolution example") {
  auto set = dedupe(log_of({conv_record()}));
  CHECK(emit_batch(set) ==
        "--conv --dir=FWD_D --cfg=f32 --alg=direct "
        "mb32ic16ih32iw32oc32oh16ow16kh3kw3sh2sw2ph1pw1\n");
}

TEST_CASE("batch line for a bare matmul") {
  ProblemDescriptor d;
  d.driver = Driver::matmul;
  d.dims = {{"m", 2}, {"n", 2}, {"k", 2}};
  CHECK(d.batch_line() == "--matmul --dir=FWD_I --cfg=f32 m2n2k2");
}

TEST_CASE("batch lines sort by descriptor id") {
  PrimitiveRecord mm = record(PrimitiveKind::matmul, Direction::undef, 3.5, {}, "m8n8k8");
  auto set = dedupe(log_of({mm, conv_record()}));
  std::string batch = emit_batch(set);
  CHECK(batch.find("--conv") < batch.find("--matmul"));
}

TEST_CASE("emitting an empty set is an error") {
  CHECK_THROWS_AS(emit_batch(DescriptorSet{}), EmptySetError);
}

TEST_CASE("emission validates the convolution shape relation") {
  ProblemDescriptor bad;
  bad.driver = Driver::conv;
  bad.directory = Directory::FWD_D;
  // oh should be (32 + 2*1 - 3)/2 + 1 = 16
  bad.dims = {{"mb", 1}, {"ic", 16}, {"oc", 32}, {"ih", 32}, {"oh", 17},
              {"kh", 3}, {"sh", 2},  {"ph", 1}};
  DescriptorSet set;
  DescriptorStats stats;
  stats.descriptor = bad;
  stats.call_count = 1;
  set.entries.emplace(bad.batch_line(), stats);
  CHECK_THROWS_AS(emit_batch(set), DescriptorValidationError);

  auto violation = check_descriptor(bad);
  REQUIRE(violation.has_value());
  CHECK(violation->find("oh") != std::string::npos);
}

TEST_CASE("shape check uses stride and padding defaults") {
  ProblemDescriptor d;
  d.driver = Driver::conv;
  // ih=16, kh=3, implicit sh=1 ph=0 -> oh = 14
  d.dims = {{"mb", 1}, {"ic", 8}, {"oc", 8}, {"ih", 16}, {"oh", 14}, {"kh", 3}};
  CHECK_FALSE(check_descriptor(d).has_value());
  d.dims["oh"] = 16;
  CHECK(check_descriptor(d).has_value());
}

TEST_CASE("dilated convolutions skip the shape check") {
  ProblemDescriptor d;
  d.driver = Driver::conv;
  d.dims = {{"mb", 1}, {"ic", 8}, {"oc", 8}, {"ih", 16},
            {"oh", 12}, {"kh", 3}, {"dh", 1}};
  CHECK_FALSE(check_descriptor(d).has_value());
}

TEST_CASE("batch lines round-trip through the parser") {
  PrimitiveRecord mm = record(PrimitiveKind::matmul, Direction::undef, 3.5, {}, "m8n8k8");
  PrimitiveRecord relu = record(
      PrimitiveKind::eltwise, Direction::forward_training, 0.5,
      {tensor(TensorRole::other, DataType::f32, "acdb")}, "mb32ic64ih112iw112");
  relu.tensors[0].role_name = "data";
  relu.aux = "alg:eltwise_relu";
  relu.algorithm = "eltwise_relu";

  auto set = dedupe(log_of({conv_record(), mm, relu}));
  REQUIRE(set.entries.size() == 3);
  for (const auto& [id, stats] : set.entries) {
    CAPTURE(id);
    ProblemDescriptor back = descriptor_from_batch_line(id);
    CHECK(back == stats.descriptor);
    CHECK(back.batch_line() == id);
  }
}

TEST_CASE("post-ops survive into the batch line") {
  PrimitiveRecord rec = conv_record();
  rec.attributes = "attr-post-ops:eltwise_relu";
  ProblemDescriptor d = descriptor_from_record(rec);
  REQUIRE(d.post_ops.has_value());
  CHECK(*d.post_ops == "eltwise_relu");
  CHECK(d.batch_line().find("--attr-post-ops=eltwise_relu") != std::string::npos);
  CHECK(descriptor_from_batch_line(d.batch_line()) == d);
}

TEST_CASE("malformed batch lines are rejected") {
  CHECK_THROWS_AS(descriptor_from_batch_line(""), FormatError);
  CHECK_THROWS_AS(descriptor_from_batch_line("mb2ic2"), FormatError);
  CHECK_THROWS_AS(descriptor_from_batch_line("--conv --bogus=1 mb2"), FormatError);
}

TEST_CASE("ingest_results reads the results csv") {
  auto results = ingest_results("descriptor_id,avg_ms,min_ms,runs\nD1,2.0,1.5,10\n");
  REQUIRE(results.count("D1") == 1);
  CHECK(results.at("D1").avg_ms == doctest::Approx(2.0));
  CHECK(results.at("D1").min_ms == doctest::Approx(1.5));
  CHECK(results.at("D1").runs == 10);
}

TEST_CASE("duplicate result rows keep the smaller min") {
  auto results = ingest_results(
      "descriptor_id,avg_ms,min_ms,runs\nD1,2.0,1.5,10\nD1,2.2,1.2,10\n");
  CHECK(results.at("D1").min_ms == doctest::Approx(1.2));
}

TEST_CASE("result rows with bad values are errors") {
  CHECK_THROWS_AS(ingest_results("descriptor_id,avg_ms,min_ms,runs\nD1,2.0,0,10\n"),
                  FormatError);
  CHECK_THROWS_AS(ingest_results("avg,min\nD1,2.0\n"), FormatError);
  CHECK_THROWS_AS(ingest_results("descriptor_id,avg_ms,min_ms,runs\nD1,1.0,2.0,10\n"),
                  FormatError);
  CHECK_THROWS_AS(ingest_results("descriptor_id,avg_ms,min_ms,runs\nD1,2.0,1.5,0\n"),
                  FormatError);
  try {
    ingest_results("descriptor_id,avg_ms,min_ms,runs\nD1,2.0,0,10\n");
  } catch (const FormatError& e) {
    CHECK(e.line_no() == 2);
  }
}

TEST_CASE("results csv round-trips") {
  auto results = ingest_results(
      "descriptor_id,avg_ms,min_ms,runs\nD1,2.0,1.5,10\nD2,0.25,0.125,40\n");
  CHECK(ingest_results(results_csv(results)) == results);
}

}  // TEST_SUITE
