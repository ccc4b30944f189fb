#include <benchmark/benchmark.h>

#include <cstdint>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "primscope/bench_descriptor.hpp"
#include "primscope/bf16.hpp"
#include "primscope/focal_kernel.hpp"
#include "primscope/profile_stats.hpp"
#include "primscope/verbose_log.hpp"

using namespace primscope;

namespace {

std::string synthetic_log_text(std::size_t lines) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> td(0.01, 20.0);
  std::ostringstream out;
  out << "dnnl_verbose,info,oneDNN v3.3.0 (synthetic)\n";
  const char* dirs[] = {"forward_training", "forward_inference", "backward_data"};
  for (std::size_t i = 1; i < lines; ++i) {
    switch (i % 4) {
      case 0:
        out << "dnnl_verbose,exec,cpu,convolution,brgconv:avx512_core,"
            << dirs[i % 3]
            << ",src_f32::blocked:abcd:f0 wei_f32::blocked:Abcd16a:f0 dst_f32::blocked:abcd:f0,"
            << ",alg:convolution_direct,mb32ic64ih28iw28oc64oh28ow28kh3kw3ph1pw1," << td(rng)
            << "\n";
        break;
      case 1:
        out << "dnnl_verbose,exec,cpu,matmul,brg:avx512_core,undef,"
            << "src_bf16::blocked:ab:f0 wei_bf16::blocked:ab:f0 dst_f32::blocked:ab:f0,,,"
            << "m256n256k512," << td(rng) << "\n";
        break;
      case 2:
        out << "dnnl_verbose,exec,cpu,reorder,jit:uni,undef,"
            << "src_f32::blocked:abcd:f0 dst_bf16::blocked:abcd:f0,,,2x64x28x28," << td(rng)
            << "\n";
        break;
      default:
        out << "some unrelated application output line " << i << "\n";
        break;
    }
  }
  return out.str();
}

ElementBuffer random_logits(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xd(-12.0, 12.0);
  std::vector<double> v(n);
  for (double& x : v) x = xd(rng);
  return ElementBuffer::make({std::int64_t(n)}, std::move(v));
}

ElementBuffer random_targets(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution yd(0.5);
  std::vector<double> v(n);
  for (double& y : v) y = yd(rng) ? 1.0 : 0.0;
  return ElementBuffer::make({std::int64_t(n)}, std::move(v));
}

void bm_parse_log(benchmark::State& state) {
  const std::string text = synthetic_log_text(std::size_t(state.range(0)));
  ParseOptions opts;
  opts.lenient = true;
  std::size_t records = 0;
  for (auto _ : state) {
    ProfileLog log = parse_log_text(text, opts);
    records = log.records.size();
    benchmark::DoNotOptimize(log);
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) * std::int64_t(text.size()));
  state.counters["records"] = double(records);
}
BENCHMARK(bm_parse_log)->Arg(1000)->Arg(10000);

void bm_summarize(benchmark::State& state) {
  ProfileLog log = parse_log_text(synthetic_log_text(10000), {.lenient = true});
  for (auto _ : state) {
    ProfileSummary s = summarize(log, Granularity::kind_direction_dtype);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_summarize);

void bm_dedupe(benchmark::State& state) {
  ProfileLog log = parse_log_text(synthetic_log_text(10000), {.lenient = true});
  for (auto _ : state) {
    DescriptorSet set = dedupe(log);
    benchmark::DoNotOptimize(set);
  }
}
BENCHMARK(bm_dedupe);

void bm_focal_forward(benchmark::State& state,
                      ElementBuffer (*fn)(const ElementBuffer&, const ElementBuffer&,
                                          const FocalParams&, EvalStats*)) {
  const std::size_t n = std::size_t(state.range(0));
  ElementBuffer x = random_logits(n, 1);
  ElementBuffer y = random_targets(n, 2);
  FocalParams p;
  p.reduction = Reduction::mean;
  for (auto _ : state) {
    ElementBuffer out = fn(x, y, p, nullptr);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK_CAPTURE(bm_focal_forward, reference, &focal_forward_reference)
    ->Arg(1 << 14)
    ->Arg(1 << 18);
BENCHMARK_CAPTURE(bm_focal_forward, general, &focal_forward_general)
    ->Arg(1 << 14)
    ->Arg(1 << 18);
BENCHMARK_CAPTURE(bm_focal_forward, simplified, &focal_forward_simplified)
    ->Arg(1 << 14)
    ->Arg(1 << 18);

void bm_focal_backward(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  ElementBuffer x = random_logits(n, 3);
  ElementBuffer y = random_targets(n, 4);
  ElementBuffer ones = ElementBuffer::make({std::int64_t(n)}, std::vector<double>(n, 1.0));
  FocalParams p;
  for (auto _ : state) {
    ElementBuffer out = focal_backward(ones, x, y, p);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(bm_focal_backward)->Arg(1 << 14)->Arg(1 << 18);

void bm_round_bf16(benchmark::State& state) {
  std::mt19937 rng(5);
  std::vector<float> values(1 << 16);
  for (float& v : values) {
    std::uint32_t bits = rng();
    std::memcpy(&v, &bits, 4);
  }
  for (auto _ : state) {
    float acc = 0.0f;
    for (float v : values) acc += round_bf16(v);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(values.size()));
}
BENCHMARK(bm_round_bf16);

}  // namespace

BENCHMARK_MAIN();
