#include <benchmark/benchmark.h>

#include "hcoseg/coseg.hpp"
#include "hcoseg/flow.hpp"
#include "hcoseg/refine.hpp"
#include "hcoseg/slice_tree.hpp"
#include "hcoseg/superpixels.hpp"

namespace {

using namespace hcoseg;

Frame textured_frame(int w, int h, int tile) {
  static const std::uint8_t palette[8][3] = {
      {64, 64, 64},  {64, 96, 128},  {96, 64, 96},   {96, 128, 64},
      {128, 96, 96}, {128, 128, 128}, {64, 128, 96}, {160, 128, 64}};
  Frame f(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint32_t hash = static_cast<std::uint32_t>(x / tile) * 73856093u ^
                           static_cast<std::uint32_t>(y / tile) * 19349663u;
      const std::uint8_t* c = palette[(hash >> 3) % 8];
      std::uint8_t* px = f.rgb(x, y);
      px[0] = c[0];
      px[1] = c[1];
      px[2] = c[2];
    }
  }
  return f;
}

void BM_Superpixels320(benchmark::State& state) {
  Frame frame = textured_frame(320, 320, 8);
  SlicParams params;
  for (auto _ : state) {
    SuperpixelDecomposition d = superpixels(frame, params);
    benchmark::DoNotOptimize(d.count);
  }
}
BENCHMARK(BM_Superpixels320)->Unit(benchmark::kMillisecond);

void BM_BuildFlow(benchmark::State& state) {
  Frame a = textured_frame(320, 320, 8);
  Frame b = textured_frame(320, 320, 11);
  SlicParams params;
  SuperpixelDecomposition du = superpixels(a, params);
  SuperpixelDecomposition dv = superpixels(b, params);
  FlowParams flow_params;
  for (auto _ : state) {
    Flow flow = build_flow(du, dv, flow_params);
    benchmark::DoNotOptimize(flow.weights.data());
  }
}
BENCHMARK(BM_BuildFlow)->Unit(benchmark::kMillisecond);

void BM_BaselinePair(benchmark::State& state) {
  Frame a = textured_frame(320, 320, 8);
  Frame b = textured_frame(320, 320, 11);
  BackendConfig cfg;
  for (auto _ : state) {
    PairResult res = coseg_pair(a, b, cfg);
    benchmark::DoNotOptimize(res.map_a.values.data());
  }
}
BENCHMARK(BM_BaselinePair)->Unit(benchmark::kMillisecond);

void BM_CosegCallCount(benchmark::State& state) {
  for (auto _ : state) {
    long long total = 0;
    for (int d = 1; d <= 9; ++d) total += coseg_call_count(1000, d);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_CosegCallCount);

void BM_Propagate400(benchmark::State& state) {
  const int n = 400;
  Flow flow;
  flow.rows = flow.cols = n;
  flow.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 8); j <= std::min(n - 1, i + 8); ++j)
      flow.weights[static_cast<std::size_t>(i) * n + j] = 1.0 / 17.0;
  std::vector<double> cur(n, 0.4), prev(n, 0.6), next(n, 0.2);
  RefinementParams params;
  for (auto _ : state) {
    std::vector<double> out =
        propagate(cur, &prev, &flow, &next, &flow, params);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Propagate400);

}  // namespace

BENCHMARK_MAIN();
