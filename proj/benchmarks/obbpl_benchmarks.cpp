// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "obbpl/fixtures.hpp"
#include "obbpl/geometry.hpp"
#include "obbpl/mask.hpp"
#include "obbpl/pipeline.hpp"
#include "obbpl/scoring.hpp"
#include "obbpl/selection.hpp"
#include "obbpl/symmetry.hpp"

namespace {

using namespace obbpl;

BinaryMask rectangle_mask(int size, double angle) {
  const ShapeParams shape{FixtureShape::kRectangle, size / 2.0, size / 2.0, 0.6 * size, 0.3 * size, angle, 0.2};
  return rasterize(shape, size, size);
}

void BM_RotatedIou(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<std::pair<OrientedBox, OrientedBox>> pairs;
  for (int i = 0; i < 256; ++i) {
    pairs.push_back({{u(rng), u(rng), 4 + u(rng), 2 + u(rng) / 3, u(rng)},
                     {u(rng), u(rng), 4 + u(rng), 2 + u(rng) / 3, u(rng)}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(rotated_iou(a, b));
  }
}
BENCHMARK(BM_RotatedIou);

void BM_MinAreaRect(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 10);
  std::vector<Point2> pts(static_cast<std::size_t>(state.range(0)));
  for (Point2& p : pts) p = {3 * g(rng), g(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(min_area_rect(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinAreaRect)->RangeMultiplier(8)->Range(64, 32768)->Complexity();

void BM_RleRoundTrip(benchmark::State& state) {
  const BinaryMask m = rectangle_mask(static_cast<int>(state.range(0)), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(rle_decode(rle_encode(m)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(m.bits().size()));
}
BENCHMARK(BM_RleRoundTrip)->Arg(256)->Arg(1024);

void BM_SymmetryAxis(benchmark::State& state) {
  const BinaryMask m = rectangle_mask(static_cast<int>(state.range(0)), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(symmetry_axis(m));
}
BENCHMARK(BM_SymmetryAxis)->Arg(256)->Arg(1024);

void BM_ObbFromMask(benchmark::State& state) {
  const BinaryMask m = rectangle_mask(512, 0.4);
  const ConversionMode mode = state.range(0) ? ConversionMode::symmetry_axis() : ConversionMode::minimum_only();
  for (auto _ : state) benchmark::DoNotOptimize(obb_from_mask(m, mode));
}
BENCHMARK(BM_ObbFromMask)->Arg(0)->Arg(1);

void BM_FusedSelect(benchmark::State& state) {
  FixtureSpec spec;
  spec.images = 1;
  const FixtureDataset f = generate_fixtures(spec);
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  const PipelineConfig config;
  SelectionContext ctx;
  ctx.category_index = config.category_index(d.sets[0].annotation.category);
  ctx.conversion = config.conversion;
  for (auto _ : state) benchmark::DoNotOptimize(select(d.sets[0], Fused{}, ctx));
}
BENCHMARK(BM_FusedSelect);

void BM_Pipeline(benchmark::State& state) {
  FixtureSpec spec;
  spec.images = 4;
  const FixtureDataset f = generate_fixtures(spec);
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  PipelineConfig config;
  config.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(d, config));
}
BENCHMARK(BM_Pipeline)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
