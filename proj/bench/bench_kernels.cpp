// Parallel kernels vs the serial reference on solver-sized grids.
#include <benchmark/benchmark.h>

#include "flowkit/image_ops.hpp"
#include "flowkit/matching.hpp"
#include "flowkit/photometric.hpp"
#include "flowkit/reference.hpp"
#include "flowkit/smoothness.hpp"
#include "flowkit/synth.hpp"

namespace {

using namespace flowkit;

struct Fixture {
  Image image1, image2;
  FlowField flow;
  Mask mask;
  explicit Fixture(int n)
      : image1(noise_texture(1, n, n, 3)),
        image2(noise_texture(2, n, n, 3)),
        flow(n, n, 2, 0.0),
        mask(n, n, 1, 1.0) {
    Image f = noise_texture(3, n, n, 3);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        flow.at(y, x, 0) = 3.0 * f.at(y, x, 0);
        flow.at(y, x, 1) = 3.0 * f.at(y, x, 1);
      }
  }
};

void BM_warp_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(warp(f.image2, f.flow, Border::Clamp));
}
BENCHMARK(BM_warp_parallel)->Arg(128)->Arg(512);

void BM_warp_reference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::warp_clamp(f.image2, f.flow));
}
BENCHMARK(BM_warp_reference)->Arg(128)->Arg(512);

void BM_census_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  PhotometricConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(census_loss(f.image1, f.image2, f.mask, cfg));
}
BENCHMARK(BM_census_parallel)->Arg(128)->Arg(256);

void BM_census_reference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  PhotometricConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        reference::census_loss(f.image1, f.image2, f.mask, cfg));
}
BENCHMARK(BM_census_reference)->Arg(128)->Arg(256);

void BM_ssim_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  PhotometricConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(ssim_loss(f.image1, f.image2, f.mask, cfg));
}
BENCHMARK(BM_ssim_parallel)->Arg(128)->Arg(256);

void BM_ssim_reference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  PhotometricConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        reference::ssim_loss(f.image1, f.image2, f.mask, cfg));
}
BENCHMARK(BM_ssim_reference)->Arg(128)->Arg(256);

void BM_cost_volume_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const FeatureMap a = normalize_features(extract_features(f.image1));
  const FeatureMap b = normalize_features(extract_features(f.image2));
  for (auto _ : state) benchmark::DoNotOptimize(cost_volume(a, b, 4));
}
BENCHMARK(BM_cost_volume_parallel)->Arg(64)->Arg(128);

void BM_cost_volume_reference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const FeatureMap a = normalize_features(extract_features(f.image1));
  const FeatureMap b = normalize_features(extract_features(f.image2));
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::cost_volume(a.values, b.values, 4));
}
BENCHMARK(BM_cost_volume_reference)->Arg(64)->Arg(128);

void BM_smoothness_parallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  SmoothnessConfig cfg;
  cfg.order = 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        smoothness_loss_at_resolution(f.flow, f.image1, cfg));
}
BENCHMARK(BM_smoothness_parallel)->Arg(128)->Arg(512);

void BM_smoothness_reference(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  SmoothnessConfig cfg;
  cfg.order = 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::smoothness_loss(f.flow, f.image1, cfg));
}
BENCHMARK(BM_smoothness_reference)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
