#include <benchmark/benchmark.h>

#include <random>

#include "droplab/imageproc.hpp"
#include "droplab/photometry.hpp"
#include "droplab/pipeline.hpp"
#include "droplab/synth.hpp"

namespace {

using namespace droplab;

const synth::RenderedScene& scene() {
  static const synth::RenderedScene s = [] {
    synth::RandomSceneParams p;
    p.noise_amplitude = 6;
    return synth::render_scene(synth::random_scene(p));
  }();
  return s;
}

void BM_RenderScene(benchmark::State& state) {
  synth::RandomSceneParams p;
  p.frame_count = 24;
  p.noise_amplitude = 6;
  const auto spec = synth::random_scene(p);
  for (auto _ : state) benchmark::DoNotOptimize(synth::render_scene(spec, SedimentationModel{}, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * p.frame_count);
}
BENCHMARK(BM_RenderScene)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_OtsuLevel(benchmark::State& state) {
  const GrayImage& frame = scene().stack.frame(120);
  for (auto _ : state) benchmark::DoNotOptimize(otsu_level(histogram(frame)));
}
BENCHMARK(BM_OtsuLevel);

void BM_Segment(benchmark::State& state) {
  const GrayImage& frame = scene().stack.frame(120);
  const auto mask = threshold(frame, ThresholdMethod::fixed(6)).mask;
  for (auto _ : state) benchmark::DoNotOptimize(segment(mask, frame, 120));
}
BENCHMARK(BM_Segment);

void BM_HistogramStretch(benchmark::State& state) {
  const GrayImage& frame = scene().stack.frame(120);
  for (auto _ : state) benchmark::DoNotOptimize(histogram_stretch(frame));
}
BENCHMARK(BM_HistogramStretch);

void BM_BrightnessSeries(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(brightness_series(scene().stack, Region::Full, 5, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene().stack.size()));
}
BENCHMARK(BM_BrightnessSeries)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_TrackStack(benchmark::State& state) {
  DetectOptions detect;
  detect.method = ThresholdMethod::fixed(6);
  for (auto _ : state)
    benchmark::DoNotOptimize(track_stack(scene().stack, detect, LinkOptions{}, MeasureOptions{}, SedimentationModel{}));
}
BENCHMARK(BM_TrackStack)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
