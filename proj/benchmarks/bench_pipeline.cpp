#include <benchmark/benchmark.h>

#include "cecl/cascade.hpp"
#include "cecl/pipeline.hpp"
#include "cecl/rng.hpp"
#include "cecl/synth.hpp"

using namespace cecl;

static void BM_FaceDetect(benchmark::State& state) {
    auto model = cascade::load_cascade_file(std::string(CECL_DATA_DIR) +
                                            "/haarcascade_face_basic.xml");
    synth::FaceFrame ff = synth::make_face_frame(200, 200, {52, 44, 96, 96});
    for (auto _ : state) {
        auto hits = cascade::detect_multiscale(ff.image, model, {});
        benchmark::DoNotOptimize(hits.data());
    }
}
BENCHMARK(BM_FaceDetect);

static void BM_PipelineProvidedRegions(benchmark::State& state) {
    Rng rng(10);
    synth::Frame f = synth::make_frame(rng);
    pipeline::Localizer loc;
    pipeline::PipelineConfig cfg;
    auto provided = std::make_pair(f.left_region, f.right_region);
    for (auto _ : state) {
        pipeline::LocalizationResult res = loc.run(f.image, provided, cfg);
        benchmark::DoNotOptimize(res.left.center);
    }
}
BENCHMARK(BM_PipelineProvidedRegions);

static void BM_PipelineRebinarize(benchmark::State& state) {
    // the tuning loop's unit of work: localize from a prepared frame
    Rng rng(11);
    synth::Frame f = synth::make_frame(rng);
    pipeline::Localizer loc;
    pipeline::PipelineConfig cfg;
    pipeline::PreparedFrame prepared =
        loc.prepare(f.image, std::make_pair(f.left_region, f.right_region), cfg);
    for (auto _ : state) {
        pipeline::LocalizationResult res = loc.localize(prepared, cfg);
        benchmark::DoNotOptimize(res.left.center);
    }
}
BENCHMARK(BM_PipelineRebinarize);

static void BM_PipelineWithCascades(benchmark::State& state) {
    auto face = cascade::load_cascade_file(std::string(CECL_DATA_DIR) +
                                           "/haarcascade_face_basic.xml");
    auto eye =
        cascade::load_cascade_file(std::string(CECL_DATA_DIR) + "/haarcascade_eye_basic.xml");
    pipeline::Localizer loc(face, eye);
    pipeline::PipelineConfig cfg;
    synth::FaceFrame ff = synth::make_face_frame(200, 200, {52, 44, 96, 96});
    for (auto _ : state) {
        pipeline::LocalizationResult res = loc.run(ff.image, std::nullopt, cfg);
        benchmark::DoNotOptimize(res.left.center);
    }
}
BENCHMARK(BM_PipelineWithCascades);
