#include <benchmark/benchmark.h>

#include "cecl/image.hpp"
#include "cecl/rng.hpp"

using namespace cecl;

namespace {

GrayImage random_image(int w, int h, std::uint32_t seed) {
    Rng rng(seed);
    GrayImage img = GrayImage::filled(w, h, 0);
    for (auto& v : img.data) v = std::uint8_t(rng.uniform(0, 255));
    return img;
}

} // namespace

static void BM_Convolve5x5(benchmark::State& state) {
    int side = int(state.range(0));
    GrayImage img = random_image(side, side, 1);
    Kernel k = gaussian_kernel(5, 0.05 * side);
    for (auto _ : state) {
        GrayImage out = convolve(img, k);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Convolve5x5)->Arg(96)->Arg(192)->Arg(384);

static void BM_EqualizeHistogram(benchmark::State& state) {
    int side = int(state.range(0));
    GrayImage img = random_image(side, side, 2);
    for (auto _ : state) {
        GrayImage out = equalize_histogram(img);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_EqualizeHistogram)->Arg(48)->Arg(384);

static void BM_IntegralImages(benchmark::State& state) {
    int side = int(state.range(0));
    GrayImage img = random_image(side, side, 3);
    for (auto _ : state) {
        IntegralImage ii = integral_images(img);
        benchmark::DoNotOptimize(ii.plain.data());
    }
    state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_IntegralImages)->Arg(96)->Arg(384);

static void BM_CloseDark(benchmark::State& state) {
    Rng rng(4);
    BinaryImage img = BinaryImage::filled(48, 48, 1);
    for (auto& v : img.data) v = rng.chance(0.3) ? 0 : 1;
    StructuringElement se{int(state.range(0))};
    for (auto _ : state) {
        BinaryImage out = close_dark(img, se);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_CloseDark)->Arg(3)->Arg(7);
