#include <benchmark/benchmark.h>

#include "cecl/hough.hpp"
#include "cecl/rng.hpp"

using namespace cecl;

namespace {

// a typical eye-region binary: dark disk, some noise
BinaryImage eye_like(int side, std::uint32_t seed) {
    Rng rng(seed);
    BinaryImage img = BinaryImage::filled(side, side, 1);
    int r = side / 4;
    int cx = side / 2, cy = side / 2;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            long long dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= (long long)r * r) img.at(x, y) = 0;
        }
    for (int i = 0; i < side * side / 50; ++i)
        img.at(rng.uniform(0, side - 1), rng.uniform(0, side - 1)) ^= 1;
    return img;
}

} // namespace

static void BM_BoundaryPixels(benchmark::State& state) {
    BinaryImage img = eye_like(int(state.range(0)), 7);
    for (auto _ : state) {
        auto pts = hough::boundary_pixels(img);
        benchmark::DoNotOptimize(pts.data());
    }
}
BENCHMARK(BM_BoundaryPixels)->Arg(48)->Arg(96);

static void BM_HoughAccumulate(benchmark::State& state) {
    int side = int(state.range(0));
    BinaryImage img = eye_like(side, 8);
    auto pts = hough::boundary_pixels(img);
    hough::RadiusRange rr = hough::radius_range(side, {});
    for (auto _ : state) {
        hough::HoughAccumulator acc = hough::accumulate(pts, side, side, rr);
        benchmark::DoNotOptimize(acc.counts.data());
    }
    state.SetItemsProcessed(state.iterations() * long(pts.size()) * rr.count());
}
BENCHMARK(BM_HoughAccumulate)->Arg(48)->Arg(96);

static void BM_HoughFullDetection(benchmark::State& state) {
    int side = int(state.range(0));
    BinaryImage img = eye_like(side, 9);
    hough::RadiusRange rr = hough::radius_range(side, {});
    for (auto _ : state) {
        auto pts = hough::boundary_pixels(img);
        auto best = hough::best_circle(hough::accumulate(pts, side, side, rr), 0.35);
        benchmark::DoNotOptimize(best);
    }
}
BENCHMARK(BM_HoughFullDetection)->Arg(48)->Arg(96);
