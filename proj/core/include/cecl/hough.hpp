#pragma once

#include <optional>
#include <vector>

#include "cecl/image.hpp"
#include "cecl/types.hpp"

namespace cecl::hough {

using cecl::Circle;

struct HoughParams {
    double r_min_frac = 0.10;       // of region width
    double r_max_frac = 0.45;       // of region width
    double min_completeness = 0.35; // score a peak must clear
};

// Radius bounds derived from a region width: r_min = max(2, round(frac*w)).
struct RadiusRange {
    int r_min = 0;
    int r_max = -1; // empty when r_max < r_min

    bool empty() const { return r_max < r_min; }
    int count() const { return empty() ? 0 : r_max - r_min + 1; }
};

RadiusRange radius_range(int region_width, const HoughParams& params);

// (cx, cy, r) vote volume at 1-px resolution in all three dims.
struct HoughAccumulator {
    int width = 0;
    int height = 0;
    int r_min = 0;
    int r_max = 0;
    std::vector<std::uint32_t> counts; // width*height per radius plane

    std::uint32_t at(int cx, int cy, int r) const {
        std::size_t plane = std::size_t(r - r_min) * width * height;
        return counts[plane + std::size_t(cy) * width + cx];
    }
    std::uint64_t total_votes() const;
};

// All dark pixels with at least one bright 4-neighbor; off-image neighbors
// count as bright, matching the morphology border rule. Row-major order.
std::vector<Point> boundary_pixels(const BinaryImage& binary);

// Votes one ring per (point, radius): every in-region cell on the circle
// raster around the point gains one vote. Throws ParamError on an empty
// radius range.
HoughAccumulator accumulate(const std::vector<Point>& points, int width, int height,
                            const RadiusRange& radii);

// Radius-normalized peak: score(c, r) = count / circle_ring_size(r). Returns
// the best-scoring cell if it clears min_completeness, otherwise nullopt.
// Ties: higher raw count, then smaller r, then row-major (cy, cx).
std::optional<Circle> best_circle(const HoughAccumulator& acc, double min_completeness);

// Exhaustive reference: scores every (cx, cy, r) by counting points whose
// rounded distance to the center equals r. Same selection rule and
// tie-breaks as best_circle, implemented without the accumulator or the
// shared ring tables. Intended for small instances (<= 64x64).
std::optional<Circle> oracle_best_circle(const std::vector<Point>& points, int width,
                                         int height, const RadiusRange& radii,
                                         double min_completeness);

} // namespace cecl::hough
