#include "cecl/hough.hpp"

#include <algorithm>
#include <cmath>

#include "cecl/errors.hpp"

namespace cecl::hough {

RadiusRange radius_range(int region_width, const HoughParams& params) {
    RadiusRange rr;
    rr.r_min = std::max(2, int(std::lround(params.r_min_frac * region_width)));
    rr.r_max = int(std::lround(params.r_max_frac * region_width));
    return rr;
}

std::uint64_t HoughAccumulator::total_votes() const {
    std::uint64_t total = 0;
    for (std::uint32_t c : counts) total += c;
    return total;
}

std::vector<Point> boundary_pixels(const BinaryImage& binary) {
    std::vector<Point> out;
    const int w = binary.width;
    const int h = binary.height;
    auto bright = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return true; // off-image is bright
        return binary.at(x, y) != 0;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (binary.at(x, y) != 0) continue;
            if (bright(x - 1, y) || bright(x + 1, y) || bright(x, y - 1) || bright(x, y + 1))
                out.push_back({x, y});
        }
    }
    return out;
}

HoughAccumulator accumulate(const std::vector<Point>& points, int width, int height,
                            const RadiusRange& radii) {
    if (radii.empty())
        throw ParamError("hough: empty radius range [" + std::to_string(radii.r_min) + ", " +
                         std::to_string(radii.r_max) + "]");

    HoughAccumulator acc;
    acc.width = width;
    acc.height = height;
    acc.r_min = radii.r_min;
    acc.r_max = radii.r_max;
    acc.counts.assign(std::size_t(width) * height * radii.count(), 0);

    for (int r = radii.r_min; r <= radii.r_max; ++r) {
        const auto& ring = circle_ring(r);
        std::uint32_t* plane = acc.counts.data() + std::size_t(r - radii.r_min) * width * height;
        for (const Point& p : points) {
            for (const Point& d : ring) {
                int cx = p.x + d.x;
                int cy = p.y + d.y;
                if (cx >= 0 && cy >= 0 && cx < width && cy < height)
                    plane[std::size_t(cy) * width + cx]++;
            }
        }
    }
    return acc;
}

namespace {

// Selection order shared by best_circle and the oracle: max score, ties by
// higher raw count, then smaller r, then row-major (cy, cx).
bool beats(double score, std::uint32_t count, int cx, int cy, int r, const Circle& best,
           std::uint32_t best_count) {
    if (score != best.score) return score > best.score;
    if (count != best_count) return count > best_count;
    if (r != best.r) return r < best.r;
    if (cy != best.cy) return cy < best.cy;
    return cx < best.cx;
}

} // namespace

std::optional<Circle> best_circle(const HoughAccumulator& acc, double min_completeness) {
    bool have = false;
    Circle best;
    std::uint32_t best_count = 0;

    for (int r = acc.r_min; r <= acc.r_max; ++r) {
        const double perimeter = circle_ring_size(r);
        const std::uint32_t* plane =
            acc.counts.data() + std::size_t(r - acc.r_min) * acc.width * acc.height;
        for (int cy = 0; cy < acc.height; ++cy) {
            for (int cx = 0; cx < acc.width; ++cx) {
                std::uint32_t count = plane[std::size_t(cy) * acc.width + cx];
                if (count == 0) continue;
                double score = double(count) / perimeter;
                if (!have || beats(score, count, cx, cy, r, best, best_count)) {
                    best = Circle{cx, cy, r, score};
                    best_count = count;
                    have = true;
                }
            }
        }
    }
    if (!have || best.score < min_completeness) return std::nullopt;
    return best;
}

std::optional<Circle> oracle_best_circle(const std::vector<Point>& points, int width,
                                         int height, const RadiusRange& radii,
                                         double min_completeness) {
    if (radii.empty()) return std::nullopt;

    // Ring sizes recomputed from scratch: brute-force count of offsets at
    // each rounded distance.
    std::vector<int> ring_size(std::size_t(radii.r_max) + 1, 0);
    for (int r = radii.r_min; r <= radii.r_max; ++r) {
        int n = 0;
        for (int dy = -r - 1; dy <= r + 1; ++dy)
            for (int dx = -r - 1; dx <= r + 1; ++dx)
                if (std::lround(std::hypot(double(dx), double(dy))) == r) ++n;
        ring_size[std::size_t(r)] = n;
    }

    bool have = false;
    Circle best;
    std::uint32_t best_count = 0;
    std::vector<std::uint32_t> counts(std::size_t(radii.r_max) + 1);

    for (int cy = 0; cy < height; ++cy) {
        for (int cx = 0; cx < width; ++cx) {
            std::fill(counts.begin(), counts.end(), 0);
            for (const Point& p : points) {
                long rd = std::lround(std::hypot(double(p.x - cx), double(p.y - cy)));
                if (rd >= radii.r_min && rd <= radii.r_max) counts[std::size_t(rd)]++;
            }
            for (int r = radii.r_min; r <= radii.r_max; ++r) {
                std::uint32_t count = counts[std::size_t(r)];
                if (count == 0) continue;
                double score = double(count) / ring_size[std::size_t(r)];
                if (!have || beats(score, count, cx, cy, r, best, best_count)) {
                    best = Circle{cx, cy, r, score};
                    best_count = count;
                    have = true;
                }
            }
        }
    }
    if (!have || best.score < min_completeness) return std::nullopt;
    return best;
}

} // namespace cecl::hough
