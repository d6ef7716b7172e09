#pragma once

#include <cstdint>
#include <vector>

#include "cecl/types.hpp"

namespace cecl {

// 8-bit grayscale raster, row major. Invariant: data.size() == w*h.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static GrayImage filled(int w, int h, std::uint8_t value);

    std::uint8_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
    Rect bounds() const { return {0, 0, width, height}; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// {0,1} raster with the polarity used throughout: 1 = bright (background),
// 0 = dark (iris candidate).
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static BinaryImage filled(int w, int h, std::uint8_t value);

    std::uint8_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    Rect bounds() const { return {0, 0, width, height}; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

// Square convolution kernel, odd side. Smoothing kernels are normalized to
// sum 1.
struct Kernel {
    int size = 1;
    std::vector<double> weights; // size*size, row major

    double at(int kx, int ky) const { return weights[std::size_t(ky) * size + kx]; }
};

// Square structuring element for morphology, odd side >= 3.
struct StructuringElement {
    int side = 3;
};

// Summed-area tables with a zero first row and column: plain(x, y) holds the
// sum of all pixels strictly above and left of (x, y). The squared table
// carries intensity squares for variance lookups.
struct IntegralImage {
    int width = 0;  // image width; tables are (width+1) x (height+1)
    int height = 0;
    std::vector<std::uint64_t> plain;
    std::vector<std::uint64_t> squared;

    std::uint64_t plain_at(int x, int y) const { return plain[std::size_t(y) * (width + 1) + x]; }
    std::uint64_t squared_at(int x, int y) const { return squared[std::size_t(y) * (width + 1) + x]; }

    // Sum of pixels in rect, O(1) four-corner lookup. Rect must lie inside
    // the image.
    std::uint64_t rect_sum(const Rect& r) const;
    std::uint64_t rect_sum_squared(const Rect& r) const;
};

// Candidate iris circle. score is perimeter completeness: the fraction of
// the circle raster backed by votes (filled in by the Hough stage).
struct Circle {
    int cx = 0;
    int cy = 0;
    int r = 1;
    double score = 0.0;

    friend bool operator==(const Circle&, const Circle&) = default;
};

// --- operators -------------------------------------------------------------

// Normalized Gaussian sampled at integer offsets from the kernel center.
// Throws ParamError on even size or sigma <= 0.
Kernel gaussian_kernel(int size, double sigma);

// Replicate-edge convolution; each output pixel is the weighted sum rounded
// half away from zero and clamped to [0,255].
GrayImage convolve(const GrayImage& image, const Kernel& kernel);

// CDF remap anchored at the lowest occupied level:
//   out(v) = round(255 * (cdf(v) - cdf_min) / (N - cdf_min)).
// A single-level image is returned unchanged.
GrayImage equalize_histogram(const GrayImage& image);

// out(p) = 1 iff in(p) > threshold (strict).
BinaryImage binarize(const GrayImage& image, int threshold);

// Morphological closing of the dark (0) set, realized as an opening of the
// bright set: min filter then max filter over the se window clipped to the
// image. Off-image pixels count as bright, so the dark set never grows
// off-image and an all-dark image is a fixed point.
BinaryImage close_dark(const BinaryImage& image, const StructuringElement& se);

IntegralImage integral_images(const GrayImage& image);

// Exact sub-raster copy. Throws BoundsError naming the rect when it falls
// outside the image.
GrayImage crop(const GrayImage& image, const Rect& rect);

// The ring of integer offsets whose rounded Euclidean distance from the
// origin equals r. This is the circle raster used for Hough voting,
// perimeter normalization and annotation. r >= 1.
const std::vector<Point>& circle_ring(int r);

// Number of pixels in circle_ring(r).
int circle_ring_size(int r);

// Burns circle outlines and 5-px crosshairs into a copy of the image at
// intensity 255; anything off-image is clipped.
GrayImage annotate(const GrayImage& image, const std::vector<Circle>& circles,
                   const std::vector<Point>& points);

} // namespace cecl
