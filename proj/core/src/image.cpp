#include "cecl/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "cecl/errors.hpp"

namespace cecl {

GrayImage GrayImage::filled(int w, int h, std::uint8_t value) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.data.assign(std::size_t(w) * h, value);
    return img;
}

BinaryImage BinaryImage::filled(int w, int h, std::uint8_t value) {
    BinaryImage img;
    img.width = w;
    img.height = h;
    img.data.assign(std::size_t(w) * h, value);
    return img;
}

std::uint64_t IntegralImage::rect_sum(const Rect& r) const {
    return plain_at(r.right(), r.bottom()) + plain_at(r.x, r.y) -
           plain_at(r.right(), r.y) - plain_at(r.x, r.bottom());
}

std::uint64_t IntegralImage::rect_sum_squared(const Rect& r) const {
    return squared_at(r.right(), r.bottom()) + squared_at(r.x, r.y) -
           squared_at(r.right(), r.y) - squared_at(r.x, r.bottom());
}

Kernel gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0)
        throw ParamError("gaussian_kernel: size must be odd and >= 1, got " + std::to_string(size));
    if (!(sigma > 0.0))
        throw ParamError("gaussian_kernel: sigma must be > 0, got " + std::to_string(sigma));

    Kernel k;
    k.size = size;
    k.weights.resize(std::size_t(size) * size);
    const int half = size / 2;
    double sum = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            double w = std::exp(-(double(dx) * dx + double(dy) * dy) / (2.0 * sigma * sigma));
            k.weights[std::size_t(dy + half) * size + (dx + half)] = w;
            sum += w;
        }
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

GrayImage convolve(const GrayImage& image, const Kernel& kernel) {
    GrayImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());

    const int half = kernel.size / 2;
    const int w = image.width;
    const int h = image.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = -half; ky <= half; ++ky) {
                int sy = std::clamp(y + ky, 0, h - 1); // replicate border
                for (int kx = -half; kx <= half; ++kx) {
                    int sx = std::clamp(x + kx, 0, w - 1);
                    acc += kernel.at(kx + half, ky + half) * image.at(sx, sy);
                }
            }
            int v = round_half_away(acc);
            out.at(x, y) = std::uint8_t(std::clamp(v, 0, 255));
        }
    }
    return out;
}

GrayImage equalize_histogram(const GrayImage& image) {
    std::array<std::uint32_t, 256> hist{};
    for (std::uint8_t v : image.data) hist[v]++;

    const std::uint64_t n = image.pixel_count();
    std::array<std::uint64_t, 256> cdf{};
    std::uint64_t run = 0;
    std::uint64_t cdf_min = 0;
    bool seen = false;
    for (int v = 0; v < 256; ++v) {
        run += hist[v];
        cdf[v] = run;
        if (!seen && hist[v] > 0) {
            cdf_min = run;
            seen = true;
        }
    }
    if (n == cdf_min) // single occupied level: keep the image as is
        return image;

    std::array<std::uint8_t, 256> remap{};
    for (int v = 0; v < 256; ++v) {
        double scaled = 255.0 * double(cdf[v] - std::min(cdf[v], cdf_min)) / double(n - cdf_min);
        remap[v] = std::uint8_t(std::clamp(round_half_away(scaled), 0, 255));
    }
    GrayImage out = image;
    for (std::uint8_t& v : out.data) v = remap[v];
    return out;
}

BinaryImage binarize(const GrayImage& image, int threshold) {
    BinaryImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i)
        out.data[i] = image.data[i] > threshold ? 1 : 0;
    return out;
}

namespace {

// Min (erode=true) or max filter of the bright raster over a side x side
// window clipped to the image. Clipping realizes the off-image-is-bright
// rule: bright padding never lowers a min nor raises a max.
BinaryImage window_filter(const BinaryImage& in, int side, bool erode) {
    const int half = side / 2;
    const int w = in.width;
    const int h = in.height;
    BinaryImage out = in;

    // horizontal pass
    BinaryImage mid = in;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int x0 = std::max(0, x - half);
            int x1 = std::min(w - 1, x + half);
            std::uint8_t v = erode ? 1 : 0;
            for (int sx = x0; sx <= x1; ++sx) {
                std::uint8_t s = in.at(sx, y);
                v = erode ? std::min(v, s) : std::max(v, s);
            }
            mid.at(x, y) = v;
        }
    }
    // vertical pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int y0 = std::max(0, y - half);
            int y1 = std::min(h - 1, y + half);
            std::uint8_t v = erode ? 1 : 0;
            for (int sy = y0; sy <= y1; ++sy) {
                std::uint8_t s = mid.at(x, sy);
                v = erode ? std::min(v, s) : std::max(v, s);
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

} // namespace

BinaryImage close_dark(const BinaryImage& image, const StructuringElement& se) {
    if (se.side < 3 || se.side % 2 == 0)
        throw ParamError("close_dark: structuring element side must be odd and >= 3, got " +
                         std::to_string(se.side));
    // Opening of the bright set == closing of the dark set.
    BinaryImage eroded = window_filter(image, se.side, /*erode=*/true);
    return window_filter(eroded, se.side, /*erode=*/false);
}

IntegralImage integral_images(const GrayImage& image) {
    IntegralImage ii;
    ii.width = image.width;
    ii.height = image.height;
    const int tw = image.width + 1;
    const int th = image.height + 1;
    ii.plain.assign(std::size_t(tw) * th, 0);
    ii.squared.assign(std::size_t(tw) * th, 0);
    for (int y = 0; y < image.height; ++y) {
        std::uint64_t row = 0;
        std::uint64_t row_sq = 0;
        for (int x = 0; x < image.width; ++x) {
            std::uint64_t v = image.at(x, y);
            row += v;
            row_sq += v * v;
            ii.plain[std::size_t(y + 1) * tw + (x + 1)] = ii.plain[std::size_t(y) * tw + (x + 1)] + row;
            ii.squared[std::size_t(y + 1) * tw + (x + 1)] =
                ii.squared[std::size_t(y) * tw + (x + 1)] + row_sq;
        }
    }
    return ii;
}

GrayImage crop(const GrayImage& image, const Rect& rect) {
    if (rect.w < 1 || rect.h < 1 || !image.bounds().contains(rect))
        throw BoundsError("crop: rect " + to_string(rect) + " outside image " +
                          std::to_string(image.width) + "x" + std::to_string(image.height));
    GrayImage out;
    out.width = rect.w;
    out.height = rect.h;
    out.data.resize(std::size_t(rect.w) * rect.h);
    for (int y = 0; y < rect.h; ++y) {
        auto src = image.data.begin() + std::size_t(rect.y + y) * image.width + rect.x;
        std::copy(src, src + rect.w, out.data.begin() + std::size_t(y) * rect.w);
    }
    return out;
}

const std::vector<Point>& circle_ring(int r) {
    static std::map<int, std::vector<Point>> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;

    std::vector<Point> pts;
    for (int dy = -r - 1; dy <= r + 1; ++dy) {
        for (int dx = -r - 1; dx <= r + 1; ++dx) {
            long long d2 = (long long)dx * dx + (long long)dy * dy;
            if (std::lround(std::sqrt(double(d2))) == r) pts.push_back({dx, dy});
        }
    }
    return cache.emplace(r, std::move(pts)).first->second;
}

int circle_ring_size(int r) {
    return int(circle_ring(r).size());
}

namespace {

void put(GrayImage& img, int x, int y) {
    if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.at(x, y) = 255;
}

} // namespace

GrayImage annotate(const GrayImage& image, const std::vector<Circle>& circles,
                   const std::vector<Point>& points) {
    GrayImage out = image;
    for (const Circle& c : circles) {
        for (const Point& d : circle_ring(c.r)) put(out, c.cx + d.x, c.cy + d.y);
    }
    for (const Point& p : points) {
        for (int d = -2; d <= 2; ++d) {
            put(out, p.x + d, p.y);
            put(out, p.x, p.y + d);
        }
    }
    return out;
}

} // namespace cecl
