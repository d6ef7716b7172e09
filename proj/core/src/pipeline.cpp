#include "cecl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cecl/errors.hpp"

namespace cecl::pipeline {

const char* to_string(RegionSource s) {
    switch (s) {
        case RegionSource::cascade: return "cascade";
        case RegionSource::fallback_rescan: return "fallback_rescan";
        case RegionSource::anthropometric_default: return "anthropometric_default";
        case RegionSource::provided: return "provided";
    }
    return "?";
}

const char* to_string(Method m) {
    return m == Method::hough_min_intensity ? "hough_min_intensity" : "region_center_fallback";
}

FaceDetection detect_face(const GrayImage& frame, const cascade::CascadeModel& face_model,
                          const cascade::DetectParams& params) {
    std::vector<Rect> hits = cascade::detect_multiscale(frame, face_model, params);
    if (hits.empty()) return {frame.bounds(), false};
    return {hits.front(), true}; // sorted by area descending
}

std::pair<Rect, Rect> split_face(const Rect& face, double keep_frac) {
    int kept_h = std::max(1, round_half_away(keep_frac * face.h));
    kept_h = std::min(kept_h, face.h);
    if (face.w < 2) {
        Rect whole{face.x, face.y, face.w, kept_h};
        return {whole, whole};
    }
    int left_w = face.w / 2;
    Rect left{face.x, face.y, left_w, kept_h};
    Rect right{face.x + left_w, face.y, face.w - left_w, kept_h};
    return {left, right};
}

int se_side_for(int region_width) {
    double v = 0.05 * region_width;
    int odd = 2 * int(std::floor(v / 2.0)) + 1;
    return std::max(3, odd);
}

namespace {

Rect anthropometric_box(const Rect& half) {
    int w = std::clamp(round_half_away(0.9 * half.w), 1, half.w);
    int h = std::clamp(round_half_away(0.5 * half.h), 1, half.h);
    int x = half.x + (half.w - w) / 2;
    int y = half.y + std::clamp(round_half_away(0.45 * half.h - 0.5 * h), 0, half.h - h);
    return {x, y, w, h};
}

EyeRegion region_for_half(const GrayImage& frame, const Rect& half,
                          const cascade::CascadeModel& eye_model, const PipelineConfig& cfg) {
    GrayImage half_img = crop(frame, half);

    std::vector<Rect> hits = cascade::detect_multiscale(half_img, eye_model, cfg.eye_detect);
    if (!hits.empty()) {
        Rect r = hits.front();
        return {{half.x + r.x, half.y + r.y, r.w, r.h}, Side::left, RegionSource::cascade};
    }

    // exhaustive rescan: every raw hit, finer scale steps
    cascade::DetectParams rescan = cfg.eye_detect;
    rescan.min_neighbors = 0;
    rescan.scale_factor = 1.05;
    hits = cascade::detect_multiscale(half_img, eye_model, rescan);
    if (!hits.empty()) {
        double best_d = std::numeric_limits<double>::infinity();
        Rect best = hits.front();
        for (const Rect& r : hits) {
            double dx = r.center_x() - 0.5 * half.w;
            double dy = r.center_y() - 0.5 * half.h;
            double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best = r;
            }
        }
        return {{half.x + best.x, half.y + best.y, best.w, best.h}, Side::left,
                RegionSource::fallback_rescan};
    }

    return {anthropometric_box(half), Side::left, RegionSource::anthropometric_default};
}

} // namespace

std::array<EyeRegion, 2> eye_regions(const GrayImage& frame, const Rect& face,
                                     const cascade::CascadeModel& eye_model,
                                     const PipelineConfig& cfg) {
    auto [left_half, right_half] = split_face(face, cfg.face_keep_frac);
    EyeRegion a = region_for_half(frame, left_half, eye_model, cfg);
    EyeRegion b = region_for_half(frame, right_half, eye_model, cfg);
    if (b.rect.center_x() < a.rect.center_x()) std::swap(a, b);
    a.side = Side::left;
    b.side = Side::right;
    return {a, b};
}

namespace {

struct CropEqualized {
    GrayImage equalized;
    int crop_offset_y = 0;
    bool degenerate = false;
};

CropEqualized crop_and_equalize(const GrayImage& region_gray, double t_e) {
    int crop_rows = std::max(0, round_half_away(t_e * region_gray.height));
    int remaining = region_gray.height - crop_rows;
    if (remaining < 4) // degenerate: keep the uncropped raster
        return {equalize_histogram(region_gray), 0, true};
    GrayImage cropped =
        crop(region_gray, {0, crop_rows, region_gray.width, remaining});
    return {equalize_histogram(cropped), crop_rows, false};
}

BinaryImage binarize_and_close(const GrayImage& equalized, int t_b) {
    BinaryImage bin = binarize(equalized, t_b);
    return close_dark(bin, {se_side_for(equalized.width)});
}

} // namespace

Preprocessed preprocess(const GrayImage& region_gray, const PipelineConfig& cfg) {
    CropEqualized ce = crop_and_equalize(region_gray, cfg.t_e);
    Preprocessed out;
    out.equalized = std::move(ce.equalized);
    out.crop_offset_y = ce.crop_offset_y;
    out.degenerate = ce.degenerate;
    out.binary = binarize_and_close(out.equalized, cfg.t_b);
    return out;
}

CenterEstimate localize_center(const BinaryImage& binary, const GrayImage& equalized,
                               const PipelineConfig& cfg) {
    const int w = binary.width;
    const int h = binary.height;
    CenterEstimate fallback{{w / 2, h / 2}, Method::region_center_fallback, std::nullopt};

    hough::RadiusRange radii = hough::radius_range(w, cfg.hough);
    if (radii.empty()) return fallback;

    std::vector<Point> boundary = hough::boundary_pixels(binary);
    if (boundary.empty()) return fallback;

    hough::HoughAccumulator acc = hough::accumulate(boundary, w, h, radii);
    std::optional<Circle> circle = hough::best_circle(acc, cfg.hough.min_completeness);
    if (!circle) return fallback;

    // darkest equalized pixels strictly inside the circle
    const long long r2 = (long long)circle->r * circle->r;
    int min_val = 256;
    long long sum_x = 0, sum_y = 0, count = 0;
    int y0 = std::max(0, circle->cy - circle->r + 1);
    int y1 = std::min(h - 1, circle->cy + circle->r - 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = std::max(0, circle->cx - circle->r + 1);
             x <= std::min(w - 1, circle->cx + circle->r - 1); ++x) {
            long long dx = x - circle->cx;
            long long dy = y - circle->cy;
            if (dx * dx + dy * dy >= r2) continue;
            int v = equalized.at(x, y);
            if (v < min_val) {
                min_val = v;
                sum_x = x;
                sum_y = y;
                count = 1;
            } else if (v == min_val) {
                sum_x += x;
                sum_y += y;
                ++count;
            }
        }
    }
    if (count == 0) return fallback; // circle has no interior pixels in-region

    Point center{round_half_away(double(sum_x) / count), round_half_away(double(sum_y) / count)};
    long long cdx = center.x - circle->cx;
    long long cdy = center.y - circle->cy;
    if (cdx * cdx + cdy * cdy >= r2) {
        // crescent-shaped argmin set: snap to the member nearest the circle
        // center, ties row-major
        long long best_d = std::numeric_limits<long long>::max();
        Point best{};
        for (int y = y0; y <= y1; ++y) {
            for (int x = std::max(0, circle->cx - circle->r + 1);
                 x <= std::min(w - 1, circle->cx + circle->r - 1); ++x) {
                long long dx = x - circle->cx;
                long long dy = y - circle->cy;
                if (dx * dx + dy * dy >= r2) continue;
                if (equalized.at(x, y) != min_val) continue;
                long long d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = {x, y};
                }
            }
        }
        center = best;
    }
    return {center, Method::hough_min_intensity, circle};
}

Localizer::Localizer(cascade::CascadeModel face_model, cascade::CascadeModel eye_model)
    : models_(Models{std::move(face_model), std::move(eye_model)}) {}

PreparedFrame Localizer::prepare(const GrayImage& frame,
                                 const std::optional<std::pair<Rect, Rect>>& provided,
                                 const PipelineConfig& cfg) const {
    if (!provided && !models_)
        throw ConfigError("pipeline: no cascade models loaded and no regions provided");
    if (provided) {
        for (const Rect* r : {&provided->first, &provided->second}) {
            if (r->w < 1 || r->h < 1 || !frame.bounds().contains(*r))
                throw ConfigError("pipeline: provided region " + to_string(*r) +
                                  " outside frame " + std::to_string(frame.width) + "x" +
                                  std::to_string(frame.height));
        }
    }

    Kernel smooth = gaussian_kernel(cfg.smooth_kernel_size, cfg.smooth_sigma_frac * frame.width);
    GrayImage smoothed = convolve(frame, smooth);

    PreparedFrame out;
    std::array<EyeRegion, 2> regions;
    if (provided) {
        EyeRegion a{provided->first, Side::left, RegionSource::provided};
        EyeRegion b{provided->second, Side::right, RegionSource::provided};
        if (b.rect.center_x() < a.rect.center_x()) std::swap(a, b);
        a.side = Side::left;
        b.side = Side::right;
        regions = {a, b};
        out.face = frame.bounds();
        out.face_from_cascade = false;
    } else {
        FaceDetection face = detect_face(smoothed, models_->face, cfg.face_detect);
        out.face = face.rect;
        out.face_from_cascade = face.from_cascade;
        regions = eye_regions(smoothed, face.rect, models_->eye, cfg);
    }

    for (int i = 0; i < 2; ++i) {
        GrayImage region_gray = crop(smoothed, regions[std::size_t(i)].rect);
        CropEqualized ce = crop_and_equalize(region_gray, cfg.t_e);
        out.eyes[std::size_t(i)] =
            PreparedEye{regions[std::size_t(i)], std::move(ce.equalized), ce.crop_offset_y,
                        ce.degenerate};
    }
    return out;
}

LocalizationResult Localizer::localize(const PreparedFrame& prepared,
                                       const PipelineConfig& cfg) const {
    LocalizationResult out;
    out.face = prepared.face;
    out.face_from_cascade = prepared.face_from_cascade;

    for (int i = 0; i < 2; ++i) {
        const PreparedEye& eye = prepared.eyes[std::size_t(i)];
        BinaryImage binary = binarize_and_close(eye.equalized, cfg.t_b);
        CenterEstimate est = localize_center(binary, eye.equalized, cfg);

        EyeLocalization loc;
        loc.region = eye.region;
        loc.method = est.method;
        loc.center = {eye.region.rect.x + est.center.x,
                      eye.region.rect.y + eye.crop_offset_y + est.center.y};
        if (est.circle) {
            Circle c = *est.circle;
            c.cy += eye.crop_offset_y; // region-local coordinates
            loc.circle = c;
        }
        (i == 0 ? out.left : out.right) = std::move(loc);
    }
    return out;
}

LocalizationResult Localizer::run(const GrayImage& frame,
                                  const std::optional<std::pair<Rect, Rect>>& provided,
                                  const PipelineConfig& cfg) const {
    return localize(prepare(frame, provided, cfg), cfg);
}

Rect szp_roi(const GrayImage& region_gray) {
    const int w = region_gray.width;
    const int h = region_gray.height;

    std::vector<std::uint64_t> col_sum(std::size_t(w), 0);
    std::vector<std::uint64_t> row_sum(std::size_t(h), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint64_t v = region_gray.at(x, y);
            col_sum[std::size_t(x)] += v;
            row_sum[std::size_t(y)] += v;
        }
    }
    int min_col = int(std::min_element(col_sum.begin(), col_sum.end()) - col_sum.begin());
    int min_row = int(std::min_element(row_sum.begin(), row_sum.end()) - row_sum.begin());

    int side = std::clamp(round_half_away(0.4 * w), 1, std::min(w, h));
    int x = std::clamp(min_col - side / 2, 0, w - side);
    int y = std::clamp(min_row - side / 2, 0, h - side);
    return {x, y, side, side};
}

} // namespace cecl::pipeline
