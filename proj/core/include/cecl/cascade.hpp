#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cecl/image.hpp"
#include "cecl/types.hpp"

namespace cecl::cascade {

// 2-3 weighted rectangles in base-window coordinates.
struct FeatureRect {
    Rect rect;
    double weight = 0.0;
};

struct HaarFeature {
    std::vector<FeatureRect> rects;
};

// Single-node tree: branch on (feature < threshold * sigma * area).
struct Stump {
    HaarFeature feature;
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;
};

struct Stage {
    std::vector<Stump> stumps;
    double stage_threshold = 0.0;
};

struct CascadeModel {
    std::string name;
    int window_w = 0;
    int window_h = 0;
    std::vector<Stage> stages;
};

struct DetectParams {
    double scale_factor = 1.1;
    double step = 2.0; // pixels at base scale, scaled proportionally
    int min_neighbors = 3;
    std::optional<int> min_size; // bounds on scaled window width
    std::optional<int> max_size;
};

// Parses the legacy stump-cascade serialization (opencv-haar-classifier
// markup). Preserves stage order, stump order and all numeric content.
// Throws ParseError with an element path on missing window size, trees with
// more than one node, tilted features or rects outside the base window.
CascadeModel parse_cascade(const std::string& text);
CascadeModel load_cascade_file(const std::string& path);

// Emits the same markup parse_cascade reads; parse(serialize(m)) reproduces
// every number of m.
std::string serialize_cascade(const CascadeModel& model);

// Variance-normalized window evaluation: each stump compares
//   sum_i weight_i * rect_sum_i  <  threshold * sigma_w * window_area
// with rects scaled by `scale` (each field rounded to nearest, then clipped
// to the window). sigma_w comes from the integral images; zero-variance
// windows use sigma_w = 1. Passes iff every stage's stump-value sum reaches
// the stage threshold. Throws BoundsError when the window leaves the image.
bool evaluate_window(const CascadeModel& model, const IntegralImage& ii, const Rect& window,
                     double scale);

// Scans scales window * scale_factor^k, stride round(step * scale) (min 1),
// groups raw hits and returns them sorted by area descending, ties by
// (y, x). Images smaller than the base window yield an empty list.
std::vector<Rect> detect_multiscale(const GrayImage& image, const CascadeModel& model,
                                    const DetectParams& params);

// Partitions hits into similarity classes (transitive closure of: each
// side-length and offset differs by at most eps * mean side). Classes with
// more than min_neighbors members emit their member-average rect, rounded
// and clamped into the class bounding box.
std::vector<Rect> group_rects(const std::vector<Rect>& hits, int min_neighbors,
                              double eps = 0.2);

} // namespace cecl::cascade
