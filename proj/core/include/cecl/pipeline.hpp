#pragma once

#include <array>
#include <optional>
#include <utility>

#include "cecl/cascade.hpp"
#include "cecl/hough.hpp"
#include "cecl/image.hpp"
#include "cecl/types.hpp"

namespace cecl::pipeline {

enum class RegionSource { cascade, fallback_rescan, anthropometric_default, provided };
enum class Side { left, right };
enum class Method { hough_min_intensity, region_center_fallback };

const char* to_string(RegionSource s);
const char* to_string(Method m);

struct PipelineConfig {
    int smooth_kernel_size = 5;
    double smooth_sigma_frac = 0.05; // of frame width
    double face_keep_frac = 0.60;    // top fraction of the face kept
    double t_e = 0.30;               // top fraction of the eye region cropped
    int t_b = 77;                    // binarization threshold, tuned by eval
    hough::HoughParams hough;
    cascade::DetectParams face_detect;
    cascade::DetectParams eye_detect;
};

// Eye region in full-frame coordinates. side is assigned by center x after
// both regions exist (smaller x = left).
struct EyeRegion {
    Rect rect;
    Side side = Side::left;
    RegionSource source = RegionSource::provided;
};

struct EyeLocalization {
    Point center; // full-frame pixel coordinates
    Method method = Method::region_center_fallback;
    std::optional<Circle> circle; // region-local coordinates
    EyeRegion region;
};

struct LocalizationResult {
    EyeLocalization left;
    EyeLocalization right;
    Rect face;
    bool face_from_cascade = false;
};

struct FaceDetection {
    Rect rect;
    bool from_cascade = false;
};

// Largest grouped detection; a frame with no detections degrades to the full
// frame, flagged.
FaceDetection detect_face(const GrayImage& frame, const cascade::CascadeModel& face_model,
                          const cascade::DetectParams& params);

// Keeps the top keep_frac of the face and splits it into left/right halves
// at the vertical midline.
std::pair<Rect, Rect> split_face(const Rect& face, double keep_frac);

// Eye region per half: cascade scan, then a rescan with min_neighbors 0 and
// scale factor 1.05 (hit nearest the half center), then the anthropometric
// default box (0.9 x half width, 0.5 x half height, horizontally centered,
// vertical center at 45% of the cropped-face height).
std::array<EyeRegion, 2> eye_regions(const GrayImage& frame, const Rect& face,
                                     const cascade::CascadeModel& eye_model,
                                     const PipelineConfig& cfg);

// Structuring element side for a given eye-region width:
// max(3, nearest odd integer to 0.05 * width).
int se_side_for(int region_width);

struct Preprocessed {
    BinaryImage binary;
    GrayImage equalized;
    int crop_offset_y = 0;
    bool degenerate = false; // region too small for the T_e crop; uncropped path
};

// Crop the top t_e fraction, equalize, binarize at t_b, close the dark set.
// Regions shorter than 4 rows after the crop take the uncropped path.
Preprocessed preprocess(const GrayImage& region_gray, const PipelineConfig& cfg);

struct CenterEstimate {
    Point center; // local to the processed raster
    Method method = Method::region_center_fallback;
    std::optional<Circle> circle;
};

// Hough circle plus min-intensity refinement: the center is the rounded
// centroid of the darkest equalized pixels strictly inside the circle,
// snapped to the nearest such pixel when the centroid leaves the circle.
// Without a circle the region center (w/2, h/2) is used.
CenterEstimate localize_center(const BinaryImage& binary, const GrayImage& equalized,
                               const PipelineConfig& cfg);

// Everything about a frame that does not depend on t_b, so threshold tuning
// can rebinarize without repeating smoothing, detection and equalization.
struct PreparedEye {
    EyeRegion region;
    GrayImage equalized;
    int crop_offset_y = 0;
    bool degenerate = false;
};

struct PreparedFrame {
    std::array<PreparedEye, 2> eyes; // [0] = left, [1] = right
    Rect face;
    bool face_from_cascade = false;
};

// Front end over the full pipeline. Holds the optional cascade models;
// frames with provided regions skip detection entirely.
class Localizer {
public:
    Localizer() = default;
    Localizer(cascade::CascadeModel face_model, cascade::CascadeModel eye_model);

    bool has_models() const { return models_.has_value(); }

    // Smooths the frame, acquires regions (cascade path unless `provided`
    // is given), crops and equalizes per eye. Throws ConfigError when the
    // cascade path is requested without models or a provided rect leaves
    // the frame.
    PreparedFrame prepare(const GrayImage& frame,
                          const std::optional<std::pair<Rect, Rect>>& provided,
                          const PipelineConfig& cfg) const;

    // Binarize, close, Hough, min-intensity; centers are mapped back to
    // full-frame coordinates.
    LocalizationResult localize(const PreparedFrame& prepared, const PipelineConfig& cfg) const;

    LocalizationResult run(const GrayImage& frame,
                           const std::optional<std::pair<Rect, Rect>>& provided,
                           const PipelineConfig& cfg) const;

private:
    struct Models {
        cascade::CascadeModel face;
        cascade::CascadeModel eye;
    };
    std::optional<Models> models_;
};

// SZP first stage: square ROI of side 0.4 * width centered on the minima of
// the row and column intensity profiles (ties to the smaller index), clamped
// to the region.
Rect szp_roi(const GrayImage& region_gray);

} // namespace cecl::pipeline
