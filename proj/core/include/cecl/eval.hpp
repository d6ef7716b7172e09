#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cecl/pipeline.hpp"
#include "cecl/types.hpp"

namespace cecl::eval {

// True eye centers, left/right by x after normalization.
struct GroundTruth {
    Point left;
    Point right;
};

// BioID .eye sidecar: '#' header line(s), then four whitespace-separated
// integers read in file order and normalized so the smaller-x point is the
// left eye. Throws ParseError with a line number.
GroundTruth parse_eye_file(const std::string& text);
GroundTruth load_eye_file(const std::string& path);

struct ErrorTriple {
    double e_worst = 0.0;
    double e_best = 0.0;
    double e_average = 0.0;
    double d_left = 0.0; // pixel distances kept for audit
    double d_right = 0.0;
};

// e_worst = max(d_l, d_r) / |C_l - C_r|, e_best = min(...) / |.|,
// e_average = (d_l + d_r) / (2 |.|). Predictions must already be paired by
// the smaller-x-is-left convention.
ErrorTriple normalized_errors(Point pred_left, Point pred_right, const GroundTruth& gt);

inline constexpr std::array<double, 5> kStandardThresholds{0.05, 0.10, 0.15, 0.20, 0.25};

struct AccuracyReport {
    std::vector<double> thresholds;
    std::vector<double> fractions; // |{e_worst <= t}| / n, inclusive
    int n_images = 0;
    std::string config_snapshot; // echoed into report headers
};

// Throws ParamError on an empty error list.
AccuracyReport accuracy_at(const std::vector<ErrorTriple>& errors,
                           const std::vector<double>& thresholds);

struct FoldSplit {
    int k = 5;
    std::uint32_t seed = 0;
    std::vector<int> assignment; // image index -> fold id
};

// Seeded Fisher-Yates shuffle, then round-robin assignment; fold sizes
// differ by at most one. Throws ParamError when n < k.
FoldSplit kfold_split(int n, int k, std::uint32_t seed);

struct DatasetEntry {
    std::string name; // filename, the sort key
    std::string image_path;
    std::string eye_path;
    std::optional<std::pair<Rect, Rect>> regions;
};

struct DatasetIndex {
    std::vector<DatasetEntry> entries; // sorted by name
};

// Scans a BioID-layout directory (NAME.pgm + NAME.eye pairs). A manifest of
// provided regions ("name x y w h x y w h" lines, '#' comments) attaches
// boxes; every image must then be listed.
DatasetIndex load_dataset(const std::string& dir,
                          const std::optional<std::string>& manifest_path = std::nullopt);

// A dataset case with the t_b-independent pipeline work done once.
struct LoadedCase {
    std::string name;
    GroundTruth gt;
    pipeline::PreparedFrame prepared;
};

struct PerImageResult {
    std::string name;
    Point pred_left;
    Point pred_right;
    ErrorTriple errors;
    pipeline::Method method_left = pipeline::Method::region_center_fallback;
    pipeline::Method method_right = pipeline::Method::region_center_fallback;
};

std::vector<LoadedCase> prepare_dataset(const DatasetIndex& ds,
                                        const pipeline::Localizer& localizer,
                                        const pipeline::PipelineConfig& cfg);

// Localizes every case at cfg.t_b and scores against ground truth.
std::vector<PerImageResult> evaluate_cases(const std::vector<LoadedCase>& cases,
                                           const pipeline::Localizer& localizer,
                                           const pipeline::PipelineConfig& cfg);

// Multiples of 13 (~0.05 * 255) up to 242: {13, 26, ..., 234}.
std::vector<int> default_grid();

// Runs the pipeline on the train cases for every grid value and picks the
// t_b maximizing accuracy at e <= 0.05; ties fall to accuracy at e <= 0.10,
// then to the smaller t_b.
int tune_threshold(const std::vector<LoadedCase>& train, const pipeline::Localizer& localizer,
                   pipeline::PipelineConfig cfg, const std::vector<int>& grid);

struct CrossValidation {
    AccuracyReport report; // pooled held-out errors
    std::vector<int> fold_thresholds;
    std::vector<PerImageResult> per_image; // dataset order
    FoldSplit split;
};

// Per fold: tune t_b on the other folds, evaluate held out; pool.
CrossValidation cross_validate(const std::vector<LoadedCase>& cases,
                               const pipeline::Localizer& localizer,
                               const pipeline::PipelineConfig& cfg, int k, std::uint32_t seed,
                               const std::vector<int>& grid);

// "filename,lx,ly,rx,ry,d_l,d_r,e_worst,e_best,e_avg,method_l,method_r",
// reals with 6 decimals.
std::string results_csv(const std::vector<PerImageResult>& results);

// Aligned text table with the config snapshot echoed as '#' header lines.
std::string report_table(const AccuracyReport& report, const std::vector<int>& fold_thresholds);

// Machine-readable "threshold,fraction" rows.
std::string report_csv(const AccuracyReport& report);

} // namespace cecl::eval
