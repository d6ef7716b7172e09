#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cecl/config.hpp"
#include "cecl/errors.hpp"
#include "cecl/eval.hpp"
#include "cecl/pgm.hpp"
#include "cecl/pipeline.hpp"
#include "cecl/synth.hpp"

namespace fs = std::filesystem;
using namespace cecl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2; // bad arguments or configuration
constexpr int kExitInput = 3; // unreadable or invalid input files

// Options shared by the commands that run the pipeline.
struct PipelineOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string face_model;
    std::string eye_model;
    std::string regions;
    std::optional<int> t_b;
    std::optional<double> t_e;
    std::optional<double> r_min_frac;
    std::optional<double> r_max_frac;
    std::optional<double> min_completeness;
};

void add_pipeline_opts(CLI::App* cmd, PipelineOpts& o, bool with_models) {
    cmd->add_option("--config", o.config_path, "key = value config file");
    cmd->add_option("--set", o.sets, "override a config key, e.g. --set t_b=90")
        ->type_name("KEY=VALUE");
    cmd->add_option("--t-b", o.t_b, "binarization threshold (0-255)");
    cmd->add_option("--t-e", o.t_e, "top fraction of the eye region cropped");
    cmd->add_option("--r-min-frac", o.r_min_frac, "min Hough radius as a fraction of region width");
    cmd->add_option("--r-max-frac", o.r_max_frac, "max Hough radius as a fraction of region width");
    cmd->add_option("--min-completeness", o.min_completeness,
                    "perimeter completeness a circle must reach");
    if (with_models) {
        cmd->add_option("--face-model", o.face_model, "face cascade file");
        cmd->add_option("--eye-model", o.eye_model, "eye cascade file");
        cmd->add_option("--regions", o.regions, "provided-regions file (skips detection)");
    }
}

// Flags > config file > defaults.
pipeline::PipelineConfig build_config(const PipelineOpts& o) {
    pipeline::PipelineConfig cfg;
    if (!o.config_path.empty()) cfg = config::load_file(o.config_path);
    for (const std::string& kv : o.sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParamError("--set expects KEY=VALUE, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        config::apply_key(cfg, key, value);
    }
    if (o.t_b) cfg.t_b = *o.t_b;
    if (o.t_e) cfg.t_e = *o.t_e;
    if (o.r_min_frac) cfg.hough.r_min_frac = *o.r_min_frac;
    if (o.r_max_frac) cfg.hough.r_max_frac = *o.r_max_frac;
    if (o.min_completeness) cfg.hough.min_completeness = *o.min_completeness;
    config::validate(cfg);
    return cfg;
}

// Exactly one of cascade models or a regions file.
void check_source(const PipelineOpts& o) {
    bool models = !o.face_model.empty() || !o.eye_model.empty();
    bool regions = !o.regions.empty();
    if (models && (o.face_model.empty() || o.eye_model.empty()))
        throw ParamError("need both --face-model and --eye-model");
    if (models == regions)
        throw ParamError("need either --face-model/--eye-model or --regions");
}

pipeline::Localizer make_localizer(const PipelineOpts& o) {
    if (o.face_model.empty()) return {};
    return {cascade::load_cascade_file(o.face_model), cascade::load_cascade_file(o.eye_model)};
}

// Looks an image up in a provided-regions file; a single-entry file matches
// any image.
std::pair<Rect, Rect> regions_for_image(const std::string& regions_path,
                                        const std::string& image_path) {
    std::ifstream in(regions_path);
    if (!in) throw IoError("cannot open regions file " + regions_path);
    std::string want = fs::path(image_path).filename().string();

    std::optional<std::pair<Rect, Rect>> only;
    int entries = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string name;
        long v[8];
        fields >> name;
        bool ok = bool(fields);
        for (int i = 0; ok && i < 8; ++i) ok = bool(fields >> v[i]);
        if (!ok)
            throw ParseError(regions_path + " line " + std::to_string(line_no) +
                             ": expected 'name x y w h x y w h'");
        std::pair<Rect, Rect> r{Rect{int(v[0]), int(v[1]), int(v[2]), int(v[3])},
                                Rect{int(v[4]), int(v[5]), int(v[6]), int(v[7])}};
        ++entries;
        only = r;
        if (name == want) return r;
    }
    if (entries == 1) return *only;
    throw ConfigError(regions_path + ": no entry for " + want);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// ---- detect ----------------------------------------------------------------

struct DetectOpts {
    PipelineOpts common;
    std::string image;
    std::string annotate_path;
    std::string csv_path;
};

int run_detect(const DetectOpts& o, const pipeline::PipelineConfig& cfg,
               const pipeline::Localizer& localizer) {
    std::optional<std::pair<Rect, Rect>> provided;
    if (!o.common.regions.empty()) provided = regions_for_image(o.common.regions, o.image);
    GrayImage frame = load_pgm_file(o.image);

    pipeline::LocalizationResult res = localizer.run(frame, provided, cfg);
    std::printf("%d %d %d %d %s %s\n", res.left.center.x, res.left.center.y, res.right.center.x,
                res.right.center.y, pipeline::to_string(res.left.method),
                pipeline::to_string(res.right.method));

    if (!o.annotate_path.empty()) {
        std::vector<Circle> circles;
        for (const pipeline::EyeLocalization* e : {&res.left, &res.right}) {
            if (e->circle) {
                Circle c = *e->circle;
                c.cx += e->region.rect.x;
                c.cy += e->region.rect.y;
                circles.push_back(c);
            }
        }
        GrayImage out = annotate(frame, circles, {res.left.center, res.right.center});
        save_pgm_file(out, o.annotate_path);
    }

    if (!o.csv_path.empty()) {
        fs::path eye_path = fs::path(o.image);
        eye_path.replace_extension(".eye");
        std::string row = fs::path(o.image).filename().string() + "," +
                          std::to_string(res.left.center.x) + "," +
                          std::to_string(res.left.center.y) + "," +
                          std::to_string(res.right.center.x) + "," +
                          std::to_string(res.right.center.y) + ",";
        if (fs::exists(eye_path)) {
            eval::GroundTruth gt = eval::load_eye_file(eye_path.string());
            eval::ErrorTriple e = eval::normalized_errors(res.left.center, res.right.center, gt);
            row += fmt6(e.d_left) + "," + fmt6(e.d_right) + "," + fmt6(e.e_worst) + "," +
                   fmt6(e.e_best) + "," + fmt6(e.e_average);
        } else {
            row += ",,,,"; // no ground truth next to the image
        }
        row += std::string(",") + pipeline::to_string(res.left.method) + "," +
               pipeline::to_string(res.right.method) + "\n";
        write_text_file(o.csv_path,
                        "filename,lx,ly,rx,ry,d_l,d_r,e_worst,e_best,e_avg,method_l,method_r\n" +
                            row);
    }
    return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateOpts {
    PipelineOpts common;
    std::string dataset;
    std::uint32_t seed = 1;
    std::string grid_spec;
    std::string report_path;
    std::string report_csv_path;
    std::string csv_path;
};

int run_evaluate(const EvaluateOpts& o, const pipeline::PipelineConfig& cfg,
                 const pipeline::Localizer& localizer, const std::vector<int>& grid) {
    std::optional<std::string> manifest;
    if (!o.common.regions.empty()) manifest = o.common.regions;
    eval::DatasetIndex ds = eval::load_dataset(o.dataset, manifest);
    if (ds.entries.empty()) throw IoError("dataset " + o.dataset + " has no .pgm/.eye pairs");

    std::vector<eval::LoadedCase> cases = eval::prepare_dataset(ds, localizer, cfg);
    eval::CrossValidation cv = eval::cross_validate(cases, localizer, cfg, 5, o.seed, grid);

    std::string grid_str;
    for (int g : grid) grid_str += (grid_str.empty() ? "" : " ") + std::to_string(g);
    cv.report.config_snapshot = config::to_string(cfg) + "seed = " + std::to_string(o.seed) +
                                "\ngrid = " + grid_str + "\ndataset = " + o.dataset + "\n";

    for (std::size_t i = 0; i < cv.report.thresholds.size(); ++i)
        std::printf("%.2f %s\n", cv.report.thresholds[i], fmt6(cv.report.fractions[i]).c_str());

    if (!o.report_path.empty())
        write_text_file(o.report_path, eval::report_table(cv.report, cv.fold_thresholds));
    if (!o.report_csv_path.empty()) write_text_file(o.report_csv_path, eval::report_csv(cv.report));
    if (!o.csv_path.empty()) write_text_file(o.csv_path, eval::results_csv(cv.per_image));
    return kExitOk;
}

// ---- tune -------------------------------------------------------------------

struct TuneOpts {
    PipelineOpts common;
    std::string dataset;
    std::string grid_spec;
    std::string out_path;
};

int run_tune(const TuneOpts& o, const pipeline::PipelineConfig& cfg,
             const pipeline::Localizer& localizer, const std::vector<int>& grid) {
    std::optional<std::string> manifest;
    if (!o.common.regions.empty()) manifest = o.common.regions;
    eval::DatasetIndex ds = eval::load_dataset(o.dataset, manifest);
    if (ds.entries.empty()) throw IoError("dataset " + o.dataset + " has no .pgm/.eye pairs");

    std::vector<eval::LoadedCase> cases = eval::prepare_dataset(ds, localizer, cfg);
    int tb = eval::tune_threshold(cases, localizer, cfg, grid);

    pipeline::PipelineConfig tuned = cfg;
    tuned.t_b = tb;
    std::vector<eval::PerImageResult> results = eval::evaluate_cases(cases, localizer, tuned);
    long hit = 0;
    for (const eval::PerImageResult& r : results) hit += r.errors.e_worst <= 0.05;
    double accuracy = double(hit) / double(results.size());

    std::printf("t_b = %d\naccuracy_at_0.05 = %s\n", tb, fmt6(accuracy).c_str());
    if (!o.out_path.empty()) write_text_file(o.out_path, "t_b = " + std::to_string(tb) + "\n");
    return kExitOk;
}

// ---- synth ------------------------------------------------------------------

struct SynthOpts {
    std::string out_dir;
    int count = 20;
    std::uint32_t seed = 1;
    double noise = 0.02;
    double occlusion = 0.25;
};

void check_synth_args(const SynthOpts& o) {
    if (o.count < 0) throw ParamError("--count must be >= 0");
    if (o.noise < 0.0 || o.noise > 0.05) throw ParamError("--noise must be in [0, 0.05]");
    if (o.occlusion < 0.0 || o.occlusion > 0.25)
        throw ParamError("--occlusion must be in [0, 0.25]");
}

int run_synth(const SynthOpts& o) {
    synth::FrameParams params;
    params.noise = o.noise;
    params.occlusion = o.occlusion;
    std::vector<synth::CorpusFile> files = synth::write_corpus(o.out_dir, o.count, o.seed, params);
    std::printf("wrote %zu frames + regions.txt to %s\n", files.size(), o.out_dir.c_str());
    return kExitOk;
}

// ---- szp --------------------------------------------------------------------

struct SzpOpts {
    std::string image;
    std::string regions;
    std::string annotate_path;
};

int run_szp(const SzpOpts& o) {
    std::pair<Rect, Rect> provided = regions_for_image(o.regions, o.image);
    GrayImage frame = load_pgm_file(o.image);
    if (!frame.bounds().contains(provided.first) || !frame.bounds().contains(provided.second))
        throw ConfigError("szp: provided region outside frame");

    std::vector<Point> centers;
    const char* names[2] = {"left", "right"};
    const Rect* rects[2] = {&provided.first, &provided.second};
    for (int i = 0; i < 2; ++i) {
        GrayImage region = crop(frame, *rects[i]);
        Rect roi = pipeline::szp_roi(region);
        std::printf("%s %d %d %d %d\n", names[i], rects[i]->x + roi.x, rects[i]->y + roi.y, roi.w,
                    roi.h);
        centers.push_back({rects[i]->x + roi.x + roi.w / 2, rects[i]->y + roi.y + roi.h / 2});
    }
    if (!o.annotate_path.empty()) save_pgm_file(annotate(frame, {}, centers), o.annotate_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CECL eye center localization"};
    app.require_subcommand(1);

    DetectOpts detect_opts;
    CLI::App* detect = app.add_subcommand("detect", "localize both eye centers in one image");
    detect->add_option("image", detect_opts.image, "input PGM")->required();
    add_pipeline_opts(detect, detect_opts.common, true);
    detect->add_option("--annotate", detect_opts.annotate_path, "write annotated PGM");
    detect->add_option("--csv", detect_opts.csv_path, "write a one-row results CSV");

    EvaluateOpts eval_opts;
    CLI::App* evaluate = app.add_subcommand("evaluate", "5-fold cross-validated accuracy report");
    evaluate->add_option("dataset", eval_opts.dataset, "directory of NAME.pgm + NAME.eye pairs")
        ->required();
    add_pipeline_opts(evaluate, eval_opts.common, true);
    evaluate->add_option("--seed", eval_opts.seed, "fold-split seed");
    evaluate->add_option("--grid", eval_opts.grid_spec, "t_b grid, e.g. 60:10:100");
    evaluate->add_option("--report", eval_opts.report_path, "write the accuracy table");
    evaluate->add_option("--report-csv", eval_opts.report_csv_path,
                         "write threshold,fraction CSV");
    evaluate->add_option("--csv", eval_opts.csv_path, "write the per-image CSV");

    TuneOpts tune_opts;
    CLI::App* tune = app.add_subcommand("tune", "grid-search t_b on a dataset");
    tune->add_option("dataset", tune_opts.dataset, "directory of NAME.pgm + NAME.eye pairs")
        ->required();
    add_pipeline_opts(tune, tune_opts.common, true);
    tune->add_option("--grid", tune_opts.grid_spec, "t_b grid, e.g. 60:10:100");
    tune->add_option("--out", tune_opts.out_path, "write a config fragment with the tuned t_b");

    SynthOpts synth_opts;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic eye corpus");
    synth_cmd->add_option("dir", synth_opts.out_dir, "output directory")->required();
    synth_cmd->add_option("--count", synth_opts.count, "number of frames");
    synth_cmd->add_option("--seed", synth_opts.seed, "generator seed");
    synth_cmd->add_option("--noise", synth_opts.noise, "max salt-and-pepper fraction");
    synth_cmd->add_option("--occlusion", synth_opts.occlusion, "max eyelid boundary occlusion");

    SzpOpts szp_opts;
    CLI::App* szp = app.add_subcommand("szp", "projection-histogram ROI baseline");
    szp->add_option("image", szp_opts.image, "input PGM")->required();
    szp->add_option("--regions", szp_opts.regions, "provided-regions file")->required();
    szp->add_option("--annotate", szp_opts.annotate_path, "write annotated PGM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    // argument/config phase: failures are usage errors
    pipeline::PipelineConfig cfg;
    pipeline::Localizer localizer;
    std::vector<int> grid = eval::default_grid();
    try {
        if (detect->parsed() || evaluate->parsed() || tune->parsed()) {
            const PipelineOpts& common = detect->parsed() ? detect_opts.common
                                         : evaluate->parsed() ? eval_opts.common
                                                              : tune_opts.common;
            check_source(common);
            cfg = build_config(common);
            const std::string& grid_spec =
                evaluate->parsed() ? eval_opts.grid_spec : tune_opts.grid_spec;
            if ((evaluate->parsed() || tune->parsed()) && !grid_spec.empty())
                grid = config::parse_grid(grid_spec);
        }
        if (synth_cmd->parsed()) check_synth_args(synth_opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }

    // execution phase: failures are input errors
    try {
        if (synth_cmd->parsed()) return run_synth(synth_opts);
        if (detect->parsed() || evaluate->parsed() || tune->parsed()) {
            const PipelineOpts& common = detect->parsed() ? detect_opts.common
                                         : evaluate->parsed() ? eval_opts.common
                                                              : tune_opts.common;
            localizer = make_localizer(common);
        }
        if (detect->parsed()) return run_detect(detect_opts, cfg, localizer);
        if (evaluate->parsed()) return run_evaluate(eval_opts, cfg, localizer, grid);
        if (tune->parsed()) return run_tune(tune_opts, cfg, localizer, grid);
        if (szp->parsed()) return run_szp(szp_opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitUsage;
}
