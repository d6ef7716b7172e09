#include "cecl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cecl/errors.hpp"
#include "cecl/pgm.hpp"
#include "cecl/rng.hpp"

namespace cecl::eval {

namespace fs = std::filesystem;

GroundTruth parse_eye_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::vector<std::string> toks;
        std::string tok;
        while (fields >> tok) toks.push_back(tok);
        if (toks.size() != 4)
            throw ParseError("eye file line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(toks.size()));
        long v[4];
        for (int i = 0; i < 4; ++i) {
            std::size_t used = 0;
            try {
                v[i] = std::stol(toks[std::size_t(i)], &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (used != toks[std::size_t(i)].size())
                throw ParseError("eye file line " + std::to_string(line_no) +
                                 ": not an integer: '" + toks[std::size_t(i)] + "'");
        }
        Point a{int(v[0]), int(v[1])};
        Point b{int(v[2]), int(v[3])};
        if (a == b)
            throw ParseError("eye file line " + std::to_string(line_no) +
                             ": identical eye centers");
        if (a.x == b.x)
            throw ParseError("eye file line " + std::to_string(line_no) +
                             ": eye centers share an x coordinate, cannot order left/right");
        if (a.x > b.x) std::swap(a, b);
        return {a, b};
    }
    throw ParseError("eye file: no data line found");
}

GroundTruth load_eye_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_eye_file(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

ErrorTriple normalized_errors(Point pred_left, Point pred_right, const GroundTruth& gt) {
    ErrorTriple e;
    e.d_left = distance(pred_left, gt.left);
    e.d_right = distance(pred_right, gt.right);
    double inter_ocular = distance(gt.left, gt.right);
    e.e_worst = std::max(e.d_left, e.d_right) / inter_ocular;
    e.e_best = std::min(e.d_left, e.d_right) / inter_ocular;
    e.e_average = (e.d_left + e.d_right) / (2.0 * inter_ocular);
    return e;
}

AccuracyReport accuracy_at(const std::vector<ErrorTriple>& errors,
                           const std::vector<double>& thresholds) {
    if (errors.empty()) throw ParamError("accuracy_at: empty error list");
    AccuracyReport rep;
    rep.thresholds = thresholds;
    rep.n_images = int(errors.size());
    for (double t : thresholds) {
        std::size_t hit = 0;
        for (const ErrorTriple& e : errors)
            if (e.e_worst <= t) ++hit;
        rep.fractions.push_back(double(hit) / double(errors.size()));
    }
    return rep;
}

FoldSplit kfold_split(int n, int k, std::uint32_t seed) {
    if (k < 1) throw ParamError("kfold: k must be >= 1");
    if (n < k)
        throw ParamError("kfold: need at least k=" + std::to_string(k) + " items, got " +
                         std::to_string(n));
    std::vector<int> order(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;

    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        int j = int(rng.next() % std::uint32_t(i + 1));
        std::swap(order[std::size_t(i)], order[std::size_t(j)]);
    }

    FoldSplit split;
    split.k = k;
    split.seed = seed;
    split.assignment.assign(std::size_t(n), 0);
    for (int pos = 0; pos < n; ++pos) split.assignment[std::size_t(order[std::size_t(pos)])] = pos % k;
    return split;
}

DatasetIndex load_dataset(const std::string& dir, const std::optional<std::string>& manifest_path) {
    if (!fs::is_directory(dir)) throw IoError("dataset: not a directory: " + dir);

    DatasetIndex ds;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        fs::path p = entry.path();
        if (p.extension() != ".pgm") continue;
        fs::path eye = p;
        eye.replace_extension(".eye");
        if (!fs::exists(eye))
            throw IoError("dataset: missing ground truth " + eye.string() + " for " + p.string());
        ds.entries.push_back({p.filename().string(), p.string(), eye.string(), std::nullopt});
    }
    std::sort(ds.entries.begin(), ds.entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) { return a.name < b.name; });

    if (manifest_path) {
        std::ifstream in(*manifest_path);
        if (!in) throw IoError("cannot open regions manifest " + *manifest_path);
        std::map<std::string, std::pair<Rect, Rect>> regions;
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
                throw ParseError(*manifest_path + " line " + std::to_string(line_no) +
                                 ": expected 'name x y w h x y w h'");
            regions[name] = {Rect{int(v[0]), int(v[1]), int(v[2]), int(v[3])},
                             Rect{int(v[4]), int(v[5]), int(v[6]), int(v[7])}};
        }
        for (DatasetEntry& e : ds.entries) {
            auto it = regions.find(e.name);
            if (it == regions.end())
                throw ConfigError("regions manifest " + *manifest_path + " has no entry for " +
                                  e.name);
            e.regions = it->second;
        }
    }
    return ds;
}

std::vector<LoadedCase> prepare_dataset(const DatasetIndex& ds,
                                        const pipeline::Localizer& localizer,
                                        const pipeline::PipelineConfig& cfg) {
    std::vector<LoadedCase> cases;
    cases.reserve(ds.entries.size());
    for (const DatasetEntry& entry : ds.entries) {
        LoadedCase c;
        c.name = entry.name;
        c.gt = load_eye_file(entry.eye_path);
        GrayImage frame = load_pgm_file(entry.image_path);
        c.prepared = localizer.prepare(frame, entry.regions, cfg);
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<PerImageResult> evaluate_cases(const std::vector<LoadedCase>& cases,
                                           const pipeline::Localizer& localizer,
                                           const pipeline::PipelineConfig& cfg) {
    std::vector<PerImageResult> out;
    out.reserve(cases.size());
    for (const LoadedCase& c : cases) {
        pipeline::LocalizationResult loc = localizer.localize(c.prepared, cfg);
        PerImageResult r;
        r.name = c.name;
        r.pred_left = loc.left.center;
        r.pred_right = loc.right.center;
        r.method_left = loc.left.method;
        r.method_right = loc.right.method;
        r.errors = normalized_errors(r.pred_left, r.pred_right, c.gt);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<int> default_grid() {
    std::vector<int> grid;
    for (int v = 13; v <= 242; v += 13) grid.push_back(v);
    return grid;
}

int tune_threshold(const std::vector<LoadedCase>& train, const pipeline::Localizer& localizer,
                   pipeline::PipelineConfig cfg, const std::vector<int>& grid) {
    if (train.empty()) throw ParamError("tune: empty training set");
    if (grid.empty()) throw ParamError("tune: empty grid");

    int best_tb = grid.front();
    long best_a05 = -1;
    long best_a10 = -1;
    for (int tb : grid) {
        cfg.t_b = tb;
        std::vector<PerImageResult> results = evaluate_cases(train, localizer, cfg);
        long a05 = 0, a10 = 0;
        for (const PerImageResult& r : results) {
            if (r.errors.e_worst <= 0.05) ++a05;
            if (r.errors.e_worst <= 0.10) ++a10;
        }
        // grid is scanned in order, strict improvement keeps the smaller t_b
        if (a05 > best_a05 || (a05 == best_a05 && a10 > best_a10)) {
            best_a05 = a05;
            best_a10 = a10;
            best_tb = tb;
        }
    }
    return best_tb;
}

CrossValidation cross_validate(const std::vector<LoadedCase>& cases,
                               const pipeline::Localizer& localizer,
                               const pipeline::PipelineConfig& cfg, int k, std::uint32_t seed,
                               const std::vector<int>& grid) {
    CrossValidation cv;
    cv.split = kfold_split(int(cases.size()), k, seed);
    cv.per_image.resize(cases.size());

    for (int fold = 0; fold < k; ++fold) {
        std::vector<LoadedCase> train;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            if (cv.split.assignment[i] == fold)
                held.push_back(i);
            else
                train.push_back(cases[i]);
        }
        int tb = tune_threshold(train, localizer, cfg, grid);
        cv.fold_thresholds.push_back(tb);

        pipeline::PipelineConfig fold_cfg = cfg;
        fold_cfg.t_b = tb;
        std::vector<LoadedCase> held_cases;
        for (std::size_t i : held) held_cases.push_back(cases[i]);
        std::vector<PerImageResult> results = evaluate_cases(held_cases, localizer, fold_cfg);
        for (std::size_t j = 0; j < held.size(); ++j) cv.per_image[held[j]] = results[j];
    }

    std::vector<ErrorTriple> pooled;
    pooled.reserve(cases.size());
    for (const PerImageResult& r : cv.per_image) pooled.push_back(r.errors);
    cv.report = accuracy_at(pooled, {kStandardThresholds.begin(), kStandardThresholds.end()});
    return cv;
}

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::string results_csv(const std::vector<PerImageResult>& results) {
    std::string out = "filename,lx,ly,rx,ry,d_l,d_r,e_worst,e_best,e_avg,method_l,method_r\n";
    for (const PerImageResult& r : results) {
        out += r.name + "," + std::to_string(r.pred_left.x) + "," + std::to_string(r.pred_left.y) +
               "," + std::to_string(r.pred_right.x) + "," + std::to_string(r.pred_right.y) + "," +
               fmt6(r.errors.d_left) + "," + fmt6(r.errors.d_right) + "," +
               fmt6(r.errors.e_worst) + "," + fmt6(r.errors.e_best) + "," +
               fmt6(r.errors.e_average) + "," + pipeline::to_string(r.method_left) + "," +
               pipeline::to_string(r.method_right) + "\n";
    }
    return out;
}

std::string report_table(const AccuracyReport& report, const std::vector<int>& fold_thresholds) {
    std::string out;
    std::istringstream cfg(report.config_snapshot);
    std::string line;
    while (std::getline(cfg, line)) out += "# " + line + "\n";
    out += "# n_images = " + std::to_string(report.n_images) + "\n";
    if (!fold_thresholds.empty()) {
        out += "# fold_t_b =";
        for (int tb : fold_thresholds) out += " " + std::to_string(tb);
        out += "\n";
    }
    out += " threshold   accuracy\n";
    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%10.2f %10.6f\n", report.thresholds[i],
                      report.fractions[i]);
        out += buf;
    }
    return out;
}

std::string report_csv(const AccuracyReport& report) {
    std::string out = "threshold,fraction\n";
    for (std::size_t i = 0; i < report.thresholds.size(); ++i)
        out += fmt6(report.thresholds[i]) + "," + fmt6(report.fractions[i]) + "\n";
    return out;
}

} // namespace cecl::eval
