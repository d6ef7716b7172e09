#include "cecl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cecl/errors.hpp"

namespace cecl::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != value.size()) throw ParseError("config: " + key + ": not a number: '" + value + "'");
    return v;
}

int to_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(value, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != value.size())
        throw ParseError("config: " + key + ": not an integer: '" + value + "'");
    return int(v);
}

bool apply_detect_key(cascade::DetectParams& p, const std::string& sub, const std::string& key,
                      const std::string& value) {
    if (sub == "scale_factor") {
        p.scale_factor = to_real(key, value);
    } else if (sub == "step") {
        p.step = to_real(key, value);
    } else if (sub == "min_neighbors") {
        p.min_neighbors = to_int(key, value);
    } else if (sub == "min_size") {
        p.min_size = to_int(key, value);
    } else if (sub == "max_size") {
        p.max_size = to_int(key, value);
    } else {
        return false;
    }
    return true;
}

} // namespace

void apply_key(pipeline::PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "smooth_kernel_size") {
        cfg.smooth_kernel_size = to_int(key, value);
    } else if (key == "smooth_sigma_frac") {
        cfg.smooth_sigma_frac = to_real(key, value);
    } else if (key == "face_keep_frac") {
        cfg.face_keep_frac = to_real(key, value);
    } else if (key == "t_e") {
        cfg.t_e = to_real(key, value);
    } else if (key == "t_b") {
        cfg.t_b = to_int(key, value);
    } else if (key == "hough.r_min_frac") {
        cfg.hough.r_min_frac = to_real(key, value);
    } else if (key == "hough.r_max_frac") {
        cfg.hough.r_max_frac = to_real(key, value);
    } else if (key == "hough.min_completeness") {
        cfg.hough.min_completeness = to_real(key, value);
    } else {
        std::size_t dot = key.find('.');
        if (dot != std::string::npos) {
            std::string group = key.substr(0, dot);
            std::string sub = key.substr(dot + 1);
            if (group == "face" && apply_detect_key(cfg.face_detect, sub, key, value)) return;
            if (group == "eye" && apply_detect_key(cfg.eye_detect, sub, key, value)) return;
        }
        throw ParseError("config: unknown key '" + key + "'");
    }
}

void apply_text(pipeline::PipelineConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        apply_key(cfg, key, value);
    }
}

pipeline::PipelineConfig load_file(const std::string& path, pipeline::PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    apply_text(base, buf.str());
    return base;
}

namespace {

void validate_detect(const cascade::DetectParams& p, const std::string& name) {
    if (p.scale_factor <= 1.0)
        throw ParamError("config: " + name + ".scale_factor must be > 1");
    if (p.step <= 0.0) throw ParamError("config: " + name + ".step must be > 0");
    if (p.min_neighbors < 0) throw ParamError("config: " + name + ".min_neighbors must be >= 0");
    if (p.min_size && *p.min_size < 1)
        throw ParamError("config: " + name + ".min_size must be >= 1");
    if (p.max_size && *p.max_size < 1)
        throw ParamError("config: " + name + ".max_size must be >= 1");
}

} // namespace

void validate(const pipeline::PipelineConfig& cfg) {
    if (cfg.smooth_kernel_size < 1 || cfg.smooth_kernel_size % 2 == 0)
        throw ParamError("config: smooth_kernel_size must be odd and >= 1");
    if (cfg.smooth_sigma_frac <= 0.0 || cfg.smooth_sigma_frac >= 1.0)
        throw ParamError("config: smooth_sigma_frac must be in (0, 1)");
    if (cfg.face_keep_frac <= 0.0 || cfg.face_keep_frac >= 1.0)
        throw ParamError("config: face_keep_frac must be in (0, 1)");
    if (cfg.t_e < 0.0 || cfg.t_e >= 1.0)
        throw ParamError("config: t_e must be in [0, 1)");
    if (cfg.t_b < 0 || cfg.t_b > 255) throw ParamError("config: t_b must be in [0, 255]");
    if (!(cfg.hough.r_min_frac > 0.0) || !(cfg.hough.r_min_frac < cfg.hough.r_max_frac) ||
        !(cfg.hough.r_max_frac <= 0.5))
        throw ParamError("config: need 0 < hough.r_min_frac < hough.r_max_frac <= 0.5");
    if (cfg.hough.min_completeness <= 0.0 || cfg.hough.min_completeness > 1.0)
        throw ParamError("config: hough.min_completeness must be in (0, 1]");
    validate_detect(cfg.face_detect, "face");
    validate_detect(cfg.eye_detect, "eye");
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void detect_to_string(std::string& out, const cascade::DetectParams& p, const std::string& name) {
    out += name + ".scale_factor = " + fmt(p.scale_factor) + "\n";
    out += name + ".step = " + fmt(p.step) + "\n";
    out += name + ".min_neighbors = " + std::to_string(p.min_neighbors) + "\n";
    if (p.min_size) out += name + ".min_size = " + std::to_string(*p.min_size) + "\n";
    if (p.max_size) out += name + ".max_size = " + std::to_string(*p.max_size) + "\n";
}

} // namespace

std::string to_string(const pipeline::PipelineConfig& cfg) {
    std::string out;
    out += "smooth_kernel_size = " + std::to_string(cfg.smooth_kernel_size) + "\n";
    out += "smooth_sigma_frac = " + fmt(cfg.smooth_sigma_frac) + "\n";
    out += "face_keep_frac = " + fmt(cfg.face_keep_frac) + "\n";
    out += "t_e = " + fmt(cfg.t_e) + "\n";
    out += "t_b = " + std::to_string(cfg.t_b) + "\n";
    out += "hough.r_min_frac = " + fmt(cfg.hough.r_min_frac) + "\n";
    out += "hough.r_max_frac = " + fmt(cfg.hough.r_max_frac) + "\n";
    out += "hough.min_completeness = " + fmt(cfg.hough.min_completeness) + "\n";
    detect_to_string(out, cfg.face_detect, "face");
    detect_to_string(out, cfg.eye_detect, "eye");
    return out;
}

std::vector<int> parse_grid(const std::string& spec) {
    std::string s = trim(spec);
    if (s.empty()) throw ParamError("grid: empty spec");

    std::vector<int> grid;
    if (s.find(':') != std::string::npos) {
        int a = 0, step = 0, b = 0;
        char extra = 0;
        if (std::sscanf(s.c_str(), "%d:%d:%d%c", &a, &step, &b, &extra) != 3)
            throw ParamError("grid: expected start:step:stop, got '" + s + "'");
        if (step <= 0) throw ParamError("grid: step must be > 0");
        if (a > b) throw ParamError("grid: start must be <= stop");
        for (int v = a; v <= b; v += step) grid.push_back(v);
    } else {
        std::istringstream in(s);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            grid.push_back(to_int("grid", tok));
        }
    }
    if (grid.empty()) throw ParamError("grid: empty spec");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0 || grid[i] > 255)
            throw ParamError("grid: value " + std::to_string(grid[i]) + " outside [0, 255]");
        if (i > 0 && grid[i] <= grid[i - 1]) throw ParamError("grid: values must ascend");
    }
    return grid;
}

} // namespace cecl::config
