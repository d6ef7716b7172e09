#include "cecl/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cecl/errors.hpp"

namespace cecl::cascade {

namespace {

// ---- minimal XML subset for the legacy cascade markup ---------------------

struct XmlNode {
    std::string name;
    std::string text;
    std::vector<XmlNode> children;

    const XmlNode* child(const std::string& n) const {
        for (const auto& c : children)
            if (c.name == n) return &c;
        return nullptr;
    }
};

class XmlParser {
public:
    explicit XmlParser(const std::string& s) : s_(s) {}

    XmlNode parse() {
        XmlNode root;
        root.name = "#document";
        std::vector<XmlNode*> stack{&root};
        while (pos_ < s_.size()) {
            if (s_[pos_] == '<') {
                if (match("<?")) {
                    skip_until("?>");
                } else if (match("<!--")) {
                    skip_until("-->");
                } else if (match("<!")) {
                    skip_until(">");
                } else if (match("</")) {
                    std::string name = read_name();
                    skip_until(">");
                    if (stack.size() < 2 || stack.back()->name != name)
                        throw ParseError("cascade xml: mismatched closing tag </" + name + ">");
                    stack.pop_back();
                } else {
                    ++pos_; // '<'
                    XmlNode node;
                    node.name = read_name();
                    if (node.name.empty()) throw ParseError("cascade xml: empty element name");
                    bool self_closing = skip_attributes();
                    stack.back()->children.push_back(std::move(node));
                    if (!self_closing) stack.push_back(&stack.back()->children.back());
                }
            } else {
                stack.back()->text += s_[pos_++];
            }
        }
        if (stack.size() != 1)
            throw ParseError("cascade xml: unclosed element <" + stack.back()->name + ">");
        return root;
    }

private:
    bool match(const char* lit) {
        std::size_t len = std::string_view(lit).size();
        if (s_.compare(pos_, len, lit) != 0) return false;
        pos_ += len;
        return true;
    }
    void skip_until(const char* lit) {
        std::size_t at = s_.find(lit, pos_);
        if (at == std::string::npos) throw ParseError(std::string("cascade xml: unterminated ") + lit);
        pos_ = at + std::string_view(lit).size();
    }
    std::string read_name() {
        std::string name;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
                c == '.') {
                name += c;
                ++pos_;
            } else {
                break;
            }
        }
        return name;
    }
    // Consumes everything up to '>', honoring quotes; returns true for "/>".
    bool skip_attributes() {
        bool self_closing = false;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '"' || c == '\'') {
                std::size_t end = s_.find(c, pos_ + 1);
                if (end == std::string::npos) throw ParseError("cascade xml: unterminated attribute");
                pos_ = end + 1;
            } else if (c == '>') {
                ++pos_;
                return self_closing;
            } else {
                self_closing = (c == '/');
                ++pos_;
            }
        }
        throw ParseError("cascade xml: unterminated start tag");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_real(const std::string& tok, const std::string& path) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(path + ": not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(path + ": not a number: '" + tok + "'");
    return v;
}

long parse_int(const std::string& tok, const std::string& path) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(path + ": not an integer: '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(path + ": not an integer: '" + tok + "'");
    return v;
}

double require_real(const XmlNode& parent, const std::string& name, const std::string& path) {
    const XmlNode* n = parent.child(name);
    if (!n) throw ParseError(path + ": missing <" + name + ">");
    auto toks = split_ws(n->text);
    if (toks.size() != 1) throw ParseError(path + "/" + name + ": expected one number");
    return parse_real(toks[0], path + "/" + name);
}

Stump parse_stump(const XmlNode& node, int window_w, int window_h, const std::string& path) {
    if (node.child("left_node") || node.child("right_node"))
        throw ParseError(path + ": tree has more than one node (left_node/right_node present)");

    const XmlNode* feature = node.child("feature");
    if (!feature) throw ParseError(path + ": missing <feature>");
    const XmlNode* rects = feature->child("rects");
    if (!rects) throw ParseError(path + "/feature: missing <rects>");

    Stump stump;
    int idx = 0;
    for (const XmlNode& rn : rects->children) {
        std::string rpath = path + "/feature/rects/" + std::to_string(idx);
        auto toks = split_ws(rn.text);
        if (toks.size() != 5)
            throw ParseError(rpath + ": expected 'x y w h weight', got " +
                             std::to_string(toks.size()) + " fields");
        FeatureRect fr;
        fr.rect.x = int(parse_int(toks[0], rpath));
        fr.rect.y = int(parse_int(toks[1], rpath));
        fr.rect.w = int(parse_int(toks[2], rpath));
        fr.rect.h = int(parse_int(toks[3], rpath));
        fr.weight = parse_real(toks[4], rpath);
        if (fr.rect.w < 1 || fr.rect.h < 1 || fr.rect.x < 0 || fr.rect.y < 0 ||
            fr.rect.right() > window_w || fr.rect.bottom() > window_h)
            throw ParseError(rpath + ": rect " + to_string(fr.rect) + " outside " +
                             std::to_string(window_w) + "x" + std::to_string(window_h) +
                             " window");
        stump.feature.rects.push_back(fr);
        ++idx;
    }
    if (stump.feature.rects.size() < 2 || stump.feature.rects.size() > 3)
        throw ParseError(path + "/feature/rects: need 2-3 rects, got " +
                         std::to_string(stump.feature.rects.size()));

    if (const XmlNode* tilted = feature->child("tilted")) {
        auto toks = split_ws(tilted->text);
        if (toks.size() != 1 || parse_int(toks[0], path + "/feature/tilted") != 0)
            throw ParseError(path + "/feature/tilted: tilted features are not supported");
    }

    stump.threshold = require_real(node, "threshold", path);
    stump.left_value = require_real(node, "left_val", path);
    stump.right_value = require_real(node, "right_val", path);
    return stump;
}

} // namespace

CascadeModel parse_cascade(const std::string& text) {
    XmlNode doc = XmlParser(text).parse();

    // Locate the classifier element: the node owning <size> and <stages>,
    // usually one level under <opencv_storage>.
    const XmlNode* cascade = nullptr;
    std::vector<const XmlNode*> queue{&doc};
    while (!queue.empty() && !cascade) {
        const XmlNode* n = queue.back();
        queue.pop_back();
        if (n->child("stages")) {
            cascade = n;
            break;
        }
        for (const auto& c : n->children) queue.push_back(&c);
    }
    if (!cascade) throw ParseError("cascade: no element with <stages> found");

    CascadeModel model;
    model.name = cascade->name;

    const XmlNode* size = cascade->child("size");
    if (!size) throw ParseError(model.name + ": missing <size> (base window)");
    auto size_toks = split_ws(size->text);
    if (size_toks.size() != 2) throw ParseError(model.name + "/size: expected two integers");
    model.window_w = int(parse_int(size_toks[0], model.name + "/size"));
    model.window_h = int(parse_int(size_toks[1], model.name + "/size"));
    if (model.window_w < 4 || model.window_h < 4)
        throw ParseError(model.name + "/size: base window must be at least 4x4");

    const XmlNode* stages = cascade->child("stages");
    int si = 0;
    for (const XmlNode& sn : stages->children) {
        std::string spath = "stages/" + std::to_string(si);
        Stage stage;
        const XmlNode* trees = sn.child("trees");
        if (!trees) throw ParseError(spath + ": missing <trees>");
        int ti = 0;
        for (const XmlNode& tn : trees->children) {
            std::string tpath = spath + "/trees/" + std::to_string(ti);
            // a tree's children are its nodes; a stump cascade has exactly one
            std::size_t nodes = tn.children.size();
            if (nodes != 1)
                throw ParseError(tpath + ": expected a single-node tree, got " +
                                 std::to_string(nodes) + " nodes");
            stage.stumps.push_back(parse_stump(tn.children[0], model.window_w, model.window_h, tpath));
            ++ti;
        }
        if (stage.stumps.empty()) throw ParseError(spath + ": stage has no trees");
        stage.stage_threshold = require_real(sn, "stage_threshold", spath);
        model.stages.push_back(std::move(stage));
        ++si;
    }
    if (model.stages.empty()) throw ParseError(model.name + ": cascade has no stages");
    return model;
}

CascadeModel load_cascade_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cascade file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_cascade(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string serialize_cascade(const CascadeModel& model) {
    std::string name = model.name.empty() ? "cascade" : model.name;
    std::string out = "<?xml version=\"1.0\"?>\n<opencv_storage>\n<" + name +
                      " type_id=\"opencv-haar-classifier\">\n  <size>\n    " +
                      std::to_string(model.window_w) + " " + std::to_string(model.window_h) +
                      "</size>\n  <stages>\n";
    for (const Stage& stage : model.stages) {
        out += "    <_>\n      <trees>\n";
        for (const Stump& stump : stage.stumps) {
            out += "        <_>\n          <_>\n            <feature>\n              <rects>\n";
            for (const FeatureRect& fr : stump.feature.rects) {
                out += "                <_>\n                  " + std::to_string(fr.rect.x) + " " +
                       std::to_string(fr.rect.y) + " " + std::to_string(fr.rect.w) + " " +
                       std::to_string(fr.rect.h) + " " + fmt_real(fr.weight) + "</_>\n";
            }
            out += "              </rects>\n              <tilted>0</tilted>\n";
            out += "            </feature>\n";
            out += "            <threshold>" + fmt_real(stump.threshold) + "</threshold>\n";
            out += "            <left_val>" + fmt_real(stump.left_value) + "</left_val>\n";
            out += "            <right_val>" + fmt_real(stump.right_value) + "</right_val></_></_>\n";
        }
        out += "      </trees>\n      <stage_threshold>" + fmt_real(stage.stage_threshold) +
               "</stage_threshold>\n      <parent>-1</parent>\n      <next>-1</next></_>\n";
    }
    out += "  </stages></" + name + ">\n</opencv_storage>\n";
    return out;
}

bool evaluate_window(const CascadeModel& model, const IntegralImage& ii, const Rect& window,
                     double scale) {
    Rect image_bounds{0, 0, ii.width, ii.height};
    if (!image_bounds.contains(window))
        throw BoundsError("evaluate_window: window " + to_string(window) + " outside image " +
                          std::to_string(ii.width) + "x" + std::to_string(ii.height));

    const double area = double(window.w) * double(window.h);
    const double mean = double(ii.rect_sum(window)) / area;
    const double var = double(ii.rect_sum_squared(window)) / area - mean * mean;
    const double sigma = var > 0.0 ? std::sqrt(var) : 1.0;

    for (const Stage& stage : model.stages) {
        double stage_sum = 0.0;
        for (const Stump& stump : stage.stumps) {
            double feature = 0.0;
            for (const FeatureRect& fr : stump.feature.rects) {
                // round each field independently, then clip to the window
                int sx = round_half_away(fr.rect.x * scale);
                int sy = round_half_away(fr.rect.y * scale);
                int sw = round_half_away(fr.rect.w * scale);
                int sh = round_half_away(fr.rect.h * scale);
                int x0 = std::clamp(sx, 0, window.w);
                int y0 = std::clamp(sy, 0, window.h);
                int x1 = std::clamp(sx + sw, x0, window.w);
                int y1 = std::clamp(sy + sh, y0, window.h);
                Rect abs{window.x + x0, window.y + y0, x1 - x0, y1 - y0};
                if (abs.w > 0 && abs.h > 0) feature += fr.weight * double(ii.rect_sum(abs));
            }
            stage_sum += feature < stump.threshold * sigma * area ? stump.left_value
                                                                  : stump.right_value;
        }
        if (stage_sum < stage.stage_threshold) return false;
    }
    return true;
}

std::vector<Rect> detect_multiscale(const GrayImage& image, const CascadeModel& model,
                                    const DetectParams& params) {
    if (params.scale_factor <= 1.0)
        throw ParamError("detect: scale_factor must be > 1, got " +
                         std::to_string(params.scale_factor));
    if (image.width < model.window_w || image.height < model.window_h) return {};

    IntegralImage ii = integral_images(image);
    std::vector<Rect> hits;
    for (double scale = 1.0;; scale *= params.scale_factor) {
        int win_w = round_half_away(model.window_w * scale);
        int win_h = round_half_away(model.window_h * scale);
        if (win_w > image.width || win_h > image.height) break;
        if (params.max_size && win_w > *params.max_size) break;
        if (params.min_size && win_w < *params.min_size) continue;

        int stride = std::max(1, round_half_away(params.step * scale));
        for (int y = 0; y + win_h <= image.height; y += stride) {
            for (int x = 0; x + win_w <= image.width; x += stride) {
                if (evaluate_window(model, ii, {x, y, win_w, win_h}, scale))
                    hits.push_back({x, y, win_w, win_h});
            }
        }
    }

    std::vector<Rect> grouped = group_rects(hits, params.min_neighbors);
    std::sort(grouped.begin(), grouped.end(), [](const Rect& a, const Rect& b) {
        if (a.area() != b.area()) return a.area() > b.area();
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    return grouped;
}

std::vector<Rect> group_rects(const std::vector<Rect>& hits, int min_neighbors, double eps) {
    const std::size_t n = hits.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    auto similar = [eps](const Rect& a, const Rect& b) {
        double mean_side = (a.w + a.h + b.w + b.h) / 4.0;
        double tol = eps * mean_side;
        return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
               std::abs(a.w - b.w) <= tol && std::abs(a.h - b.h) <= tol;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (similar(hits[i], hits[j])) parent[find(i)] = find(j);

    // classes in order of first member
    std::vector<std::size_t> roots;
    std::vector<int> root_index(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (root_index[r] < 0) {
            root_index[r] = int(roots.size());
            roots.push_back(r);
        }
    }

    struct ClassAcc {
        long long sx = 0, sy = 0, sw = 0, sh = 0;
        int count = 0;
        Rect bbox{0, 0, 0, 0};
    };
    std::vector<ClassAcc> classes(roots.size());
    for (std::size_t i = 0; i < n; ++i) {
        ClassAcc& c = classes[std::size_t(root_index[find(i)])];
        const Rect& r = hits[i];
        if (c.count == 0) {
            c.bbox = r;
        } else {
            int x0 = std::min(c.bbox.x, r.x);
            int y0 = std::min(c.bbox.y, r.y);
            int x1 = std::max(c.bbox.right(), r.right());
            int y1 = std::max(c.bbox.bottom(), r.bottom());
            c.bbox = {x0, y0, x1 - x0, y1 - y0};
        }
        c.sx += r.x;
        c.sy += r.y;
        c.sw += r.w;
        c.sh += r.h;
        c.count++;
    }

    std::vector<Rect> out;
    for (const ClassAcc& c : classes) {
        if (c.count <= min_neighbors) continue;
        Rect avg{round_half_away(double(c.sx) / c.count), round_half_away(double(c.sy) / c.count),
                 round_half_away(double(c.sw) / c.count), round_half_away(double(c.sh) / c.count)};
        // rounding can overflow the class bounding box by a pixel; clamp back
        avg.w = std::min(avg.w, c.bbox.w);
        avg.h = std::min(avg.h, c.bbox.h);
        avg.x = std::clamp(avg.x, c.bbox.x, c.bbox.right() - avg.w);
        avg.y = std::clamp(avg.y, c.bbox.y, c.bbox.bottom() - avg.h);
        out.push_back(avg);
    }
    return out;
}

} // namespace cecl::cascade
