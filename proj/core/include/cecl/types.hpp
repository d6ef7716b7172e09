#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace cecl {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(double(a.x) - double(b.x), double(a.y) - double(b.y));
}

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    friend bool operator==(const Rect&, const Rect&) = default;

    long long area() const { return (long long)w * (long long)h; }
    double center_x() const { return x + 0.5 * w; }
    double center_y() const { return y + 0.5 * h; }
    int right() const { return x + w; }
    int bottom() const { return y + h; }

    bool contains(const Point& p) const {
        return p.x >= x && p.x < x + w && p.y >= y && p.y < y + h;
    }
    // true when r lies fully inside this rect
    bool contains(const Rect& r) const {
        return r.x >= x && r.y >= y && r.right() <= right() && r.bottom() <= bottom();
    }
};

inline std::string to_string(const Rect& r) {
    return "(" + std::to_string(r.x) + "," + std::to_string(r.y) + " " +
           std::to_string(r.w) + "x" + std::to_string(r.h) + ")";
}

inline double iou(const Rect& a, const Rect& b) {
    int ix = std::max(a.x, b.x);
    int iy = std::max(a.y, b.y);
    int ir = std::min(a.right(), b.right());
    int ib = std::min(a.bottom(), b.bottom());
    long long inter = (long long)std::max(0, ir - ix) * std::max(0, ib - iy);
    long long uni = a.area() + b.area() - inter;
    return uni > 0 ? double(inter) / double(uni) : 0.0;
}

// Round to nearest integer, halves away from zero. Used everywhere an
// image coordinate or pixel value is rounded so results are identical
// across platforms.
inline int round_half_away(double v) {
    return v >= 0.0 ? int(std::floor(v + 0.5)) : int(std::ceil(v - 0.5));
}

} // namespace cecl
