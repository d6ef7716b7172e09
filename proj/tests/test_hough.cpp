#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cecl/errors.hpp"
#include "cecl/hough.hpp"
#include "cecl/rng.hpp"
#include "testutil.hpp"

using namespace cecl;
using namespace cecl::hough;

namespace {

std::vector<Point> ring_points(Point c, int r) {
    std::vector<Point> pts;
    for (const Point& d : circle_ring(r)) pts.push_back({c.x + d.x, c.y + d.y});
    return pts;
}

std::vector<Point> random_points(Rng& rng, int w, int h, int n) {
    std::set<std::pair<int, int>> uniq;
    while (int(uniq.size()) < n) uniq.insert({rng.uniform(0, w - 1), rng.uniform(0, h - 1)});
    std::vector<Point> pts;
    for (auto [x, y] : uniq) pts.push_back({x, y});
    return pts;
}

} // namespace

TEST_CASE("radius_range derives bounds from the region width") {
    HoughParams hp;
    RadiusRange rr = radius_range(48, hp);
    CHECK(rr.r_min == 5);
    CHECK(rr.r_max == 22);
    CHECK_FALSE(rr.empty());

    RadiusRange tiny = radius_range(2, hp); // r_min floor 2 beats a 1px r_max
    CHECK(tiny.empty());
}

TEST_CASE("boundary_pixels basics") {
    BinaryImage bright = BinaryImage::filled(6, 6, 1);
    CHECK(boundary_pixels(bright).empty());

    BinaryImage one = BinaryImage::filled(6, 6, 1);
    one.at(3, 2) = 0;
    auto pts = boundary_pixels(one);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == Point{3, 2});
}

TEST_CASE("boundary_pixels of a filled disk matches an independent extraction") {
    BinaryImage img = BinaryImage::filled(16, 16, 1);
    testutil::fill_disk(img, {8, 8}, 5, 0);
    auto pts = boundary_pixels(img);

    // reference: dark set minus dark pixels whose clipped 4-neighborhood is
    // entirely dark
    std::set<std::pair<int, int>> ref;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            if (img.at(x, y) != 0) continue;
            bool interior = x > 0 && x < 15 && y > 0 && y < 15 && img.at(x - 1, y) == 0 &&
                            img.at(x + 1, y) == 0 && img.at(x, y - 1) == 0 && img.at(x, y + 1) == 0;
            if (!interior) ref.insert({x, y});
        }
    CHECK(pts.size() == ref.size());
    for (const Point& p : pts) CHECK(ref.count({p.x, p.y}) == 1);

    // row-major ordering
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK((pts[i - 1].y < pts[i].y || (pts[i - 1].y == pts[i].y && pts[i - 1].x < pts[i].x)));
}

TEST_CASE("boundary_pixels treats off-image as bright") {
    BinaryImage dark = BinaryImage::filled(4, 3, 0);
    auto pts = boundary_pixels(dark);
    CHECK(pts.size() == 10); // the border ring of a 4x3 raster
}

TEST_CASE("accumulate rejects an empty radius range") {
    CHECK_THROWS_AS(accumulate({}, 8, 8, RadiusRange{5, 4}), ParamError);
}

TEST_CASE("accumulate of no points is all zeros") {
    HoughAccumulator acc = accumulate({}, 8, 8, {2, 3});
    CHECK(acc.total_votes() == 0);
}

TEST_CASE("accumulate votes one ring per point and radius") {
    RadiusRange rr{3, 3};
    HoughAccumulator acc = accumulate({{10, 10}}, 21, 21, rr);
    CHECK(acc.total_votes() == std::uint64_t(circle_ring_size(3)));
    for (const Point& d : circle_ring(3)) CHECK(acc.at(10 + d.x, 10 + d.y, 3) == 1);
    CHECK(acc.at(10, 10, 3) == 0);
}

TEST_CASE("accumulate peak of a perfect circle is its center") {
    Point c{12, 11};
    int r = 6;
    auto pts = ring_points(c, r);
    HoughAccumulator acc = accumulate(pts, 24, 24, {4, 9});
    CHECK(acc.at(c.x, c.y, r) == std::uint32_t(circle_ring_size(r)));

    auto best = best_circle(acc, 0.35);
    REQUIRE(best.has_value());
    CHECK(best->cx == c.x);
    CHECK(best->cy == c.y);
    CHECK(best->r == r);
    CHECK(best->score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("best_circle of an empty accumulator is nullopt") {
    HoughAccumulator acc = accumulate({}, 8, 8, {2, 3});
    CHECK_FALSE(best_circle(acc, 0.35).has_value());
}

TEST_CASE("best_circle honors the completeness cutoff on a half ring") {
    Point c{12, 12};
    int r = 7;
    std::vector<Point> pts;
    for (const Point& d : circle_ring(r))
        if (d.y <= 0) pts.push_back({c.x + d.x, c.y + d.y}); // upper half

    HoughAccumulator acc = accumulate(pts, 25, 25, {5, 9});
    auto found = best_circle(acc, 0.35);
    REQUIRE(found.has_value());
    CHECK(found->cx == c.x);
    CHECK(found->cy == c.y);
    CHECK(found->r == r);
    CHECK(found->score > 0.4);
    CHECK(found->score < 0.65);

    CHECK_FALSE(best_circle(acc, 0.66).has_value());
}

TEST_CASE("oracle_best_circle basics") {
    CHECK_FALSE(oracle_best_circle({}, 8, 8, {2, 3}, 0.35).has_value());

    Point c{9, 8};
    int r = 5;
    auto found = oracle_best_circle(ring_points(c, r), 20, 20, {3, 8}, 0.35);
    REQUIRE(found.has_value());
    CHECK(found->cx == c.x);
    CHECK(found->cy == c.y);
    CHECK(found->r == r);
}

TEST_CASE("accumulator path equals the exhaustive oracle on random instances") {
    Rng rng(41);
    HoughParams hp;
    for (int i = 0; i < 60; ++i) {
        int w = rng.uniform(16, 32), h = rng.uniform(16, 32);
        auto pts = random_points(rng, w, h, rng.uniform(3, 60));
        RadiusRange rr = radius_range(w, hp);
        if (rr.empty()) continue;
        auto fast = best_circle(accumulate(pts, w, h, rr), hp.min_completeness);
        auto slow = oracle_best_circle(pts, w, h, rr, hp.min_completeness);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(fast->cx == slow->cx);
            CHECK(fast->cy == slow->cy);
            CHECK(fast->r == slow->r);
            CHECK(std::abs(fast->score - slow->score) <= 1e-12);
        }
    }
}

TEST_CASE("vote conservation against an independent clipped count") {
    Rng rng(42);
    int w = 20, h = 17;
    auto pts = random_points(rng, w, h, 25);
    RadiusRange rr{2, 6};
    HoughAccumulator acc = accumulate(pts, w, h, rr);

    std::uint64_t expected = 0;
    for (const Point& p : pts)
        for (int r = rr.r_min; r <= rr.r_max; ++r)
            for (const Point& d : circle_ring(r)) {
                int cx = p.x + d.x, cy = p.y + d.y;
                if (cx >= 0 && cy >= 0 && cx < w && cy < h) ++expected;
            }
    CHECK(acc.total_votes() == expected);
}

TEST_CASE("winner translates with the input points") {
    Rng rng(43);
    HoughParams hp;
    for (int i = 0; i < 20; ++i) {
        // margin keeps every ring unclipped before and after the shift
        int w = 64, h = 64;
        Point c{rng.uniform(24, 40), rng.uniform(24, 40)};
        int r = rng.uniform(4, 6);
        std::vector<Point> pts;
        for (const Point& d : circle_ring(r))
            if (rng.chance(0.85)) pts.push_back({c.x + d.x, c.y + d.y});
        for (int j = 0; j < 6; ++j)
            pts.push_back({c.x + rng.uniform(-8, 8), c.y + rng.uniform(-8, 8)});

        int dx = rng.uniform(-10, 10), dy = rng.uniform(-10, 10);
        std::vector<Point> moved;
        for (const Point& p : pts) moved.push_back({p.x + dx, p.y + dy});

        RadiusRange rr{3, 8};
        auto a = best_circle(accumulate(pts, w, h, rr), hp.min_completeness);
        auto b = best_circle(accumulate(moved, w, h, rr), hp.min_completeness);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(b->cx == a->cx + dx);
        CHECK(b->cy == a->cy + dy);
        CHECK(b->r == a->r);
    }
}

TEST_CASE("deleting points never raises any cell score") {
    Rng rng(44);
    int w = 24, h = 24;
    auto pts = random_points(rng, w, h, 40);
    RadiusRange rr{2, 5};
    HoughAccumulator full = accumulate(pts, w, h, rr);

    std::vector<Point> fewer(pts.begin(), pts.begin() + 25);
    HoughAccumulator part = accumulate(fewer, w, h, rr);
    for (std::size_t i = 0; i < full.counts.size(); ++i) CHECK(part.counts[i] <= full.counts[i]);
}

TEST_CASE("noisy occluded disks localize within 2px (smoke)") {
    Rng rng(45);
    HoughParams hp;
    int ok = 0, n = 40;
    for (int i = 0; i < n; ++i) {
        testutil::DiskCase c = testutil::make_disk_case(rng, 0.05, 0.25);
        BinaryImage closed = close_dark(c.image, {3});
        auto pts = boundary_pixels(closed);
        RadiusRange rr = radius_range(closed.width, hp);
        auto best = best_circle(accumulate(pts, closed.width, closed.height, rr),
                                hp.min_completeness);
        if (best && std::abs(best->cx - c.center.x) <= 2 && std::abs(best->cy - c.center.y) <= 2 &&
            std::abs(best->r - c.radius) <= 2)
            ++ok;
    }
    CHECK(ok >= 36); // the acceptance suite runs the full 200-case batch
}
