#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cecl/errors.hpp"
#include "cecl/pgm.hpp"
#include "cecl/rng.hpp"
#include "testutil.hpp"

using namespace cecl;

TEST_CASE("P2 with comments decodes to the raster values") {
    GrayImage img = load_pgm(std::string("P2\n# a comment\n2 2\n255\n0 1\n2 3\n"));
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.data == std::vector<std::uint8_t>{0, 1, 2, 3});
}

TEST_CASE("P5 honors comments between header fields") {
    std::string bytes = "P5 # binary\n# width next\n3\n#height\n1 255\n";
    bytes += '\x07';
    bytes += '\x08';
    bytes += '\x09';
    GrayImage img = load_pgm(bytes);
    CHECK(img.width == 3);
    CHECK(img.data == std::vector<std::uint8_t>{7, 8, 9});
}

TEST_CASE("P5 round trip is byte lossless") {
    Rng rng(11);
    for (int i = 0; i < 30; ++i) {
        GrayImage img = testutil::random_image(rng, rng.uniform(1, 16), rng.uniform(1, 16));
        std::vector<std::uint8_t> bytes = save_pgm(img, PgmFormat::P5);
        GrayImage back = load_pgm(bytes);
        CHECK(back == img);
        CHECK(save_pgm(back, PgmFormat::P5) == bytes);
    }
}

TEST_CASE("P2 round trip is value lossless") {
    Rng rng(12);
    for (int i = 0; i < 30; ++i) {
        GrayImage img = testutil::random_image(rng, rng.uniform(1, 16), rng.uniform(1, 16));
        CHECK(load_pgm(save_pgm(img, PgmFormat::P2)) == img);
    }
}

TEST_CASE("P2 encoding of a single pixel") {
    GrayImage img = GrayImage::filled(1, 1, 7);
    std::vector<std::uint8_t> bytes = save_pgm(img, PgmFormat::P2);
    CHECK(std::string(bytes.begin(), bytes.end()) == "P2\n1 1\n255\n7\n");
}

TEST_CASE("P5 encoding emits the exact header and raster size") {
    GrayImage img = GrayImage::filled(384, 286, 0);
    std::vector<std::uint8_t> bytes = save_pgm(img, PgmFormat::P5);
    std::string header = "P5\n384 286\n255\n";
    CHECK(bytes.size() == header.size() + 384 * 286);
    CHECK(std::string(bytes.begin(), bytes.begin() + std::ptrdiff_t(header.size())) == header);
}

TEST_CASE("a BioID-sized frame loads as 384x286") {
    GrayImage img = GrayImage::filled(384, 286, 99);
    GrayImage back = load_pgm(save_pgm(img, PgmFormat::P5));
    CHECK(back.width == 384);
    CHECK(back.height == 286);
}

TEST_CASE("header errors name the offending field") {
    CHECK_THROWS_WITH_AS(load_pgm(std::string("P6\n1 1\n255\nx")), doctest::Contains("magic"),
                         FormatError);
    CHECK_THROWS_WITH_AS(load_pgm(std::string("P2\n1 1\n65535\n0")), doctest::Contains("maxval"),
                         FormatError);
    CHECK_THROWS_WITH_AS(load_pgm(std::string("P2\n0 1\n255\n")), doctest::Contains("width"),
                         FormatError);
    CHECK_THROWS_WITH_AS(load_pgm(std::string("P5\n4 4\n255\nab")), doctest::Contains("truncated"),
                         FormatError);
    CHECK_THROWS_WITH_AS(load_pgm(std::string("P2\n2 1\n255\n1")),
                         doctest::Contains("raster value"), FormatError);
}

TEST_CASE("garbage and truncated inputs throw instead of crashing") {
    Rng rng(14);
    GrayImage img = testutil::random_image(rng, 6, 4);
    std::vector<std::uint8_t> good = save_pgm(img, PgmFormat::P5);
    for (std::size_t cut = 0; cut < good.size(); ++cut) {
        std::vector<std::uint8_t> partial(good.begin(), good.begin() + std::ptrdiff_t(cut));
        CHECK_THROWS_AS(load_pgm(partial), FormatError);
    }
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> junk(std::size_t(rng.uniform(0, 64)));
        for (auto& b : junk) b = std::uint8_t(rng.uniform(0, 255));
        try {
            load_pgm(junk);
        } catch (const FormatError&) {
        }
    }
}

TEST_CASE("file round trip") {
    Rng rng(13);
    GrayImage img = testutil::random_image(rng, 9, 5);
    std::string dir = CECL_TEST_TMP;
    std::filesystem::create_directories(dir);
    std::string path = dir + "/roundtrip.pgm";
    save_pgm_file(img, path);
    CHECK(load_pgm_file(path) == img);
    CHECK_THROWS_AS(load_pgm_file(dir + "/does_not_exist.pgm"), IoError);
}
