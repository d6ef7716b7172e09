#pragma once

#include <string>
#include <vector>

#include "cecl/image.hpp"

namespace cecl {

enum class PgmFormat { P5, P2 };

// Decodes binary (P5) or ASCII (P2) PGM with maxval <= 255. '#' comment
// lines are honored after the magic token. Throws FormatError naming the
// offending header field.
GrayImage load_pgm(const std::vector<std::uint8_t>& bytes);
GrayImage load_pgm(const std::string& bytes);

// Encodes "P5\n<w> <h>\n255\n" + raw raster, or the ASCII P2 equivalent.
// load_pgm is the exact inverse.
std::vector<std::uint8_t> save_pgm(const GrayImage& image, PgmFormat format = PgmFormat::P5);

GrayImage load_pgm_file(const std::string& path);
void save_pgm_file(const GrayImage& image, const std::string& path,
                   PgmFormat format = PgmFormat::P5);

} // namespace cecl
