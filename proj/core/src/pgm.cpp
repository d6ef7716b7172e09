#include "cecl/pgm.hpp"

#include <cctype>
#include <fstream>

#include "cecl/errors.hpp"

namespace cecl {

namespace {

struct Reader {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t pos = 0;

    bool eof() const { return pos >= n; }
    int peek() const { return eof() ? -1 : p[pos]; }
    int get() { return eof() ? -1 : p[pos++]; }

    // Skips whitespace and '#' comments (to end of line).
    void skip_separators() {
        while (!eof()) {
            int c = peek();
            if (std::isspace(c)) {
                ++pos;
            } else if (c == '#') {
                while (!eof() && get() != '\n') {
                }
            } else {
                break;
            }
        }
    }

    // Reads a decimal header token; `field` names it in errors.
    unsigned read_uint(const char* field) {
        skip_separators();
        if (eof() || !std::isdigit(peek()))
            throw FormatError(std::string("pgm: missing or non-numeric ") + field);
        unsigned long v = 0;
        while (!eof() && std::isdigit(peek())) {
            v = v * 10 + unsigned(get() - '0');
            if (v > 1000000000ul) throw FormatError(std::string("pgm: ") + field + " out of range");
        }
        return unsigned(v);
    }
};

} // namespace

GrayImage load_pgm(const std::vector<std::uint8_t>& bytes) {
    Reader rd{bytes.data(), bytes.size()};

    if (rd.get() != 'P') throw FormatError("pgm: bad magic, expected P5 or P2");
    int kind = rd.get();
    if (kind != '5' && kind != '2') throw FormatError("pgm: bad magic, expected P5 or P2");

    unsigned w = rd.read_uint("width");
    unsigned h = rd.read_uint("height");
    unsigned maxval = rd.read_uint("maxval");
    if (w == 0) throw FormatError("pgm: width must be >= 1");
    if (h == 0) throw FormatError("pgm: height must be >= 1");
    if (maxval == 0 || maxval > 255)
        throw FormatError("pgm: maxval " + std::to_string(maxval) + " unsupported, need 1..255");

    GrayImage img;
    img.width = int(w);
    img.height = int(h);
    img.data.resize(std::size_t(w) * h);

    if (kind == '5') {
        // exactly one whitespace byte after maxval, then the raw raster
        int sep = rd.get();
        if (sep < 0 || !std::isspace(sep)) throw FormatError("pgm: missing raster separator after maxval");
        if (rd.n - rd.pos < img.data.size())
            throw FormatError("pgm: truncated raster, expected " + std::to_string(img.data.size()) +
                              " bytes, got " + std::to_string(rd.n - rd.pos));
        std::copy(rd.p + rd.pos, rd.p + rd.pos + img.data.size(), img.data.begin());
    } else {
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            unsigned v = rd.read_uint("raster value");
            if (v > maxval)
                throw FormatError("pgm: raster value " + std::to_string(v) + " exceeds maxval");
            img.data[i] = std::uint8_t(v);
        }
    }
    return img;
}

GrayImage load_pgm(const std::string& bytes) {
    return load_pgm(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> save_pgm(const GrayImage& image, PgmFormat format) {
    std::string header = (format == PgmFormat::P5 ? "P5\n" : "P2\n");
    header += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (format == PgmFormat::P5) {
        out.insert(out.end(), image.data.begin(), image.data.end());
    } else {
        std::string body;
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (x) body += ' ';
                body += std::to_string(image.at(x, y));
            }
            body += '\n';
        }
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

GrayImage load_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return load_pgm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void save_pgm_file(const GrayImage& image, const std::string& path, PgmFormat format) {
    std::vector<std::uint8_t> bytes = save_pgm(image, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

} // namespace cecl
