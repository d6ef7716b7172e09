#include "cecl/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cecl/errors.hpp"
#include "cecl/pgm.hpp"

namespace cecl::synth {

namespace {

void fill_rect(GrayImage& img, const Rect& r, std::uint8_t value) {
    int x0 = std::max(0, r.x), y0 = std::max(0, r.y);
    int x1 = std::min(img.width, r.right()), y1 = std::min(img.height, r.bottom());
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.at(x, y) = value;
}

void fill_disk(GrayImage& img, Point c, int r, std::uint8_t value) {
    for (int y = std::max(0, c.y - r); y <= std::min(img.height - 1, c.y + r); ++y)
        for (int x = std::max(0, c.x - r); x <= std::min(img.width - 1, c.x + r); ++x) {
            long long dx = x - c.x, dy = y - c.y;
            if (dx * dx + dy * dy <= (long long)r * r) img.at(x, y) = value;
        }
}

struct EyeDraw {
    Point center;
    int radius;
    Rect region;
};

EyeDraw draw_eye(GrayImage& img, Rng& rng, int cx_base, int cy_base, std::uint8_t ground,
                 double occlusion_max) {
    EyeDraw e;
    e.center = {cx_base + rng.uniform(-12, 12), cy_base + rng.uniform(-8, 8)};
    e.radius = rng.uniform(9, 14);

    std::uint8_t iris = std::uint8_t(60 + rng.uniform(0, 20));
    fill_disk(img, e.center, e.radius, iris);
    fill_rect(img, {e.center.x - 1, e.center.y - 1, 3, 3}, 0); // pupil cluster

    // eyebrow bar, cropped away later by T_e
    fill_rect(img, {e.center.x - 15, e.center.y - 24, 30, 5}, 70);

    // eyelid: a ground-colored bar hiding the top cap of the iris
    if (rng.chance(0.5)) {
        double severity = rng.unit() * occlusion_max;
        int cut = round_half_away(severity * e.radius);
        if (cut > 0)
            fill_rect(img, {e.center.x - e.radius - 1, e.center.y - e.radius,
                            2 * e.radius + 3, cut},
                      ground);
    }

    // region box: tall enough that the T_e crop removes the brow, not the iris
    e.region = {e.center.x - 24 + rng.uniform(-2, 2), e.center.y - 31 + rng.uniform(-2, 2), 48, 48};
    return e;
}

} // namespace

FaceFrame make_face_frame(int width, int height, const Rect& face) {
    FaceFrame f;
    f.image = GrayImage::filled(width, height, 235);
    f.face = face;
    fill_rect(f.image, face, 190);

    int ex_l = face.x + round_half_away(0.27 * face.w);
    int ex_r = face.x + round_half_away(0.73 * face.w);
    int ey = face.y + round_half_away(0.40 * face.h);
    f.iris_radius = std::max(2, round_half_away(0.10 * face.w));
    f.left_center = {ex_l, ey};
    f.right_center = {ex_r, ey};
    fill_disk(f.image, f.left_center, f.iris_radius, 50);
    fill_disk(f.image, f.right_center, f.iris_radius, 50);
    fill_rect(f.image, {ex_l - 1, ey - 1, 3, 3}, 0);
    fill_rect(f.image, {ex_r - 1, ey - 1, 3, 3}, 0);

    // mouth bar at the feature geometry the face cascade expects
    Rect mouth{face.x + round_half_away(face.w * 7.0 / 24.0),
               face.y + round_half_away(face.h * 16.0 / 24.0),
               round_half_away(face.w * 10.0 / 24.0), round_half_away(face.h * 4.0 / 24.0)};
    fill_rect(f.image, mouth, 90);
    return f;
}

Frame make_frame(Rng& rng, const FrameParams& params) {
    std::uint8_t ground = std::uint8_t(185 + rng.uniform(0, 20));
    Frame f;
    f.image = GrayImage::filled(params.width, params.height, ground);

    int eye_y = params.height * 5 / 12;
    EyeDraw left = draw_eye(f.image, rng, params.width * 3 / 10, eye_y, ground, params.occlusion);
    EyeDraw right = draw_eye(f.image, rng, params.width * 7 / 10, eye_y, ground, params.occlusion);

    // salt-and-pepper over the whole frame
    double severity = rng.unit() * params.noise;
    auto flips = (long long)(severity * double(f.image.pixel_count()));
    for (long long i = 0; i < flips; ++i) {
        int x = rng.uniform(0, params.width - 1);
        int y = rng.uniform(0, params.height - 1);
        f.image.at(x, y) = rng.chance(0.5) ? 0 : 255;
    }

    f.left_center = left.center;
    f.right_center = right.center;
    f.left_radius = left.radius;
    f.right_radius = right.radius;
    f.left_region = left.region;
    f.right_region = right.region;
    return f;
}

std::string manifest_line(const CorpusFile& file) {
    const Rect& l = file.frame.left_region;
    const Rect& r = file.frame.right_region;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %d %d %d %d %d %d %d %d", file.image_name.c_str(), l.x,
                  l.y, l.w, l.h, r.x, r.y, r.w, r.h);
    return buf;
}

std::vector<CorpusFile> write_corpus(const std::string& dir, int count, std::uint32_t seed,
                                     const FrameParams& params) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("synth: cannot create directory " + dir);

    Rng rng(seed);
    std::vector<CorpusFile> out;
    std::string manifest;
    for (int i = 0; i < count; ++i) {
        CorpusFile file;
        char name[32];
        std::snprintf(name, sizeof name, "synth_%04d", i);
        file.image_name = std::string(name) + ".pgm";
        file.frame = make_frame(rng, params);

        save_pgm_file(file.frame.image, dir + "/" + file.image_name);

        std::ofstream eye(dir + "/" + std::string(name) + ".eye", std::ios::trunc);
        if (!eye) throw IoError("synth: cannot write " + dir + "/" + name + ".eye");
        eye << "#LX\tLY\tRX\tRY\n"
            << file.frame.left_center.x << " " << file.frame.left_center.y << " "
            << file.frame.right_center.x << " " << file.frame.right_center.y << "\n";

        manifest += manifest_line(file) + "\n";
        out.push_back(std::move(file));
    }
    std::ofstream mf(dir + "/regions.txt", std::ios::trunc);
    if (!mf) throw IoError("synth: cannot write " + dir + "/regions.txt");
    mf << "# frame regions: name x_l y_l w_l h_l x_r y_r w_r h_r\n" << manifest;
    return out;
}

} // namespace cecl::synth
