#pragma once

#include <string>
#include <vector>

#include "cecl/image.hpp"
#include "cecl/rng.hpp"
#include "cecl/types.hpp"

namespace cecl::synth {

struct FrameParams {
    int width = 320;
    int height = 240;
    double noise = 0.02;     // max salt-and-pepper flip fraction
    double occlusion = 0.25; // max fraction of the iris boundary hidden by the lid
};

// One generated frame plus everything a test needs to score it.
struct Frame {
    GrayImage image;
    Point left_center;
    Point right_center;
    int left_radius = 0;
    int right_radius = 0;
    Rect left_region;
    Rect right_region;
};

// Bright ground, two dark iris disks with a black 3x3 pupil cluster at the
// exact center, an eyebrow bar above each eye (the T_e crop's job), and a
// per-frame draw of eyelid occlusion and salt-and-pepper noise up to the
// configured maxima.
Frame make_frame(Rng& rng, const FrameParams& params = {});

// A frontal-face pattern matched to the vendored cascades: skin rectangle,
// two dark iris disks with pupil clusters in the upper half, a mouth bar in
// the lower half. Used by detector tests and the shipped sample image.
struct FaceFrame {
    GrayImage image;
    Rect face;
    Point left_center;
    Point right_center;
    int iris_radius = 0;
};

FaceFrame make_face_frame(int width, int height, const Rect& face);

struct CorpusFile {
    std::string image_name; // e.g. synth_0007.pgm
    Frame frame;
};

// Writes count frames (synth_NNNN.pgm), matching .eye ground-truth files and
// a provided-regions manifest `regions.txt` into dir. Fully determined by
// the seed. Returns the generated set.
std::vector<CorpusFile> write_corpus(const std::string& dir, int count, std::uint32_t seed,
                                     const FrameParams& params = {});

// Manifest line for one frame: "name x y w h x y w h" (left box first).
std::string manifest_line(const CorpusFile& file);

} // namespace cecl::synth
