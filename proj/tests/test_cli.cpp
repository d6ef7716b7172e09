#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cecl/eval.hpp"
#include "cecl/pgm.hpp"
#include "cecl/synth.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace cecl;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path tmp = fs::path(CECL_TEST_TMP) / "cli";
    fs::create_directories(tmp);
    fs::path out_f = tmp / ("out" + std::to_string(counter) + ".txt");
    fs::path err_f = tmp / ("err" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = std::string(CECL_CLI_PATH) + " " + args + " >" + out_f.string() + " 2>" +
                      err_f.string();
    int rc = std::system(cmd.c_str());

    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_f);
    r.err = slurp(err_f);
    return r;
}

fs::path tmp_dir(const std::string& name) {
    fs::path dir = fs::path(CECL_TEST_TMP) / "cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// a small corpus shared by several cases, generated through the CLI itself
const fs::path& corpus() {
    static fs::path dir = [] {
        fs::path d = tmp_dir("corpus");
        RunResult r = run_cli("synth " + d.string() + " --count 10 --seed 5");
        REQUIRE(r.exit_code == 0);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("synth is deterministic and honors count 0") {
    fs::path a = tmp_dir("synth_a");
    fs::path b = tmp_dir("synth_b");
    CHECK(run_cli("synth " + a.string() + " --count 4 --seed 9").exit_code == 0);
    CHECK(run_cli("synth " + b.string() + " --count 4 --seed 9").exit_code == 0);
    for (const auto& entry : fs::directory_iterator(a))
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));

    fs::path empty = tmp_dir("synth_empty");
    RunResult r = run_cli("synth " + empty.string() + " --count 0");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(empty / "regions.txt"));

    CHECK(run_cli("synth " + a.string() + " --noise 0.5").exit_code == 2);
}

TEST_CASE("detect with provided regions prints centers near ground truth") {
    fs::path img = corpus() / "synth_0000.pgm";
    fs::path regions = corpus() / "regions.txt";
    RunResult r = run_cli("detect " + img.string() + " --regions " + regions.string());
    REQUIRE(r.exit_code == 0);

    std::istringstream out(r.out);
    int lx, ly, rx, ry;
    std::string ml, mr;
    REQUIRE((out >> lx >> ly >> rx >> ry >> ml >> mr));
    eval::GroundTruth gt = eval::load_eye_file((corpus() / "synth_0000.eye").string());
    CHECK(distance({lx, ly}, gt.left) <= 2.0);
    CHECK(distance({rx, ry}, gt.right) <= 2.0);
    CHECK(ml == "hough_min_intensity");
}

TEST_CASE("detect requires exactly one region source") {
    fs::path img = corpus() / "synth_0000.pgm";
    RunResult none = run_cli("detect " + img.string());
    CHECK(none.exit_code == 2);
    CHECK(none.err.find("error") != std::string::npos);

    RunResult both = run_cli("detect " + img.string() + " --regions r.txt --face-model f --eye-model e");
    CHECK(both.exit_code == 2);

    RunResult half = run_cli("detect " + img.string() + " --face-model only.xml");
    CHECK(half.exit_code == 2);
}

TEST_CASE("detect reports unreadable inputs as exit 3") {
    RunResult missing = run_cli("detect /nonexistent/img.pgm --regions " +
                                (corpus() / "regions.txt").string());
    CHECK(missing.exit_code == 3);

    // a non-cascade file as model
    fs::path bogus = tmp_dir("bogus") / "model.xml";
    std::ofstream(bogus) << "not a cascade\n";
    RunResult bad = run_cli("detect " + (corpus() / "synth_0000.pgm").string() +
                            " --face-model " + bogus.string() + " --eye-model " + bogus.string());
    CHECK(bad.exit_code == 3);
}

TEST_CASE("detect --annotate and --csv write loadable artifacts") {
    fs::path dir = tmp_dir("artifacts");
    fs::path ann = dir / "annotated.pgm";
    fs::path csv = dir / "row.csv";
    fs::path img = corpus() / "synth_0001.pgm";
    RunResult r = run_cli("detect " + img.string() + " --regions " +
                          (corpus() / "regions.txt").string() + " --annotate " + ann.string() +
                          " --csv " + csv.string());
    REQUIRE(r.exit_code == 0);

    GrayImage original = load_pgm_file(img.string());
    GrayImage annotated = load_pgm_file(ann.string());
    CHECK(annotated.width == original.width);
    CHECK(annotated.height == original.height);
    CHECK(annotated != original); // marks were burned in

    std::string row = slurp(csv);
    CHECK(row.find("filename,lx,ly,rx,ry,d_l,d_r,e_worst,e_best,e_avg,method_l,method_r") == 0);
    CHECK(row.find("synth_0001.pgm,") != std::string::npos);
}

TEST_CASE("detect with the shipped cascades on the shipped sample face") {
    fs::path img = fs::path(CECL_DATA_DIR) / "sample_face.pgm";
    RunResult r = run_cli("detect " + img.string() + " --face-model " +
                          testutil::data_path("haarcascade_face_basic.xml") + " --eye-model " +
                          testutil::data_path("haarcascade_eye_basic.xml"));
    REQUIRE(r.exit_code == 0);
    std::istringstream out(r.out);
    int lx, ly, rx, ry;
    REQUIRE((out >> lx >> ly >> rx >> ry));
    eval::GroundTruth gt = eval::load_eye_file(testutil::data_path("sample_face.eye"));
    CHECK(distance({lx, ly}, gt.left) <= 3.0);
    CHECK(distance({rx, ry}, gt.right) <= 3.0);
}

TEST_CASE("evaluate writes a stable report with monotone fractions") {
    fs::path dir = tmp_dir("reports");
    fs::path rep = dir / "report.txt";
    fs::path rep_csv = dir / "report.csv";
    fs::path per = dir / "per_image.csv";
    std::string base = "evaluate " + corpus().string() + " --regions " +
                       (corpus() / "regions.txt").string() + " --seed 4 --report " + rep.string() +
                       " --report-csv " + rep_csv.string() + " --csv " + per.string();
    RunResult r = run_cli(base);
    REQUIRE(r.exit_code == 0);

    // five fraction lines on stdout
    std::istringstream out(r.out);
    std::string line;
    int lines = 0;
    double prev = -1.0;
    while (std::getline(out, line)) {
        double t, f;
        REQUIRE(std::sscanf(line.c_str(), "%lf %lf", &t, &f) == 2);
        CHECK(f >= prev);
        prev = f;
        ++lines;
    }
    CHECK(lines == 5);

    std::string first = slurp(rep);
    CHECK(first.find("# t_b = 77") != std::string::npos);
    CHECK(slurp(per).find("filename,") == 0);

    // byte-stable on a second run
    RunResult again = run_cli(base);
    REQUIRE(again.exit_code == 0);
    CHECK(slurp(rep) == first);
    CHECK(again.out == r.out);

    fs::path empty = tmp_dir("empty_ds");
    CHECK(run_cli("evaluate " + empty.string() + " --regions x.txt").exit_code == 3);
}

TEST_CASE("tune prints a grid value and writes the fragment") {
    fs::path frag = tmp_dir("frag") / "tuned.cfg";
    RunResult r = run_cli("tune " + corpus().string() + " --regions " +
                          (corpus() / "regions.txt").string() + " --grid 52:13:117 --out " +
                          frag.string());
    REQUIRE(r.exit_code == 0);
    int tb = -1;
    REQUIRE(std::sscanf(r.out.c_str(), "t_b = %d", &tb) == 1);
    CHECK(tb >= 52);
    CHECK(tb <= 117);
    CHECK((tb - 52) % 13 == 0);
    CHECK(slurp(frag) == "t_b = " + std::to_string(tb) + "\n");

    RunResult single = run_cli("tune " + corpus().string() + " --regions " +
                               (corpus() / "regions.txt").string() + " --grid 88");
    REQUIRE(single.exit_code == 0);
    CHECK(single.out.find("t_b = 88") == 0);

    // the fragment feeds straight back into --config
    RunResult reuse = run_cli("detect " + (corpus() / "synth_0003.pgm").string() + " --regions " +
                              (corpus() / "regions.txt").string() + " --config " + frag.string());
    CHECK(reuse.exit_code == 0);

    CHECK(run_cli("tune " + corpus().string() + " --regions " +
                  (corpus() / "regions.txt").string() + " --grid 9:0:1").exit_code == 2);
}

TEST_CASE("szp prints one ROI per side and needs a regions file") {
    fs::path img = corpus() / "synth_0002.pgm";
    RunResult r = run_cli("szp " + img.string() + " --regions " +
                          (corpus() / "regions.txt").string());
    REQUIRE(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string side;
    Rect roi;
    REQUIRE((out >> side >> roi.x >> roi.y >> roi.w >> roi.h));
    CHECK(side == "left");
    REQUIRE((out >> side >> roi.x >> roi.y >> roi.w >> roi.h));
    CHECK(side == "right");

    CHECK(run_cli("szp " + img.string()).exit_code == 2);
}

TEST_CASE("evaluate runs the cascade path end to end") {
    // six face-pattern frames with ground truth, no provided regions
    fs::path dir = tmp_dir("cascade_ds");
    for (int i = 0; i < 6; ++i) {
        int f = 84 + 8 * i;
        synth::FaceFrame ff =
            synth::make_face_frame(220, 200, {40 + 6 * i, 36 + 4 * i, f, f});
        char name[32];
        std::snprintf(name, sizeof name, "face_%02d", i);
        save_pgm_file(ff.image, (dir / (std::string(name) + ".pgm")).string());
        std::ofstream eye(dir / (std::string(name) + ".eye"));
        eye << "#LX LY RX RY\n"
            << ff.left_center.x << " " << ff.left_center.y << " " << ff.right_center.x << " "
            << ff.right_center.y << "\n";
    }
    RunResult r = run_cli("evaluate " + dir.string() + " --face-model " +
                          testutil::data_path("haarcascade_face_basic.xml") + " --eye-model " +
                          testutil::data_path("haarcascade_eye_basic.xml") + " --grid 65:13:91");
    REQUIRE(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string line;
    int lines = 0;
    double first = -1.0;
    while (std::getline(out, line)) {
        double t, f;
        REQUIRE(std::sscanf(line.c_str(), "%lf %lf", &t, &f) == 2);
        if (first < 0) first = f;
        ++lines;
    }
    CHECK(lines == 5);
    CHECK(first >= 0.8); // detection plus localization lands within pupil scale
}

TEST_CASE("flags override the config file") {
    fs::path cfg = tmp_dir("cfg") / "bad_tb.cfg";
    std::ofstream(cfg) << "t_b = 300\n";
    fs::path img = corpus() / "synth_0000.pgm";
    std::string base = "detect " + img.string() + " --regions " +
                       (corpus() / "regions.txt").string() + " --config " + cfg.string();

    CHECK(run_cli(base).exit_code == 2);          // 300 is out of range
    CHECK(run_cli(base + " --t-b 90").exit_code == 0); // the flag wins

    CHECK(run_cli("detect " + img.string() + " --regions " + (corpus() / "regions.txt").string() +
                  " --set no_such_key=1").exit_code == 2);
}
