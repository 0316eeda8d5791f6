#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

#include "intimg/pgm.hpp"
#include "intimg/reconstruction.hpp"
#include "intimg/report.hpp"
#include "intimg/manifest.hpp"

namespace fs = std::filesystem;
using namespace intimg;

namespace {

const std::string kCli = INTIMG_CLI_PATH;
const fs::path kConfigs = INTIMG_CONFIG_DIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("intimg_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

std::size_t count_pgm(const fs::path& dir) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".pgm";
    return n;
}

// Small real/virtual setup shared by the synth/reconstruct checks.
fs::path make_elemental_images() {
    static const fs::path eis = [] {
        const fs::path dir = scratch("eis");
        CHECK(run("synth -c " + (kConfigs / "fig4_5_synth.json").string() + " -o " + dir.string()) == 0);
        return dir;
    }();
    return eis;
}

}  // namespace

TEST_CASE("synth writes one image per lenslet and a manifest") {
    const fs::path dir = make_elemental_images();
    CHECK(count_pgm(dir) == 256);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "e_15_15.pgm"));
}

TEST_CASE("synth output is byte-identical between runs") {
    const fs::path a = make_elemental_images();
    const fs::path b = scratch("eis_again");
    REQUIRE(run("synth -c " + (kConfigs / "fig4_5_synth.json").string() + " -o " + b.string() + " --workers 3") == 0);
    CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));
    CHECK(read_file(a / "e_07_09.pgm") == read_file(b / "e_07_09.pgm"));
}

TEST_CASE("analyze writes a curve with one row per step") {
    const fs::path out = scratch("analyze");
    REQUIRE(run("analyze -c " + (kConfigs / "fig2a_analyze.json").string() + " -o " + out.string() +
                " --steps 9") == 0);
    CHECK(count_lines(out / "resolution.csv") == 10);
    CHECK(read_file(out / "resolution.csv").rfind("theta_x_deg,theta_y_deg,radial_extent_mm\n", 0) == 0);
    CHECK(fs::exists(out / "fov.json"));
}

TEST_CASE("focused analyze keeps the whole scan inside the field of view") {
    const fs::path out = scratch("analyze_focused");
    REQUIRE(run("analyze -c " + (kConfigs / "fig3a_analyze.json").string() + " -o " + out.string() +
                " --steps 21") == 0);
    const std::string fov = read_file(out / "fov.json");
    // open-ended on both sides of a +-50 deg scan
    CHECK(fov.find("\"fov_positive_deg\": null") != std::string::npos);
    CHECK(fov.find("\"fov_negative_deg\": null") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 2") {
    CHECK(run("analyze -c " + (kConfigs / "fig2a_analyze.json").string() + " --steps 0") == 2);
    CHECK(run("analyze --bogus-flag") == 2);
    CHECK(run("") == 2);
    const fs::path dir = scratch("badcfg");
    std::ofstream(dir / "c.json") << R"({"optics": {"m": 4, "unknown_key": 1}})";
    CHECK(run("analyze -c " + (dir / "c.json").string() + " --D-mm 100") == 2);
}

TEST_CASE("runtime errors exit with 1") {
    const fs::path dir = scratch("missing");
    fs::copy(make_elemental_images(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    fs::remove(dir / "e_03_04.pgm");
    CHECK(run("reconstruct --manifest " + (dir / "manifest.json").string() +
              " --D-mm 400 --half-width-mm 10 --sample-pitch-mm 0.5 -o " + (dir / "out").string()) == 1);
    // a 70 deg plane at 100 mm reaches behind the array
    CHECK(run("reconstruct --manifest " + (make_elemental_images() / "manifest.json").string() +
              " --D-mm 100 --theta-x-deg 70 --half-width-mm 200 --sample-pitch-mm 5 -o " +
              (dir / "out2").string()) == 1);
}

TEST_CASE("untilted CLI reconstruction matches the normal-view path") {
    const fs::path eis_dir = make_elemental_images();
    const fs::path out = scratch("recon0");
    REQUIRE(run("reconstruct --manifest " + (eis_dir / "manifest.json").string() +
                " --D-mm 400 --half-width-mm 20 --sample-pitch-mm 0.5 --mode geometric -o " + out.string()) == 0);
    const ElementalImageSet eis = load_elemental_images(eis_dir / "manifest.json");
    const PlaneGrid grid{20.0, 20.0, 0.5};
    Reconstruction normal{TiltedPlaneSpec{0.0, 0.0, 400.0, grid}, backproject_normal(eis, 400.0, grid),
                          ReconstructionMode::geometric, true};
    const fs::path ref = out / "reference";
    write_reconstruction(normal, ref);
    CHECK(read_file(out / "recon.pgm") == read_file(out / "reference.pgm"));
}

TEST_CASE("diffraction sweep emits one image per angle") {
    const fs::path out = scratch("sweep");
    REQUIRE(run("reconstruct -c " + (kConfigs / "fig5_reconstruct.json").string() + " --manifest " +
                (make_elemental_images() / "manifest.json").string() +
                " --half-width-mm 15 --sample-pitch-mm 0.5 -o " + out.string()) == 0);
    CHECK(count_pgm(out) == 6);
    for (const char* t : {"0", "10", "12", "15", "17", "20"}) {
        CHECK(fs::exists(out / ("recon_tx" + std::string(t) + ".pgm")));
        CHECK(fs::exists(out / ("recon_tx" + std::string(t) + ".json")));
    }
    CHECK(read_file(out / "recon_tx12.json").find("\"mode\": \"diffraction\"") != std::string::npos);
}

TEST_CASE("impulse PSF flag reproduces geometric output") {
    const fs::path m = make_elemental_images() / "manifest.json";
    const fs::path geo = scratch("imp_geo");
    const fs::path dif = scratch("imp_dif");
    const std::string common = " --manifest " + m.string() +
                               " --D-mm 400 --theta-x-deg 0,17 --half-width-mm 15 --sample-pitch-mm 0.5";
    REQUIRE(run("reconstruct --mode geometric" + common + " -o " + geo.string()) == 0);
    REQUIRE(run("reconstruct --mode diffraction --impulse-psf" + common + " -o " + dif.string()) == 0);
    CHECK(read_file(geo / "recon_tx0.pgm") == read_file(dif / "recon_tx0.pgm"));
    CHECK(read_file(geo / "recon_tx17.pgm") == read_file(dif / "recon_tx17.pgm"));
}
