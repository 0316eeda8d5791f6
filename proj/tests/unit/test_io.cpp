#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "intimg/error.hpp"
#include "intimg/manifest.hpp"
#include "intimg/pgm.hpp"
#include "intimg/report.hpp"
#include "intimg/run_config.hpp"

using namespace intimg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("intimg_io_" + name);
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

}  // namespace

TEST_CASE("PGM round trip") {
    const fs::path dir = scratch("pgm");
    PgmImage wide{3, 2, 65535, {0, 1, 256, 40000, 65535, 7}};
    write_pgm(dir / "a.pgm", wide);
    const PgmImage back = read_pgm(dir / "a.pgm");
    CHECK(back.width == 3);
    CHECK(back.height == 2);
    CHECK(back.maxval == 65535);
    CHECK(back.pixels == wide.pixels);
    CHECK(read_file(dir / "a.pgm").substr(0, 15) == std::string("P5\n3 2\n65535\n\x00\x00", 15));

    PgmImage narrow{2, 2, 255, {0, 10, 200, 255}};
    write_pgm(dir / "b.pgm", narrow);
    CHECK(read_pgm(dir / "b.pgm").pixels == narrow.pixels);
    CHECK(fs::file_size(dir / "b.pgm") == std::string("P5\n2 2\n255\n").size() + 4);
}

TEST_CASE("PGM header comments are skipped") {
    const fs::path dir = scratch("pgm_comment");
    std::ofstream(dir / "c.pgm", std::ios::binary) << "P5\n# made by hand\n2 1\n255\n" << '\x05' << '\x09';
    CHECK(read_pgm(dir / "c.pgm").pixels == std::vector<std::uint16_t>{5, 9});
}

TEST_CASE("corrupt PGM is reported with the file name") {
    const fs::path dir = scratch("pgm_bad");
    std::ofstream(dir / "bad.pgm", std::ios::binary) << "P2\n2 2\n255\n1 2 3 4\n";
    try {
        read_pgm(dir / "bad.pgm");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("bad.pgm") != std::string::npos);
        CHECK(std::string(e.what()).find("P5") != std::string::npos);
    }
    std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n4 4\n255\nab";
    CHECK_THROWS_AS(read_pgm(dir / "short.pgm"), FormatError);
    CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), FormatError);
}

TEST_CASE("field to PGM keeps the highest y on top") {
    ScalarField2D f(2, 2, 1.0);
    f(0, 1) = 1.0;  // top-left in the file
    const PgmImage img = field_to_pgm(f, 65535.0);
    CHECK(img.pixels == std::vector<std::uint16_t>{65535, 0, 0, 0});
    const ScalarField2D back = pgm_to_field(img, 1.0, 65535.0);
    CHECK(back(0, 1) == 1.0);
    CHECK(back(0, 0) == 0.0);
}

TEST_CASE("manifest round trip") {
    const fs::path dir = scratch("manifest");
    OpticalSystemConfig cfg;
    cfg.m = 3;
    cfg.n = 2;
    cfg.z_i_override_mm = 360.0;
    ElementalImageSet eis = ElementalImageSet::blank(cfg, 7, 5, 0.25);
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> level(0, 65535);
    for (auto& im : eis.images)
        for (double& v : im.values()) v = level(rng);
    eis.images[0](0, 0) = 65535.0;  // peak maps to itself

    save_elemental_images(eis, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "e_02_01.pgm"));
    CHECK(elemental_image_name(7, 12) == "e_07_12.pgm");

    const ElementalImageSet back = load_elemental_images(dir / "manifest.json");
    CHECK(back.capture_config.m == 3);
    CHECK(back.capture_config.n == 2);
    CHECK(back.capture_config.z_i_override_mm == 360.0);
    CHECK(config_digest(back.capture_config) == config_digest(cfg));
    CHECK(back.pixel_pitch_mm == 0.25);
    CHECK(back.pixels_x == 7);
    CHECK(back.pixels_y == 5);
    for (std::size_t k = 0; k < eis.images.size(); ++k) {
        CHECK(back.images[k].same_geometry(eis.images[k]));
        CHECK(std::equal(back.images[k].values().begin(), back.images[k].values().end(),
                         eis.images[k].values().begin()));
    }
}

TEST_CASE("manifest keeps absolute intensity to 16-bit precision") {
    const fs::path dir = scratch("manifest_scale");
    OpticalSystemConfig cfg;
    cfg.m = cfg.n = 2;
    ElementalImageSet eis = ElementalImageSet::blank(cfg, 4, 4, 1.0);
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(0.0, 3e-6);
    for (auto& im : eis.images)
        for (double& v : im.values()) v = u(rng);
    save_elemental_images(eis, dir);
    const ElementalImageSet back = load_elemental_images(dir / "manifest.json");
    double peak = 0.0;
    for (const auto& im : eis.images) peak = std::max(peak, im.max());
    for (std::size_t k = 0; k < eis.images.size(); ++k)
        for (std::size_t t = 0; t < eis.images[k].size(); ++t)
            CHECK(std::abs(back.images[k].values()[t] - eis.images[k].values()[t]) <= 0.5 * peak / 65535.0 * 1.000001);
}

TEST_CASE("manifest errors") {
    const fs::path dir = scratch("manifest_bad");
    OpticalSystemConfig cfg;
    cfg.m = cfg.n = 2;
    save_elemental_images(ElementalImageSet::blank(cfg, 4, 4, 1.0), dir);

    fs::remove(dir / "e_01_00.pgm");
    CHECK_THROWS_AS(load_elemental_images(dir / "manifest.json"), FormatError);

    std::ofstream(dir / "e_01_00.pgm", std::ios::binary) << "JUNK";
    try {
        load_elemental_images(dir / "manifest.json");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("e_01_00.pgm") != std::string::npos);
    }

    std::string text = read_file(dir / "manifest.json");
    const auto at = text.find("\"images\"");
    std::ofstream(dir / "extra.json") << text.substr(0, at) << "\"colour\": 1, " << text.substr(at);
    CHECK_THROWS_AS(load_elemental_images(dir / "extra.json"), FormatError);
}

TEST_CASE("run config parsing") {
    const RunConfig cfg = parse_run_config(R"({
        "optics": {"m": 4, "n": 3, "pitch_x_mm": 2, "pitch_y_mm": 2, "g_mm": 5, "f_mm": 3.5,
                   "wavelength_nm": 633, "aperture": "rectangle", "z_i_override_mm": 12},
        "plane": {"theta_x_deg": [0, 10, 12], "D_mm": 12, "half_width_x_mm": 1,
                  "half_width_y_mm": 2, "sample_pitch_mm": 0.01},
        "scan": {"axis": "diagonal", "steps": 11},
        "capture": {"pixels_x": 20, "pixels_y": 10},
        "reconstruct": {"mode": "diffraction", "impulse_psf": true},
        "io": {"output_dir": "out", "manifest": "/abs/manifest.json"},
        "workers": 3
    })", "/base");
    CHECK(cfg.optics.m == 4);
    CHECK(cfg.optics.wavelength_nm == 633.0);
    CHECK(cfg.optics.aperture == ApertureShape::rectangle);
    CHECK(cfg.optics.z_i_override_mm == 12.0);
    CHECK(cfg.plane.theta_x_deg == std::vector<double>{0, 10, 12});
    CHECK(cfg.plane.grid->half_width_y_mm == 2.0);
    CHECK(cfg.scan.axis == ScanAxis::diagonal);
    CHECK(cfg.scan.steps == 11);
    CHECK(cfg.scan.threshold_ratio == 1.5);
    CHECK(cfg.capture.pixels_y == 10);
    CHECK(cfg.reconstruct.mode == ReconstructionMode::diffraction);
    CHECK(cfg.reconstruct.impulse_psf);
    CHECK(cfg.io.output_dir == fs::path("/base/out"));
    CHECK(*cfg.io.manifest == fs::path("/abs/manifest.json"));
    CHECK(cfg.workers == 3);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("run config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_run_config(R"({"optics": {"pitch_mm": 10}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"scan": {"steps": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"scan": {"steps": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"plane": {"half_width_x_mm": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"optics": {"aperture": "hexagon"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"scan": {"steps": 0}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"plane": {"D_mm": -5}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"optics": {"g_mm": 0}})").validate(), ConfigError);
}

TEST_CASE("scene parsing") {
    const fs::path dir = scratch("scene");
    write_pgm(dir / "tex.pgm", PgmImage{2, 2, 255, {255, 0, 0, 51}});
    const Scene s = parse_scene(R"({
        "emitters": [{"x_mm": 1, "z_mm": 100}, {"z_mm": 50, "intensity": 2}],
        "planes": [
            {"z_mm": 300, "half_width_x_mm": 10, "half_width_y_mm": 5, "checker": {"cells_x": 3, "cells_y": 2}},
            {"z_mm": 200, "half_width_x_mm": 1, "half_width_y_mm": 1, "texture": {"width": 2, "height": 1, "values": [0.5, 1]}},
            {"z_mm": 250, "half_width_x_mm": 1, "half_width_y_mm": 1, "texture_file": "tex.pgm", "intensity_scale": 4}
        ]})", dir);
    REQUIRE(s.emitters.size() == 2);
    CHECK(s.emitters[0].x_mm == 1.0);
    CHECK(s.emitters[0].intensity == 1.0);
    CHECK(s.emitters[1].intensity == 2.0);
    REQUIRE(s.planes.size() == 3);
    CHECK(s.planes[0].texture == std::vector<double>{0, 1, 0, 1, 0, 1});
    CHECK(s.planes[1].texture == std::vector<double>{0.5, 1.0});
    // file row 0 is the top (highest y): texel (0, 1) = 1, texel (1, 0) = 0.2
    CHECK(s.planes[2].texture == std::vector<double>{0.0, 0.2, 1.0, 0.0});
    CHECK(s.planes[2].intensity_scale == 4.0);

    CHECK_THROWS_AS(parse_scene(R"({"emitters": [{"z_mm": -1}]})"), ConfigError);
    CHECK_THROWS_AS(parse_scene(R"({"emitters": [{"z_mm": 1, "colour": 3}]})"), ConfigError);
    CHECK_THROWS_AS(parse_scene(R"({"planes": [{"z_mm": 1, "half_width_x_mm": 1, "half_width_y_mm": 1}]})"),
                    ConfigError);
}

TEST_CASE("curve CSV and FOV JSON") {
    ResolutionCurve c;
    c.samples = {{-1.0, 0.0, 0.123456789012345}, {0.0, 0.0, 0.1}, {1.0, 0.0, 0.2}};
    const std::string csv = curve_csv(c);
    CHECK(csv == "theta_x_deg,theta_y_deg,radial_extent_mm\n-1,0,0.123456789012\n0,0,0.1\n1,0,0.2\n");

    FovResult fov;
    fov.min_extent_mm = 0.1;
    fov.fov_positive_deg = 17.5;
    const std::string json = fov_json(fov);
    CHECK(json.find("\"fov_negative_deg\": null") != std::string::npos);
    CHECK(json.find("\"fov_positive_deg\": 17.5") != std::string::npos);
    CHECK(json.find("\"threshold_ratio\": 1.5") != std::string::npos);
}

TEST_CASE("reconstruction output files") {
    const fs::path dir = scratch("recon_out");
    Reconstruction rec{TiltedPlaneSpec{12.0, 0.0, 400.0, {1.0, 1.0, 0.5}}, ScalarField2D(5, 5, 0.5),
                       ReconstructionMode::diffraction, true};
    rec.field(2, 2) = 4.0;
    rec.field(1, 2) = 1.0;
    write_reconstruction(rec, dir / "r");
    const PgmImage img = read_pgm(dir / "r.pgm");
    CHECK(img.pixels[2 * 5 + 2] == 65535);
    CHECK(img.pixels[2 * 5 + 1] == 16384);
    const std::string side = read_file(dir / "r.json");
    CHECK(side.find("\"theta_x_deg\": 12.0") != std::string::npos);
    CHECK(side.find("\"D_mm\": 400.0") != std::string::npos);
    CHECK(side.find("\"sample_pitch_mm\": 0.5") != std::string::npos);
    CHECK(side.find("\"mode\": \"diffraction\"") != std::string::npos);
    CHECK(side.find("\"max_intensity\": 4.0") != std::string::npos);
}
