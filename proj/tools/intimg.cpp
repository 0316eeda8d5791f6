// intimg: synthesise elemental images, analyse tilted-plane resolution and
// reconstruct tilted planes.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "intimg/error.hpp"
#include "intimg/log.hpp"
#include "intimg/manifest.hpp"
#include "intimg/reconstruction.hpp"
#include "intimg/report.hpp"
#include "intimg/resolution.hpp"
#include "intimg/run_config.hpp"
#include "intimg/scene.hpp"

namespace fs = std::filesystem;
using namespace intimg;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<int> workers;
};

RunConfig load_config(const CommonFlags& flags) {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : load_run_config(flags.config);
    if (!flags.out.empty()) cfg.io.output_dir = flags.out;
    if (flags.workers) {
        if (*flags.workers < 0) throw ConfigError("--workers must not be negative");
        cfg.workers = static_cast<unsigned>(*flags.workers);
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("-c,--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", flags.out, "output directory (overrides io.output_dir)");
    cmd->add_option("--workers", flags.workers, "worker threads, 0 = hardware concurrency");
}

std::string angle_tag(double deg) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", deg);
    return buf;
}

int run_synth(const CommonFlags& flags, const std::string& scene_flag) {
    RunConfig cfg = load_config(flags);
    if (!scene_flag.empty()) cfg.io.scene = scene_flag;
    cfg.validate();
    if (!cfg.io.scene) throw ConfigError("synth needs a scene (io.scene or --scene)");

    const Scene scene = load_scene(*cfg.io.scene);
    CaptureSettings settings{cfg.capture.pixels_x, cfg.capture.pixels_y, cfg.capture.pixel_pitch_mm, cfg.workers};
    const CaptureResult result = capture(scene, cfg.optics, settings);
    if (result.report.vignetted > 0)
        log::warn(std::to_string(result.report.vignetted) + " emitter projections fell outside their elemental image");
    save_elemental_images(result.images, cfg.io.output_dir);
    log::info("wrote " + std::to_string(result.images.images.size()) + " elemental images to " +
              cfg.io.output_dir.string());
    return 0;
}

struct AnalyzeFlags {
    std::optional<double> depth;
    std::optional<int> steps;
    std::optional<std::string> axis;
    std::optional<double> theta_min;
    std::optional<double> theta_max;
    std::optional<double> threshold;
};

int run_analyze(const CommonFlags& flags, const AnalyzeFlags& a) {
    RunConfig cfg = load_config(flags);
    if (a.depth) cfg.plane.depth_mm = *a.depth;
    if (a.steps) cfg.scan.steps = *a.steps;
    if (a.axis) cfg.scan.axis = scan_axis_from_string(*a.axis);
    if (a.theta_min) cfg.scan.theta_min_deg = *a.theta_min;
    if (a.theta_max) cfg.scan.theta_max_deg = *a.theta_max;
    if (a.threshold) cfg.scan.threshold_ratio = *a.threshold;
    cfg.validate();
    if (!cfg.plane.depth_mm) throw ConfigError("analyze needs plane.D_mm or --D-mm");

    ScanOptions options;
    options.grid = cfg.plane.grid;
    options.workers = cfg.workers;
    const ResolutionCurve curve = scan_resolution(cfg.optics, *cfg.plane.depth_mm, cfg.scan.axis,
                                                  cfg.scan.theta_min_deg, cfg.scan.theta_max_deg, cfg.scan.steps,
                                                  options);
    const FovResult fov = extract_fov(curve, cfg.scan.threshold_ratio);
    write_curve_csv(curve, cfg.io.output_dir / "resolution.csv");
    write_fov_json(fov, cfg.io.output_dir / "fov.json");
    log::info("minimum extent " + std::to_string(fov.min_extent_mm) + " mm at " +
              std::to_string(fov.theta_at_min_deg) + " deg");
    return 0;
}

struct ReconstructFlags {
    std::string manifest;
    std::optional<std::string> mode;
    std::vector<double> theta_x;
    std::optional<double> theta_y;
    std::optional<double> depth;
    std::optional<double> strip_width;
    std::optional<double> half_width;
    std::optional<double> sample_pitch;
    bool impulse_psf = false;
};

int run_reconstruct(const CommonFlags& flags, const ReconstructFlags& r) {
    RunConfig cfg = load_config(flags);
    if (!r.manifest.empty()) cfg.io.manifest = r.manifest;
    if (r.mode) cfg.reconstruct.mode = reconstruction_mode_from_string(*r.mode);
    if (!r.theta_x.empty()) cfg.plane.theta_x_deg = r.theta_x;
    if (r.theta_y) cfg.plane.theta_y_deg = *r.theta_y;
    if (r.depth) cfg.plane.depth_mm = *r.depth;
    if (r.strip_width) cfg.reconstruct.strip_width_mm = *r.strip_width;
    if (r.impulse_psf) cfg.reconstruct.impulse_psf = true;
    if (r.half_width || r.sample_pitch) {
        PlaneGrid grid = cfg.plane.grid.value_or(PlaneGrid{});
        if (r.half_width) grid.half_width_x_mm = grid.half_width_y_mm = *r.half_width;
        if (r.sample_pitch) grid.sample_pitch_mm = *r.sample_pitch;
        cfg.plane.grid = grid;
    }
    cfg.validate();
    if (!cfg.io.manifest) throw ConfigError("reconstruct needs a manifest (io.manifest or --manifest)");
    if (!cfg.plane.depth_mm) throw ConfigError("reconstruct needs plane.D_mm or --D-mm");
    if (!cfg.plane.grid) throw ConfigError("reconstruct needs a plane grid (half widths and sample pitch)");

    ElementalImageSet eis = load_elemental_images(*cfg.io.manifest);
    // Geometry comes from the manifest; optical details it does not record come from the config.
    eis.capture_config.aperture = cfg.optics.aperture;
    eis.capture_config.focus_epsilon = cfg.optics.focus_epsilon;
    eis.capture_config.power = cfg.optics.power;
    if (!eis.capture_config.z_i_override_mm) eis.capture_config.z_i_override_mm = cfg.optics.z_i_override_mm;

    ReconstructOptions options;
    options.mode = cfg.reconstruct.mode;
    options.strip_width_mm = cfg.reconstruct.strip_width_mm;
    options.impulse_psf = cfg.reconstruct.impulse_psf;
    options.workers = cfg.workers;

    const bool sweep = cfg.plane.theta_x_deg.size() > 1;
    for (const double theta_x : cfg.plane.theta_x_deg) {
        TiltedPlaneSpec plane{theta_x, cfg.plane.theta_y_deg, *cfg.plane.depth_mm, *cfg.plane.grid};
        const Reconstruction rec = reconstruct(eis, plane, options);
        const std::string stem = sweep ? "recon_tx" + angle_tag(theta_x) : "recon";
        write_reconstruction(rec, cfg.io.output_dir / stem);
        log::info("wrote " + (cfg.io.output_dir / stem).string() + ".pgm");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integral-imaging tilted-plane analysis and reconstruction"};
    app.require_subcommand(1);

    CommonFlags synth_flags;
    std::string scene;
    auto* synth = app.add_subcommand("synth", "capture elemental images of a synthetic scene");
    add_common(synth, synth_flags);
    synth->add_option("--scene", scene, "scene JSON (overrides io.scene)")->check(CLI::ExistingFile);

    CommonFlags analyze_flags;
    AnalyzeFlags af;
    auto* analyze = app.add_subcommand("analyze", "radial extent versus tilt and field of view");
    add_common(analyze, analyze_flags);
    analyze->add_option("--D-mm", af.depth, "plane depth");
    analyze->add_option("--steps", af.steps, "number of scan angles");
    analyze->add_option("--axis", af.axis, "x, y or diagonal");
    analyze->add_option("--theta-min-deg", af.theta_min);
    analyze->add_option("--theta-max-deg", af.theta_max);
    analyze->add_option("--threshold-ratio", af.threshold);

    CommonFlags rec_flags;
    ReconstructFlags rf;
    auto* rec = app.add_subcommand("reconstruct", "reconstruct tilted planes from elemental images");
    add_common(rec, rec_flags);
    rec->add_option("--manifest", rf.manifest, "elemental image manifest (overrides io.manifest)");
    rec->add_option("--mode", rf.mode, "geometric or diffraction");
    rec->add_option("--theta-x-deg", rf.theta_x, "tilt about y; a comma list gives one image per angle")
        ->delimiter(',');
    rec->add_option("--theta-y-deg", rf.theta_y);
    rec->add_option("--D-mm", rf.depth, "plane depth");
    rec->add_option("--strip-width-mm", rf.strip_width);
    rec->add_option("--half-width-mm", rf.half_width, "square plane half width");
    rec->add_option("--sample-pitch-mm", rf.sample_pitch);
    rec->add_flag("--impulse-psf", rf.impulse_psf, "replace the physical PSF by a discrete impulse");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return run_synth(synth_flags, scene);
        if (analyze->parsed()) return run_analyze(analyze_flags, af);
        return run_reconstruct(rec_flags, rf);
    } catch (const ConfigError& e) {
        std::cerr << "intimg: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "intimg: " << e.what() << '\n';
        return 1;
    }
}
