#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intimg/optics.hpp"
#include "intimg/reconstruction.hpp"
#include "intimg/resolution.hpp"
#include "intimg/scene.hpp"

namespace intimg {

struct PlaneBlock {
    /// One reconstruction per entry.
    std::vector<double> theta_x_deg{0.0};
    double theta_y_deg = 0.0;
    std::optional<double> depth_mm;
    /// Required by reconstruct; analyze picks a default grid when absent.
    std::optional<PlaneGrid> grid;
};

struct ScanBlock {
    ScanAxis axis = ScanAxis::x;
    double theta_min_deg = -40.0;
    double theta_max_deg = 40.0;
    int steps = 81;
    double threshold_ratio = 1.5;
};

struct CaptureBlock {
    int pixels_x = 100;
    int pixels_y = 100;
    double pixel_pitch_mm = 0.0;  ///< 0: largest pitch that fits one lens
};

struct ReconstructBlock {
    ReconstructionMode mode = ReconstructionMode::geometric;
    std::optional<double> strip_width_mm;
    bool impulse_psf = false;
};

struct IoBlock {
    std::filesystem::path output_dir = ".";
    std::optional<std::filesystem::path> scene;
    std::optional<std::filesystem::path> manifest;
};

/// Everything one CLI run needs. Every block is optional in the document.
struct RunConfig {
    OpticalSystemConfig optics;
    PlaneBlock plane;
    ScanBlock scan;
    CaptureBlock capture;
    ReconstructBlock reconstruct;
    IoBlock io;
    unsigned workers = 0;

    /// Throws ConfigError on inconsistent values (steps < 3, bad ranges, ...).
    void validate() const;
};

/// Parses a run configuration. Unknown keys and wrong types raise ConfigError;
/// relative io paths are resolved against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Scene document:
///   {"emitters": [{"x_mm", "y_mm", "z_mm", "intensity"}],
///    "planes": [{"z_mm", "center_x_mm", "center_y_mm", "half_width_x_mm", "half_width_y_mm",
///                "intensity_scale", one of "texture": {"width", "height", "values"},
///                "texture_file": "x.pgm", "checker": {"cells_x", "cells_y", "low", "high"}}]}
Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& path);

}  // namespace intimg
