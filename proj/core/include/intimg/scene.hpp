#pragma once

#include <cstddef>
#include <vector>

#include "intimg/optics.hpp"
#include "intimg/reconstruction.hpp"

namespace intimg {

struct PointEmitter {
    double x_mm = 0.0;
    double y_mm = 0.0;
    double z_mm = 0.0;
    double intensity = 1.0;
};

/// Fronto-parallel plane at depth z carrying a raster texture stretched over
/// [cx - hw_x, cx + hw_x] x [cy - hw_y, cy + hw_y]. Texel (i, j) of the raster is
/// texture[j * width + i], j increasing with y.
struct TexturedPlane {
    double z_mm = 0.0;
    double center_x_mm = 0.0;
    double center_y_mm = 0.0;
    double half_width_x_mm = 0.0;
    double half_width_y_mm = 0.0;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> texture;
    double intensity_scale = 1.0;

    /// Bilinear texture value at global (x, y); zero outside the extent.
    double radiance(double x, double y) const;
};

struct Scene {
    std::vector<PointEmitter> emitters;
    std::vector<TexturedPlane> planes;

    /// Throws ConfigError unless every z > 0 and every intensity >= 0.
    void validate() const;

    /// Copy with every intensity multiplied by `factor`.
    Scene scaled(double factor) const;
};

/// Single emitter of unit intensity at (0, 0, D).
Scene point_source_scene(double depth, double intensity = 1.0);

struct CaptureSettings {
    int pixels_x = 0;
    int pixels_y = 0;
    /// Defaults to the largest pitch that keeps each image within one lens pitch.
    double pixel_pitch_mm = 0.0;
    unsigned workers = 0;
};

struct CaptureReport {
    std::size_t deposited = 0;
    /// Emitter projections that fell outside their elemental image.
    std::size_t vignetted = 0;
};

struct CaptureResult {
    ElementalImageSet images;
    CaptureReport report;
};

/// Ideal pinhole pickup. An emitter at (x0, y0, z0) lands in image (p, q) at
/// u = c_p - (x0 - c_p) g / z0 and is splatted bilinearly with weight 1/r^2 (r the
/// emitter-to-pixel distance). Textured planes are sampled per pixel along the
/// ray through the lenslet centre, with the same 1/r^2 weight.
CaptureResult capture(const Scene& scene, const OpticalSystemConfig& cfg, const CaptureSettings& settings);

}  // namespace intimg
