#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "intimg/field.hpp"
#include "intimg/optics.hpp"

namespace intimg {

/// m x n grid of elemental images recorded behind the lens array.
///
/// Image (p, q) is centred on the lenslet axis (c_p, c_q) of the display plane;
/// its pixel (i, j) lies at (c_p + x(i), c_q + y(j)) using the centred
/// ScalarField2D convention with pitch pixel_pitch_mm.
struct ElementalImageSet {
    OpticalSystemConfig capture_config;
    double pixel_pitch_mm = 0.0;
    int pixels_x = 0;
    int pixels_y = 0;
    /// Lexicographic (p, q): index p * n + q.
    std::vector<ScalarField2D> images;

    /// Allocates m*n zero images.
    static ElementalImageSet blank(const OpticalSystemConfig& cfg, int pixels_x, int pixels_y, double pixel_pitch_mm);

    /// Throws ConfigError on missing images, size mismatch, negative intensity or
    /// images wider than one lens pitch.
    void validate() const;

    ScalarField2D& image(int p, int q) { return images.at(index(p, q)); }
    const ScalarField2D& image(int p, int q) const { return images.at(index(p, q)); }

    /// Bilinear sample of image (p, q) at display-plane offset (du, dv) from the
    /// lenslet axis; zero outside [-W/2, W/2) x [-H/2, H/2).
    double sample(int p, int q, double du, double dv) const;

    double width_mm() const { return pixels_x * pixel_pitch_mm; }
    double height_mm() const { return pixels_y * pixel_pitch_mm; }

private:
    std::size_t index(int p, int q) const;
};

enum class ReconstructionMode { geometric, diffraction };

std::string to_string(ReconstructionMode mode);
ReconstructionMode reconstruction_mode_from_string(const std::string& name);

struct Reconstruction {
    TiltedPlaneSpec plane;
    ScalarField2D field;
    ReconstructionMode mode = ReconstructionMode::geometric;
    /// False when no elemental image sees any sample of the plane.
    bool overlap = true;
};

/// M = (D + xt sin(theta_x) + yt sin(theta_y)) / g. Throws DomainError when the
/// local depth is not positive.
double magnification(double xt, double yt, const TiltedPlaneSpec& plane, double gap);

/// Tilted-plane back-projection: every sample sums, in (p, q) order, the bilinear
/// lookup of I_pq at the inversely mapped display point divided by the squared
/// pixel-to-point distance.
Reconstruction backproject_geometric(const ElementalImageSet& eis, const TiltedPlaneSpec& plane, unsigned workers = 0);

/// Reference normal-view back-projection onto the plane z = depth, written in global
/// coordinates.
ScalarField2D backproject_normal(const ElementalImageSet& eis, double depth, const PlaneGrid& grid, unsigned workers = 0);

/// Returns the kernel (odd, centred, sampled at grid_pitch_mm) to use at local depth z.
using KernelSource = std::function<ScalarField2D(double z_local_mm, double grid_pitch_mm)>;

/// Discrete impulse; turns the diffraction path into the geometric one.
KernelSource impulse_kernel_source();

/// Defocus PSF of the lenslet aperture about focus_distance(cfg), resampled to the grid.
KernelSource physical_kernel_source(const OpticalSystemConfig& cfg);

struct DiffractionOptions {
    /// Width of the strips along the tilt direction; default keeps z_local within 2%
    /// per strip.
    std::optional<double> strip_width_mm;
    /// Defaults to physical_kernel_source.
    KernelSource kernels;
    unsigned workers = 0;
};

/// Strip partition used by apply_diffraction.
struct StripLayout {
    /// Unit direction of increasing z_local in plane coordinates (zero if untilted).
    double dir_x = 0.0;
    double dir_y = 0.0;
    /// dz_local / ds along that direction.
    double slope = 0.0;
    std::vector<double> centres;  ///< strip centres, coordinate s along dir
    double spacing = 0.0;
};

StripLayout plan_strips(const TiltedPlaneSpec& plane, std::optional<double> strip_width_mm);

/// Spatially varying defocus blur. The plane is cut into strips across the tilt
/// direction; each strip's kernel (evaluated at the strip-centre depth) convolves
/// the whole field, and outputs are cross-faded linearly between neighbouring
/// strip centres. A single strip is one global convolution.
ScalarField2D apply_diffraction(const ScalarField2D& contribution, const TiltedPlaneSpec& plane,
                                const OpticalSystemConfig& cfg, const DiffractionOptions& options = {});

struct ReconstructOptions {
    ReconstructionMode mode = ReconstructionMode::geometric;
    std::optional<double> strip_width_mm;
    /// Use a discrete impulse instead of the physical PSF in diffraction mode.
    bool impulse_psf = false;
    unsigned workers = 0;
};

/// Geometric mode is the back-projection alone. Diffraction mode blurs the
/// back-projected sum; the kernel has no (p, q) dependence, so by linearity this
/// equals blurring every elemental contribution before summation.
Reconstruction reconstruct(const ElementalImageSet& eis, const TiltedPlaneSpec& plane,
                           const ReconstructOptions& options = {});

}  // namespace intimg
