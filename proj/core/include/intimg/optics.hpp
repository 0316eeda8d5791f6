#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "intimg/field.hpp"

// All lengths are millimetres unless a name says otherwise; angles at the
// interface are degrees and are converted to radians once per plane.

namespace intimg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

enum class ApertureShape { ellipse, rectangle };
enum class ImagingMode { real_virtual, focused };

std::string to_string(ApertureShape shape);
std::string to_string(ImagingMode mode);

/// Lenslet-array geometry of an integral-imaging pickup/display system.
struct OpticalSystemConfig {
    int m = 16;                ///< lenslets along x
    int n = 16;                ///< lenslets along y
    double pitch_x_mm = 10.0;  ///< s_x
    double pitch_y_mm = 10.0;  ///< s_y
    double gap_mm = 50.0;      ///< g, display-to-lens distance
    double focal_length_mm = 35.0;
    double wavelength_nm = 550.0;
    ApertureShape aperture = ApertureShape::ellipse;
    double focus_epsilon = 1e-6;
    /// Replaces the lens-law focus distance when set.
    std::optional<double> z_i_override_mm;
    double power = 1.0;
    /// Restricts wavelength to [380, 780] nm in validate().
    bool visible_wavelength_only = true;

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    double wavelength_mm() const { return wavelength_nm * 1e-6; }
    ImagingMode mode() const;
};

/// Stable 64-bit FNV-1a digest (16 hex digits) of every field of the configuration.
std::string config_digest(const OpticalSystemConfig& cfg);

/// True when |1/f - 1/g| < epsilon / f.
bool is_focused(double f, double g, double epsilon = 1e-6);

/// Lens-law conjugate distance z_i with 1/z_i = 1/f - 1/g. Returns kInfinity in
/// the focused band and a negative (virtual) distance when g < f.
double image_distance(double f, double g, double epsilon = 1e-6);

/// z_i for a configuration, honouring z_i_override_mm.
double focus_distance(const OpticalSystemConfig& cfg);

/// Diffraction-limited waist w0 = 2.44 * lambda * z_i / pitch.
double waist_at_focus(double wavelength_mm, double z_i, double pitch);

/// Rayleigh range b = pi * w0^2 / (2 * lambda).
double rayleigh_range(double waist, double wavelength_mm);

/// Per-lenslet Gaussian-beam constants. In focused mode z_focus and the Rayleigh
/// ranges are infinite and the waist is the collimated half-width pitch/2.
struct BeamParameters {
    double z_focus = 0.0;
    double waist_x = 0.0;
    double waist_y = 0.0;
    double rayleigh_x = 0.0;
    double rayleigh_y = 0.0;
    double power = 1.0;

    bool collimated() const { return std::isinf(z_focus); }
};

BeamParameters make_beam(const OpticalSystemConfig& cfg);

/// w(z) = w0 * sqrt(1 + 4 ((z - z_i)/b)^2); returns w0 when z_i is infinite.
double beam_width(double z, double waist, double rayleigh, double z_focus);

struct BeamWidths {
    double x;
    double y;
};

BeamWidths beam_width(double z, const BeamParameters& beam);

struct PlaneGrid {
    double half_width_x_mm = 0.0;
    double half_width_y_mm = 0.0;
    double sample_pitch_mm = 0.0;
};

/// Reconstruction/analysis plane through (0, 0, D), tilted by theta_x about y and
/// theta_y about x.
struct TiltedPlaneSpec {
    double theta_x_deg = 0.0;
    double theta_y_deg = 0.0;
    double axial_offset_mm = 0.0;  ///< D
    PlaneGrid grid;

    void validate() const;

    /// Odd sample counts 2*round(half_width/pitch)+1, symmetric about the origin.
    std::size_t samples_x() const;
    std::size_t samples_y() const;

    /// Zero field with this plane's sampling.
    ScalarField2D make_field() const;
};

struct Point2 {
    double x;
    double y;
};

struct Point3 {
    double x;
    double y;
    double z;
};

/// Trigonometry of a tilted plane, evaluated once.
struct PlaneFrame {
    double cos_x;
    double sin_x;
    double cos_y;
    double sin_y;
    double depth;

    explicit PlaneFrame(const TiltedPlaneSpec& plane);

    Point3 to_global(double xt, double yt) const {
        return {xt * cos_x, yt * cos_y, xt * sin_x + yt * sin_y + depth};
    }
    double local_depth(double xt, double yt) const { return depth + xt * sin_x + yt * sin_y; }
};

Point3 tilted_to_global(double xt, double yt, const TiltedPlaneSpec& plane);

/// Lateral centre ((p - m/2) s_x, (q - n/2) s_y) of lenslet (p, q); m/2 is integer
/// division so lenslet (m/2, n/2) is on axis.
Point2 lenslet_center(int p, int q, const OpticalSystemConfig& cfg);

}  // namespace intimg
