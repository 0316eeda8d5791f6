#pragma once

#include <optional>
#include <string>
#include <vector>

#include "intimg/field.hpp"
#include "intimg/optics.hpp"

namespace intimg {

/// Intensity of the visualised on-axis point source over a tilted plane.
struct SpotProfile {
    TiltedPlaneSpec plane;
    ScalarField2D intensity;
    double source_depth_mm = 0.0;
};

/// Beam tilt of lenslet (p, q) relative to the plane normal, in degrees.
struct LensletTilt {
    double theta_x_deg;
    double theta_y_deg;
};

LensletTilt lenslet_tilt(int p, int q, double depth, double theta_x_deg, double theta_y_deg,
                         const OpticalSystemConfig& cfg);

/// Distance from the on-axis image point at depth D to the matching pixel of
/// elemental image (p, q): sqrt((D+g)^2 + ((D+g)/D)^2 (c_p^2 + c_q^2)).
double lenslet_pixel_distance(int p, int q, double depth, const OpticalSystemConfig& cfg);

/// Contribution of lenslet (p, q) to the visualised point source at tilted-plane
/// coordinates (xt, yt). The plane's axial offset is the source depth D. The
/// central lenslet at focus peaks at 2P / (pi w0x w0y); other lenslets fall off as
/// (D+g)^2 / d_pq^2.
double point_source_intensity(double xt, double yt, int p, int q, const TiltedPlaneSpec& plane,
                              const OpticalSystemConfig& cfg, const BeamParameters& beam);

/// Narrowest beam half-width reached anywhere on the plane grid.
double narrowest_beam_on_plane(const TiltedPlaneSpec& plane, const OpticalSystemConfig& cfg,
                               const BeamParameters& beam);

/// Sum of all lenslet contributions on the plane grid, reduced in lexicographic
/// (p, q) order for every sample. Throws ConfigError if the grid is coarser than a
/// quarter of the narrowest beam (real/virtual) or an eighth of the pitch (focused).
SpotProfile aggregate_spot(const TiltedPlaneSpec& plane, const OpticalSystemConfig& cfg,
                           const BeamParameters& beam, unsigned workers = 0);

/// sqrt( sum (x^2 + y^2) O / sum O ) over the whole grid, about the grid origin.
double radial_extent(const ScalarField2D& field);
double radial_extent(const SpotProfile& spot);

enum class ScanAxis { x, y, diagonal };

std::string to_string(ScanAxis axis);
ScanAxis scan_axis_from_string(const std::string& name);

struct ResolutionSample {
    double theta_x_deg;
    double theta_y_deg;
    double radial_extent_mm;
};

struct ResolutionCurve {
    ScanAxis axis = ScanAxis::x;
    std::vector<ResolutionSample> samples;
    std::string config_digest;

    /// Swept angle of sample i (theta_y for a y scan, theta_x otherwise).
    double swept_angle(std::size_t i) const;
};

/// Grid used by scan_resolution when none is supplied: half widths of six times the
/// widest expected footprint at the most oblique lenslet, pitch a fifth of the
/// narrowest beam (real/virtual) or a tenth of the lens pitch (focused).
PlaneGrid default_analysis_grid(const OpticalSystemConfig& cfg, const BeamParameters& beam, double depth,
                                double max_abs_theta_x_deg, double max_abs_theta_y_deg);

struct ScanOptions {
    std::optional<PlaneGrid> grid;
    unsigned workers = 0;
};

/// Radial extent versus tilt along one axis; `steps` evenly spaced angles in
/// [theta_min, theta_max] (degrees), which must lie within +-60.
ResolutionCurve scan_resolution(const OpticalSystemConfig& cfg, double depth, ScanAxis axis, double theta_min_deg,
                                double theta_max_deg, int steps, const ScanOptions& options = {});

/// Field of view: the tilt range around the curve minimum where the extent stays
/// below threshold_ratio times the minimum. nullopt marks a side that never crosses.
struct FovResult {
    double threshold_ratio = 1.5;
    double min_extent_mm = 0.0;
    double theta_at_min_deg = 0.0;
    std::optional<double> fov_negative_deg;
    std::optional<double> fov_positive_deg;
};

FovResult extract_fov(const ResolutionCurve& curve, double threshold_ratio = 1.5);

}  // namespace intimg
