#include "intimg/optics.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>

#include "intimg/error.hpp"

namespace intimg {
namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_positive(double v, const char* what) {
    if (!positive_finite(v)) {
        std::ostringstream os;
        os << what << " must be positive and finite (got " << v << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

std::string to_string(ApertureShape shape) {
    return shape == ApertureShape::ellipse ? "ellipse" : "rectangle";
}

std::string to_string(ImagingMode mode) {
    return mode == ImagingMode::focused ? "focused" : "real_virtual";
}

void OpticalSystemConfig::validate() const {
    std::ostringstream os;
    if (m < 1 || n < 1) os << "lens array must be at least 1x1 (got " << m << "x" << n << "); ";
    if (!positive_finite(pitch_x_mm) || !positive_finite(pitch_y_mm)) os << "pitches must be positive; ";
    if (!positive_finite(gap_mm)) os << "gap g must be positive; ";
    if (!positive_finite(focal_length_mm)) os << "focal length must be positive; ";
    if (!positive_finite(wavelength_nm)) {
        os << "wavelength must be positive; ";
    } else if (visible_wavelength_only && (wavelength_nm < 380.0 || wavelength_nm > 780.0)) {
        os << "wavelength " << wavelength_nm << " nm outside [380, 780] nm; ";
    }
    if (!(focus_epsilon > 0.0) || !std::isfinite(focus_epsilon)) os << "focus_epsilon must be positive; ";
    if (z_i_override_mm && (*z_i_override_mm == 0.0 || std::isnan(*z_i_override_mm)))
        os << "z_i override must be non-zero; ";
    if (!positive_finite(power)) os << "power must be positive; ";
    const std::string msg = os.str();
    if (!msg.empty()) throw ConfigError("invalid optical system: " + msg.substr(0, msg.size() - 2));
}

ImagingMode OpticalSystemConfig::mode() const {
    if (z_i_override_mm) return std::isinf(*z_i_override_mm) ? ImagingMode::focused : ImagingMode::real_virtual;
    return is_focused(focal_length_mm, gap_mm, focus_epsilon) ? ImagingMode::focused : ImagingMode::real_virtual;
}

std::string config_digest(const OpticalSystemConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << cfg.m << '|' << cfg.n << '|' << cfg.pitch_x_mm << '|' << cfg.pitch_y_mm << '|' << cfg.gap_mm << '|'
       << cfg.focal_length_mm << '|' << cfg.wavelength_nm << '|' << to_string(cfg.aperture) << '|'
       << cfg.focus_epsilon << '|' << (cfg.z_i_override_mm ? *cfg.z_i_override_mm : 0.0) << '|'
       << cfg.z_i_override_mm.has_value() << '|' << cfg.power;
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : os.str()) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

bool is_focused(double f, double g, double epsilon) {
    require_positive(f, "focal length");
    require_positive(g, "gap");
    return std::abs(1.0 / f - 1.0 / g) < epsilon * (1.0 / f);
}

double image_distance(double f, double g, double epsilon) {
    if (is_focused(f, g, epsilon)) return kInfinity;
    return 1.0 / (1.0 / f - 1.0 / g);
}

double focus_distance(const OpticalSystemConfig& cfg) {
    if (cfg.z_i_override_mm) return *cfg.z_i_override_mm;
    return image_distance(cfg.focal_length_mm, cfg.gap_mm, cfg.focus_epsilon);
}

double waist_at_focus(double wavelength_mm, double z_i, double pitch) {
    if (std::isinf(z_i)) throw FocusedModeError("waist_at_focus: z_i is infinite; use the collimated fallback");
    require_positive(wavelength_mm, "wavelength");
    require_positive(z_i, "focus distance");
    require_positive(pitch, "pitch");
    return 2.44 * wavelength_mm * z_i / pitch;
}

double rayleigh_range(double waist, double wavelength_mm) {
    require_positive(waist, "waist");
    require_positive(wavelength_mm, "wavelength");
    return std::numbers::pi * waist * waist / (2.0 * wavelength_mm);
}

BeamParameters make_beam(const OpticalSystemConfig& cfg) {
    cfg.validate();
    BeamParameters beam;
    beam.power = cfg.power;
    const double z_i = focus_distance(cfg);
    if (std::isinf(z_i)) {
        beam.z_focus = kInfinity;
        beam.waist_x = 0.5 * cfg.pitch_x_mm;
        beam.waist_y = 0.5 * cfg.pitch_y_mm;
        beam.rayleigh_x = kInfinity;
        beam.rayleigh_y = kInfinity;
        return beam;
    }
    const double lambda = cfg.wavelength_mm();
    // A virtual focus (g < f) sits behind the array; the waist scales with its distance.
    const double reach = std::abs(z_i);
    beam.z_focus = z_i;
    beam.waist_x = waist_at_focus(lambda, reach, cfg.pitch_x_mm);
    beam.waist_y = waist_at_focus(lambda, reach, cfg.pitch_y_mm);
    beam.rayleigh_x = rayleigh_range(beam.waist_x, lambda);
    beam.rayleigh_y = rayleigh_range(beam.waist_y, lambda);
    return beam;
}

double beam_width(double z, double waist, double rayleigh, double z_focus) {
    if (std::isinf(z_focus) || std::isinf(rayleigh)) return waist;
    const double u = (z - z_focus) / rayleigh;
    return waist * std::sqrt(1.0 + 4.0 * u * u);
}

BeamWidths beam_width(double z, const BeamParameters& beam) {
    return {beam_width(z, beam.waist_x, beam.rayleigh_x, beam.z_focus),
            beam_width(z, beam.waist_y, beam.rayleigh_y, beam.z_focus)};
}

void TiltedPlaneSpec::validate() const {
    std::ostringstream os;
    if (!(std::abs(theta_x_deg) < 90.0) || !(std::abs(theta_y_deg) < 90.0)) os << "tilt angles must satisfy |theta| < 90 deg; ";
    if (!positive_finite(axial_offset_mm)) os << "D must be positive; ";
    if (!positive_finite(grid.sample_pitch_mm)) os << "sample pitch must be positive; ";
    if (!(grid.half_width_x_mm >= 0.0) || !(grid.half_width_y_mm >= 0.0) || !std::isfinite(grid.half_width_x_mm) ||
        !std::isfinite(grid.half_width_y_mm))
        os << "grid half widths must be finite and non-negative; ";
    const std::string msg = os.str();
    if (!msg.empty()) throw ConfigError("invalid tilted plane: " + msg.substr(0, msg.size() - 2));
}

std::size_t TiltedPlaneSpec::samples_x() const {
    return 2 * static_cast<std::size_t>(std::llround(grid.half_width_x_mm / grid.sample_pitch_mm)) + 1;
}

std::size_t TiltedPlaneSpec::samples_y() const {
    return 2 * static_cast<std::size_t>(std::llround(grid.half_width_y_mm / grid.sample_pitch_mm)) + 1;
}

ScalarField2D TiltedPlaneSpec::make_field() const {
    validate();
    return ScalarField2D(samples_x(), samples_y(), grid.sample_pitch_mm);
}

PlaneFrame::PlaneFrame(const TiltedPlaneSpec& plane)
    : cos_x(std::cos(deg_to_rad(plane.theta_x_deg))),
      sin_x(std::sin(deg_to_rad(plane.theta_x_deg))),
      cos_y(std::cos(deg_to_rad(plane.theta_y_deg))),
      sin_y(std::sin(deg_to_rad(plane.theta_y_deg))),
      depth(plane.axial_offset_mm) {}

Point3 tilted_to_global(double xt, double yt, const TiltedPlaneSpec& plane) {
    return PlaneFrame(plane).to_global(xt, yt);
}

Point2 lenslet_center(int p, int q, const OpticalSystemConfig& cfg) {
    if (p < 0 || p >= cfg.m || q < 0 || q >= cfg.n) {
        std::ostringstream os;
        os << "lenslet index (" << p << ", " << q << ") outside " << cfg.m << "x" << cfg.n << " array";
        throw DomainError(os.str());
    }
    return {static_cast<double>(p - cfg.m / 2) * cfg.pitch_x_mm, static_cast<double>(q - cfg.n / 2) * cfg.pitch_y_mm};
}

}  // namespace intimg
