#include "intimg/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "intimg/error.hpp"
#include "intimg/parallel.hpp"

namespace intimg {
namespace {

/// Per-lenslet constants of one tilted-Gaussian contribution.
struct LensletTerm {
    double cos_x;
    double sin_x;
    double cos_y;
    double sin_y;
    double weight;  // 2P/(pi w0x w0y) * (D+g)^2 / d_pq^2
};

LensletTerm make_term(int p, int q, const PlaneFrame& frame, double theta_x_rad, double theta_y_rad,
                      const OpticalSystemConfig& cfg, const BeamParameters& beam) {
    const Point2 c = lenslet_center(p, q, cfg);
    const double depth = frame.depth;
    const double tx = theta_x_rad - std::atan(c.x / depth);
    const double ty = theta_y_rad - std::atan(c.y / depth);
    const double axial = depth + cfg.gap_mm;
    const double d = lenslet_pixel_distance(p, q, depth, cfg);
    const double peak = 2.0 * beam.power / (std::numbers::pi * beam.waist_x * beam.waist_y);
    return {std::cos(tx), std::sin(tx), std::cos(ty), std::sin(ty), peak * (axial * axial) / (d * d)};
}

double evaluate(const LensletTerm& t, double xt, double yt, double depth, const BeamParameters& beam) {
    const double z = depth + xt * t.sin_x + yt * t.sin_y;
    const BeamWidths w = beam_width(z, beam);
    const double ax = xt * t.cos_x / w.x;
    const double ay = yt * t.cos_y / w.y;
    return t.weight * (beam.waist_x / w.x) * (beam.waist_y / w.y) * std::exp(-2.0 * (ax * ax + ay * ay));
}

std::vector<LensletTerm> make_terms(const TiltedPlaneSpec& plane, const OpticalSystemConfig& cfg,
                                    const BeamParameters& beam) {
    const PlaneFrame frame(plane);
    const double tx = deg_to_rad(plane.theta_x_deg);
    const double ty = deg_to_rad(plane.theta_y_deg);
    std::vector<LensletTerm> terms;
    terms.reserve(static_cast<std::size_t>(cfg.m) * static_cast<std::size_t>(cfg.n));
    for (int p = 0; p < cfg.m; ++p)
        for (int q = 0; q < cfg.n; ++q) terms.push_back(make_term(p, q, frame, tx, ty, cfg, beam));
    return terms;
}

}  // namespace

LensletTilt lenslet_tilt(int p, int q, double depth, double theta_x_deg, double theta_y_deg,
                         const OpticalSystemConfig& cfg) {
    if (!(depth > 0.0)) throw DomainError("lenslet_tilt: D must be positive");
    const Point2 c = lenslet_center(p, q, cfg);
    return {theta_x_deg - rad_to_deg(std::atan(c.x / depth)), theta_y_deg - rad_to_deg(std::atan(c.y / depth))};
}

double lenslet_pixel_distance(int p, int q, double depth, const OpticalSystemConfig& cfg) {
    if (!(depth > 0.0)) throw DomainError("lenslet_pixel_distance: D must be positive");
    const Point2 c = lenslet_center(p, q, cfg);
    const double axial = depth + cfg.gap_mm;
    const double scale = axial / depth;
    return std::sqrt(axial * axial + scale * scale * (c.x * c.x + c.y * c.y));
}

double point_source_intensity(double xt, double yt, int p, int q, const TiltedPlaneSpec& plane,
                              const OpticalSystemConfig& cfg, const BeamParameters& beam) {
    const PlaneFrame frame(plane);
    const LensletTerm t =
        make_term(p, q, frame, deg_to_rad(plane.theta_x_deg), deg_to_rad(plane.theta_y_deg), cfg, beam);
    return evaluate(t, xt, yt, frame.depth, beam);
}

double narrowest_beam_on_plane(const TiltedPlaneSpec& plane, const OpticalSystemConfig& cfg,
                               const BeamParameters& beam) {
    if (beam.collimated()) return std::min(beam.waist_x, beam.waist_y);
    double narrowest = kInfinity;
    for (const LensletTerm& t : make_terms(plane, cfg, beam)) {
        const double reach = plane.grid.half_width_x_mm * std::abs(t.sin_x) + plane.grid.half_width_y_mm * std::abs(t.sin_y);
        const double lo = plane.axial_offset_mm - reach;
        const double hi = plane.axial_offset_mm + reach;
        const double z = std::clamp(beam.z_focus, lo, hi);
        const BeamWidths w = beam_width(z, beam);
        narrowest = std::min({narrowest, w.x, w.y});
    }
    return narrowest;
}

SpotProfile aggregate_spot(const TiltedPlaneSpec& plane, const OpticalSystemConfig& cfg, const BeamParameters& beam,
                           unsigned workers) {
    plane.validate();
    cfg.validate();
    const double narrowest = narrowest_beam_on_plane(plane, cfg, beam);
    const double required = 0.25 * narrowest;
    if (plane.grid.sample_pitch_mm > required) {
        std::ostringstream os;
        os << "analysis grid under-resolves the beam: sample pitch " << plane.grid.sample_pitch_mm
           << " mm exceeds the required " << required << " mm (a quarter of the narrowest beam width "
           << narrowest << " mm)";
        throw ConfigError(os.str());
    }

    SpotProfile spot{plane, plane.make_field(), plane.axial_offset_mm};
    const std::vector<LensletTerm> terms = make_terms(plane, cfg, beam);
    ScalarField2D& field = spot.intensity;
    const double depth = plane.axial_offset_mm;
    parallel_for(field.ny(), workers, [&](std::size_t j) {
        const double yt = field.y(j);
        for (std::size_t i = 0; i < field.nx(); ++i) {
            const double xt = field.x(i);
            double acc = 0.0;
            for (const LensletTerm& t : terms) acc += evaluate(t, xt, yt, depth, beam);
            field(i, j) = acc;
        }
    });
    return spot;
}

double radial_extent(const ScalarField2D& field) {
    double total = 0.0;
    double moment = 0.0;
    for (std::size_t j = 0; j < field.ny(); ++j) {
        const double y = field.y(j);
        for (std::size_t i = 0; i < field.nx(); ++i) {
            const double x = field.x(i);
            const double v = field(i, j);
            total += v;
            moment += (x * x + y * y) * v;
        }
    }
    if (!(total > 0.0)) throw DegenerateInputError("radial_extent: field has no positive intensity");
    return std::sqrt(moment / total);
}

double radial_extent(const SpotProfile& spot) { return radial_extent(spot.intensity); }

std::string to_string(ScanAxis axis) {
    switch (axis) {
        case ScanAxis::x: return "x";
        case ScanAxis::y: return "y";
        case ScanAxis::diagonal: return "diagonal";
    }
    return "x";
}

ScanAxis scan_axis_from_string(const std::string& name) {
    if (name == "x") return ScanAxis::x;
    if (name == "y") return ScanAxis::y;
    if (name == "diagonal") return ScanAxis::diagonal;
    throw ConfigError("unknown scan axis '" + name + "' (expected x, y or diagonal)");
}

double ResolutionCurve::swept_angle(std::size_t i) const {
    const ResolutionSample& s = samples.at(i);
    return axis == ScanAxis::y ? s.theta_y_deg : s.theta_x_deg;
}

PlaneGrid default_analysis_grid(const OpticalSystemConfig& cfg, const BeamParameters& beam, double depth,
                                double max_abs_theta_x_deg, double max_abs_theta_y_deg) {
    const double half_x_array = std::max(std::abs(lenslet_center(0, 0, cfg).x), std::abs(lenslet_center(cfg.m - 1, 0, cfg).x));
    const double half_y_array = std::max(std::abs(lenslet_center(0, 0, cfg).y), std::abs(lenslet_center(0, cfg.n - 1, cfg).y));
    const double oblique_x = std::min(deg_to_rad(std::abs(max_abs_theta_x_deg)) + std::atan(half_x_array / depth), deg_to_rad(80.0));
    const double oblique_y = std::min(deg_to_rad(std::abs(max_abs_theta_y_deg)) + std::atan(half_y_array / depth), deg_to_rad(80.0));

    const BeamWidths at_depth = beam_width(depth, beam);
    PlaneGrid grid;
    grid.half_width_x_mm = 6.0 * at_depth.x / std::cos(oblique_x);
    grid.half_width_y_mm = 6.0 * at_depth.y / std::cos(oblique_y);
    if (beam.collimated()) {
        grid.sample_pitch_mm = 0.1 * std::min(cfg.pitch_x_mm, cfg.pitch_y_mm);
    } else {
        // The tilted plane may pass through the waist even when D is defocused.
        grid.sample_pitch_mm = 0.2 * std::min(beam.waist_x, beam.waist_y);
    }
    return grid;
}

ResolutionCurve scan_resolution(const OpticalSystemConfig& cfg, double depth, ScanAxis axis, double theta_min_deg,
                                double theta_max_deg, int steps, const ScanOptions& options) {
    cfg.validate();
    if (steps < 3) throw ConfigError("scan_resolution: steps must be at least 3");
    if (!(theta_min_deg < theta_max_deg)) throw ConfigError("scan_resolution: theta_min must be below theta_max");
    if (theta_min_deg < -60.0 || theta_max_deg > 60.0) throw ConfigError("scan_resolution: tilt range must lie within +-60 deg");
    if (!(depth > 0.0)) throw ConfigError("scan_resolution: D must be positive");

    const BeamParameters beam = make_beam(cfg);
    const double extreme = std::max(std::abs(theta_min_deg), std::abs(theta_max_deg));
    const double ex = axis == ScanAxis::y ? 0.0 : extreme;
    const double ey = axis == ScanAxis::x ? 0.0 : extreme;
    const PlaneGrid grid = options.grid ? *options.grid : default_analysis_grid(cfg, beam, depth, ex, ey);

    ResolutionCurve curve;
    curve.axis = axis;
    curve.config_digest = config_digest(cfg);
    curve.samples.resize(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double theta = theta_min_deg + (theta_max_deg - theta_min_deg) * k / (steps - 1);
        ResolutionSample& s = curve.samples[static_cast<std::size_t>(k)];
        s.theta_x_deg = axis == ScanAxis::y ? 0.0 : theta;
        s.theta_y_deg = axis == ScanAxis::x ? 0.0 : theta;
    }

    parallel_for(curve.samples.size(), options.workers, [&](std::size_t k) {
        ResolutionSample& s = curve.samples[k];
        TiltedPlaneSpec plane{s.theta_x_deg, s.theta_y_deg, depth, grid};
        s.radial_extent_mm = radial_extent(aggregate_spot(plane, cfg, beam, 1));
    });
    return curve;
}

FovResult extract_fov(const ResolutionCurve& curve, double threshold_ratio) {
    if (curve.samples.empty()) throw DegenerateInputError("extract_fov: empty curve");
    if (!(threshold_ratio > 1.0)) throw ConfigError("extract_fov: threshold ratio must exceed 1");

    const auto& s = curve.samples;
    std::size_t imin = 0;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k].radial_extent_mm < s[imin].radial_extent_mm) imin = k;

    FovResult fov;
    fov.threshold_ratio = threshold_ratio;
    fov.min_extent_mm = s[imin].radial_extent_mm;
    fov.theta_at_min_deg = curve.swept_angle(imin);
    const double limit = threshold_ratio * fov.min_extent_mm;

    auto crossing = [&](std::size_t inner, std::size_t outer) {
        const double e0 = s[inner].radial_extent_mm;
        const double e1 = s[outer].radial_extent_mm;
        const double a0 = curve.swept_angle(inner);
        const double a1 = curve.swept_angle(outer);
        return a0 + (limit - e0) / (e1 - e0) * (a1 - a0);
    };

    for (std::size_t k = imin + 1; k < s.size(); ++k) {
        if (s[k].radial_extent_mm >= limit) {
            fov.fov_positive_deg = crossing(k - 1, k);
            break;
        }
    }
    for (std::size_t k = imin; k-- > 0;) {
        if (s[k].radial_extent_mm >= limit) {
            fov.fov_negative_deg = crossing(k + 1, k);
            break;
        }
    }
    return fov;
}

}  // namespace intimg
