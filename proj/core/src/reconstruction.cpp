#include "intimg/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "intimg/convolution.hpp"
#include "intimg/error.hpp"
#include "intimg/log.hpp"
#include "intimg/parallel.hpp"
#include "intimg/psf.hpp"

namespace intimg {
namespace {

struct Lenslet {
    int p;
    int q;
    double cx;
    double cy;
};

std::vector<Lenslet> lenslets(const OpticalSystemConfig& cfg) {
    std::vector<Lenslet> out;
    out.reserve(static_cast<std::size_t>(cfg.m) * static_cast<std::size_t>(cfg.n));
    for (int p = 0; p < cfg.m; ++p)
        for (int q = 0; q < cfg.n; ++q) {
            const Point2 c = lenslet_center(p, q, cfg);
            out.push_back({p, q, c.x, c.y});
        }
    return out;
}

bool covers(const ElementalImageSet& eis, double du, double dv) {
    const double hw = 0.5 * eis.width_mm();
    const double hh = 0.5 * eis.height_mm();
    return du >= -hw && du < hw && dv >= -hh && dv < hh;
}

// Sum over lenslets of the back-projected intensity at global point (x, y, z).
// Shared by the tilted and normal-view paths so both evaluate identical arithmetic.
double backproject_point(const ElementalImageSet& eis, const std::vector<Lenslet>& lens, double x, double y, double z,
                         double gap, bool& seen) {
    const double mag = z / gap;
    const double spread = 1.0 + 1.0 / mag;
    const double axial = z + gap;
    double acc = 0.0;
    for (const Lenslet& l : lens) {
        const double dx = x - l.cx;
        const double dy = y - l.cy;
        const double du = -dx / mag;
        const double dv = -dy / mag;
        if (!covers(eis, du, dv)) continue;
        seen = true;
        const double value = eis.sample(l.p, l.q, du, dv);
        acc += value / (axial * axial + (dx * dx + dy * dy) * (spread * spread));
    }
    return acc;
}

void require_front_half_space(const TiltedPlaneSpec& plane, const ScalarField2D& field, double gap) {
    const double xs[] = {field.x(0), field.x(field.nx() - 1)};
    const double ys[] = {field.y(0), field.y(field.ny() - 1)};
    for (const double x : xs)
        for (const double y : ys) magnification(x, y, plane, gap);
}

void warn_no_overlap() {
    log::warn("no elemental image sees the reconstruction plane; returning a zero field");
}

}  // namespace

ElementalImageSet ElementalImageSet::blank(const OpticalSystemConfig& cfg, int pixels_x, int pixels_y,
                                           double pixel_pitch_mm) {
    cfg.validate();
    if (pixels_x < 1 || pixels_y < 1) throw ConfigError("elemental images need at least one pixel");
    ElementalImageSet eis;
    eis.capture_config = cfg;
    eis.pixels_x = pixels_x;
    eis.pixels_y = pixels_y;
    eis.pixel_pitch_mm = pixel_pitch_mm;
    eis.images.assign(static_cast<std::size_t>(cfg.m) * static_cast<std::size_t>(cfg.n),
                      ScalarField2D(static_cast<std::size_t>(pixels_x), static_cast<std::size_t>(pixels_y), pixel_pitch_mm));
    eis.validate();
    return eis;
}

void ElementalImageSet::validate() const {
    capture_config.validate();
    std::ostringstream os;
    if (pixels_x < 1 || pixels_y < 1) os << "pixel counts must be positive; ";
    if (!(pixel_pitch_mm > 0.0)) os << "pixel pitch must be positive; ";
    const double tol = 1e-9;
    if (width_mm() > capture_config.pitch_x_mm * (1.0 + tol) || height_mm() > capture_config.pitch_y_mm * (1.0 + tol))
        os << "elemental image " << width_mm() << " x " << height_mm() << " mm overlaps its neighbours (pitch "
           << capture_config.pitch_x_mm << " x " << capture_config.pitch_y_mm << " mm); ";
    const std::size_t expected = static_cast<std::size_t>(capture_config.m) * static_cast<std::size_t>(capture_config.n);
    if (images.size() != expected) {
        os << "expected " << expected << " elemental images, found " << images.size() << "; ";
    } else {
        for (std::size_t k = 0; k < images.size(); ++k) {
            const ScalarField2D& im = images[k];
            if (im.nx() != static_cast<std::size_t>(pixels_x) || im.ny() != static_cast<std::size_t>(pixels_y)) {
                os << "image " << k << " has size " << im.nx() << "x" << im.ny() << "; ";
                break;
            }
            if (im.min() < 0.0) {
                os << "image " << k << " has negative intensity; ";
                break;
            }
        }
    }
    const std::string msg = os.str();
    if (!msg.empty()) throw ConfigError("invalid elemental image set: " + msg.substr(0, msg.size() - 2));
}

std::size_t ElementalImageSet::index(int p, int q) const {
    if (p < 0 || p >= capture_config.m || q < 0 || q >= capture_config.n)
        throw DomainError("elemental image index out of range");
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(capture_config.n) + static_cast<std::size_t>(q);
}

double ElementalImageSet::sample(int p, int q, double du, double dv) const {
    if (!covers(*this, du, dv)) return 0.0;
    const ScalarField2D& im = image(p, q);
    const double fx = std::clamp(du / pixel_pitch_mm + 0.5 * (pixels_x - 1), 0.0, static_cast<double>(pixels_x - 1));
    const double fy = std::clamp(dv / pixel_pitch_mm + 0.5 * (pixels_y - 1), 0.0, static_cast<double>(pixels_y - 1));
    const auto x0 = static_cast<std::size_t>(fx);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t x1 = std::min(x0 + 1, static_cast<std::size_t>(pixels_x - 1));
    const std::size_t y1 = std::min(y0 + 1, static_cast<std::size_t>(pixels_y - 1));
    const double tx = fx - static_cast<double>(x0);
    const double ty = fy - static_cast<double>(y0);
    return (1.0 - ty) * ((1.0 - tx) * im(x0, y0) + tx * im(x1, y0)) + ty * ((1.0 - tx) * im(x0, y1) + tx * im(x1, y1));
}

std::string to_string(ReconstructionMode mode) {
    return mode == ReconstructionMode::diffraction ? "diffraction" : "geometric";
}

ReconstructionMode reconstruction_mode_from_string(const std::string& name) {
    if (name == "geometric") return ReconstructionMode::geometric;
    if (name == "diffraction") return ReconstructionMode::diffraction;
    throw ConfigError("unknown reconstruction mode '" + name + "' (expected geometric or diffraction)");
}

double magnification(double xt, double yt, const TiltedPlaneSpec& plane, double gap) {
    if (!(gap > 0.0)) throw DomainError("magnification: gap must be positive");
    const double z = PlaneFrame(plane).local_depth(xt, yt);
    if (!(z > 0.0)) {
        std::ostringstream os;
        os << "plane point (" << xt << ", " << yt << ") lies at depth " << z << " mm, behind the lens array";
        throw DomainError(os.str());
    }
    return z / gap;
}

Reconstruction backproject_geometric(const ElementalImageSet& eis, const TiltedPlaneSpec& plane, unsigned workers) {
    eis.validate();
    Reconstruction rec{plane, plane.make_field(), ReconstructionMode::geometric, true};
    ScalarField2D& field = rec.field;
    const double gap = eis.capture_config.gap_mm;
    require_front_half_space(plane, field, gap);

    const PlaneFrame frame(plane);
    const std::vector<Lenslet> lens = lenslets(eis.capture_config);
    std::vector<char> row_seen(field.ny(), 0);
    parallel_for(field.ny(), workers, [&](std::size_t j) {
        const double yt = field.y(j);
        bool seen = false;
        for (std::size_t i = 0; i < field.nx(); ++i) {
            const Point3 g = frame.to_global(field.x(i), yt);
            field(i, j) = backproject_point(eis, lens, g.x, g.y, g.z, gap, seen);
        }
        row_seen[j] = seen ? 1 : 0;
    });
    rec.overlap = std::any_of(row_seen.begin(), row_seen.end(), [](char c) { return c != 0; });
    if (!rec.overlap) warn_no_overlap();
    return rec;
}

ScalarField2D backproject_normal(const ElementalImageSet& eis, double depth, const PlaneGrid& grid, unsigned workers) {
    eis.validate();
    const TiltedPlaneSpec plane{0.0, 0.0, depth, grid};
    ScalarField2D field = plane.make_field();
    const double gap = eis.capture_config.gap_mm;
    const std::vector<Lenslet> lens = lenslets(eis.capture_config);
    parallel_for(field.ny(), workers, [&](std::size_t j) {
        bool seen = false;
        for (std::size_t i = 0; i < field.nx(); ++i)
            field(i, j) = backproject_point(eis, lens, field.x(i), field.y(j), depth, gap, seen);
    });
    return field;
}

KernelSource impulse_kernel_source() {
    return [](double, double grid_pitch_mm) { return ScalarField2D(1, 1, grid_pitch_mm, 1.0); };
}

KernelSource physical_kernel_source(const OpticalSystemConfig& cfg) {
    const double z_i = focus_distance(cfg);
    return [cfg, z_i](double z_local, double grid_pitch_mm) {
        const PSFKernel psf = defocus_psf(cfg, z_local, z_i, 0.5 * grid_pitch_mm);
        return resample_kernel(psf.samples, grid_pitch_mm);
    };
}

StripLayout plan_strips(const TiltedPlaneSpec& plane, std::optional<double> strip_width_mm) {
    plane.validate();
    const PlaneFrame frame(plane);
    StripLayout layout;
    layout.slope = std::hypot(frame.sin_x, frame.sin_y);
    if (layout.slope < 1e-12) {
        layout.slope = 0.0;
        layout.centres = {0.0};
        return layout;
    }
    layout.dir_x = frame.sin_x / layout.slope;
    layout.dir_y = frame.sin_y / layout.slope;
    const double hx = 0.5 * static_cast<double>(plane.samples_x() - 1) * plane.grid.sample_pitch_mm;
    const double hy = 0.5 * static_cast<double>(plane.samples_y() - 1) * plane.grid.sample_pitch_mm;
    const double reach = std::abs(layout.dir_x) * hx + std::abs(layout.dir_y) * hy;
    const double shallowest = plane.axial_offset_mm - layout.slope * reach;
    if (!(shallowest > 0.0)) throw DomainError("tilted plane crosses behind the lens array");

    double width = strip_width_mm ? *strip_width_mm : 0.02 * shallowest / layout.slope;
    if (strip_width_mm && !(*strip_width_mm >= plane.grid.sample_pitch_mm))
        throw ConfigError("strip width must be at least the plane sample pitch");
    width = std::max(width, plane.grid.sample_pitch_mm);
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * reach / width)));
    layout.spacing = 2.0 * reach / static_cast<double>(count);
    layout.centres.resize(count);
    for (std::size_t k = 0; k < count; ++k) layout.centres[k] = -reach + (static_cast<double>(k) + 0.5) * layout.spacing;
    return layout;
}

ScalarField2D apply_diffraction(const ScalarField2D& contribution, const TiltedPlaneSpec& plane,
                                const OpticalSystemConfig& cfg, const DiffractionOptions& options) {
    if (contribution.nx() != plane.samples_x() || contribution.ny() != plane.samples_y())
        throw ConfigError("apply_diffraction: field does not match the plane grid");
    const StripLayout layout = plan_strips(plane, options.strip_width_mm);
    const KernelSource kernels = options.kernels ? options.kernels : physical_kernel_source(cfg);
    const double pitch = contribution.pitch();

    std::vector<ScalarField2D> blurred(layout.centres.size());
    parallel_for(blurred.size(), options.workers, [&](std::size_t k) {
        const double z_local = plane.axial_offset_mm + layout.slope * layout.centres[k];
        const ScalarField2D kernel = kernels(z_local, pitch);
        if (std::abs(kernel.pitch() - pitch) > 1e-9 * pitch)
            throw ConfigError("kernel source returned a kernel at the wrong sample pitch");
        blurred[k] = convolve_same(contribution, kernel);
    });
    if (blurred.size() == 1) return std::move(blurred.front());

    ScalarField2D out(contribution.nx(), contribution.ny(), pitch);
    const std::size_t last = blurred.size() - 1;
    for (std::size_t j = 0; j < out.ny(); ++j) {
        const double y = out.y(j);
        for (std::size_t i = 0; i < out.nx(); ++i) {
            const double s = out.x(i) * layout.dir_x + y * layout.dir_y;
            const double t = (s - layout.centres.front()) / layout.spacing;
            const auto k = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(last - 1)));
            const double frac = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
            const double a = blurred[k](i, j);
            const double b = blurred[k + 1](i, j);
            out(i, j) = a + frac * (b - a);
        }
    }
    return out;
}

Reconstruction reconstruct(const ElementalImageSet& eis, const TiltedPlaneSpec& plane, const ReconstructOptions& options) {
    Reconstruction rec = backproject_geometric(eis, plane, options.workers);
    if (options.mode == ReconstructionMode::geometric || !rec.overlap) {
        rec.mode = options.mode;
        return rec;
    }
    DiffractionOptions diff;
    diff.strip_width_mm = options.strip_width_mm;
    diff.kernels = options.impulse_psf ? impulse_kernel_source() : physical_kernel_source(eis.capture_config);
    diff.workers = options.workers;
    rec.field = apply_diffraction(rec.field, plane, eis.capture_config, diff);
    rec.mode = ReconstructionMode::diffraction;
    return rec;
}

}  // namespace intimg
