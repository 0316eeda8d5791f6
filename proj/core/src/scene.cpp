#include "intimg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "intimg/error.hpp"
#include "intimg/parallel.hpp"

namespace intimg {

double TexturedPlane::radiance(double x, double y) const {
    const double lx = x - center_x_mm;
    const double ly = y - center_y_mm;
    if (lx < -half_width_x_mm || lx >= half_width_x_mm || ly < -half_width_y_mm || ly >= half_width_y_mm) return 0.0;
    // Texel centres sit at ((i + 0.5) / width) of the extent; clamp at the border half-texel.
    const double fx = std::clamp((lx + half_width_x_mm) / (2.0 * half_width_x_mm) * static_cast<double>(width) - 0.5, 0.0,
                                 static_cast<double>(width - 1));
    const double fy = std::clamp((ly + half_width_y_mm) / (2.0 * half_width_y_mm) * static_cast<double>(height) - 0.5, 0.0,
                                 static_cast<double>(height - 1));
    const auto x0 = static_cast<std::size_t>(fx);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t x1 = std::min(x0 + 1, width - 1);
    const std::size_t y1 = std::min(y0 + 1, height - 1);
    const double tx = fx - static_cast<double>(x0);
    const double ty = fy - static_cast<double>(y0);
    const auto t = [&](std::size_t i, std::size_t j) { return texture[j * width + i]; };
    const double v = (1.0 - ty) * ((1.0 - tx) * t(x0, y0) + tx * t(x1, y0)) + ty * ((1.0 - tx) * t(x0, y1) + tx * t(x1, y1));
    return intensity_scale * v;
}

void Scene::validate() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < emitters.size(); ++k) {
        const PointEmitter& e = emitters[k];
        if (!(e.z_mm > 0.0) || !std::isfinite(e.z_mm)) os << "emitter " << k << " is not in front of the array; ";
        if (!(e.intensity >= 0.0) || !std::isfinite(e.intensity)) os << "emitter " << k << " has negative intensity; ";
        if (!std::isfinite(e.x_mm) || !std::isfinite(e.y_mm)) os << "emitter " << k << " has a non-finite position; ";
    }
    for (std::size_t k = 0; k < planes.size(); ++k) {
        const TexturedPlane& pl = planes[k];
        if (!(pl.z_mm > 0.0) || !std::isfinite(pl.z_mm)) os << "plane " << k << " is not in front of the array; ";
        if (!(pl.half_width_x_mm > 0.0) || !(pl.half_width_y_mm > 0.0)) os << "plane " << k << " has an empty extent; ";
        if (pl.width == 0 || pl.height == 0 || pl.texture.size() != pl.width * pl.height)
            os << "plane " << k << " texture size does not match " << pl.width << "x" << pl.height << "; ";
        if (!(pl.intensity_scale >= 0.0)) os << "plane " << k << " has negative intensity scale; ";
        if (std::any_of(pl.texture.begin(), pl.texture.end(), [](double v) { return !(v >= 0.0); }))
            os << "plane " << k << " texture has negative values; ";
    }
    const std::string msg = os.str();
    if (!msg.empty()) throw ConfigError("invalid scene: " + msg.substr(0, msg.size() - 2));
}

Scene Scene::scaled(double factor) const {
    Scene out = *this;
    for (PointEmitter& e : out.emitters) e.intensity *= factor;
    for (TexturedPlane& pl : out.planes) pl.intensity_scale *= factor;
    return out;
}

Scene point_source_scene(double depth, double intensity) {
    if (!(depth > 0.0)) throw DomainError("point_source_scene: D must be positive");
    Scene scene;
    scene.emitters.push_back({0.0, 0.0, depth, intensity});
    return scene;
}

CaptureResult capture(const Scene& scene, const OpticalSystemConfig& cfg, const CaptureSettings& settings) {
    scene.validate();
    cfg.validate();
    if (settings.pixels_x < 1 || settings.pixels_y < 1) throw ConfigError("capture: pixel counts must be positive");
    const double pitch = settings.pixel_pitch_mm > 0.0
                             ? settings.pixel_pitch_mm
                             : std::min(cfg.pitch_x_mm / settings.pixels_x, cfg.pitch_y_mm / settings.pixels_y);

    CaptureResult result{ElementalImageSet::blank(cfg, settings.pixels_x, settings.pixels_y, pitch), {}};
    ElementalImageSet& eis = result.images;
    const double gap = cfg.gap_mm;
    const double hw = 0.5 * eis.width_mm();
    const double hh = 0.5 * eis.height_mm();
    const int lens_count = cfg.m * cfg.n;
    std::vector<CaptureReport> reports(static_cast<std::size_t>(lens_count));

    parallel_for(static_cast<std::size_t>(lens_count), settings.workers, [&](std::size_t k) {
        const int p = static_cast<int>(k) / cfg.n;
        const int q = static_cast<int>(k) % cfg.n;
        const Point2 c = lenslet_center(p, q, cfg);
        ScalarField2D& im = eis.image(p, q);
        CaptureReport& rep = reports[k];

        for (const TexturedPlane& pl : scene.planes) {
            const double reach = pl.z_mm / gap;
            const double axial = pl.z_mm + gap;
            for (std::size_t j = 0; j < im.ny(); ++j) {
                const double dv = im.y(j);
                for (std::size_t i = 0; i < im.nx(); ++i) {
                    const double du = im.x(i);
                    // Ray from the pixel through the lenslet centre, inverted onto the plane.
                    const double x = c.x - du * reach;
                    const double y = c.y - dv * reach;
                    const double radiance = pl.radiance(x, y);
                    if (radiance == 0.0) continue;
                    const double ex = x - (c.x + du);
                    const double ey = y - (c.y + dv);
                    im(i, j) += radiance / (axial * axial + ex * ex + ey * ey);
                }
            }
        }

        for (const PointEmitter& e : scene.emitters) {
            const double du = -(e.x_mm - c.x) * gap / e.z_mm;
            const double dv = -(e.y_mm - c.y) * gap / e.z_mm;
            if (du < -hw || du >= hw || dv < -hh || dv >= hh) {
                ++rep.vignetted;
                continue;
            }
            const double axial = e.z_mm + gap;
            const double ex = e.x_mm - (c.x + du);
            const double ey = e.y_mm - (c.y + dv);
            const double value = e.intensity / (axial * axial + ex * ex + ey * ey);
            const double fx = std::clamp(du / pitch + 0.5 * (settings.pixels_x - 1), 0.0, static_cast<double>(settings.pixels_x - 1));
            const double fy = std::clamp(dv / pitch + 0.5 * (settings.pixels_y - 1), 0.0, static_cast<double>(settings.pixels_y - 1));
            const auto x0 = static_cast<std::size_t>(fx);
            const auto y0 = static_cast<std::size_t>(fy);
            const std::size_t x1 = std::min(x0 + 1, im.nx() - 1);
            const std::size_t y1 = std::min(y0 + 1, im.ny() - 1);
            const double tx = fx - static_cast<double>(x0);
            const double ty = fy - static_cast<double>(y0);
            im(x0, y0) += value * (1.0 - tx) * (1.0 - ty);
            im(x1, y0) += value * tx * (1.0 - ty);
            im(x0, y1) += value * (1.0 - tx) * ty;
            im(x1, y1) += value * tx * ty;
            ++rep.deposited;
        }
    });

    for (const CaptureReport& r : reports) {
        result.report.deposited += r.deposited;
        result.report.vignetted += r.vignetted;
    }
    return result;
}

}  // namespace intimg
