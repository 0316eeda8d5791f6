#include "intimg/psf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "fftw_support.hpp"
#include "intimg/error.hpp"

namespace intimg {
namespace {

double aperture_reach(const OpticalSystemConfig& cfg) {
    if (cfg.aperture == ApertureShape::rectangle) return 0.5 * std::hypot(cfg.pitch_x_mm, cfg.pitch_y_mm);
    return 0.5 * std::max(cfg.pitch_x_mm, cfg.pitch_y_mm);
}

double defocus_curvature(double z_local, double z_i) {
    return 1.0 / z_local - (std::isinf(z_i) ? 0.0 : 1.0 / z_i);
}

// Largest pupil pitch that keeps the defocus phase step below pi at the aperture rim.
double phase_limited_pitch(double wavelength, double curvature, double reach) {
    const double c = std::abs(curvature);
    return c > 0.0 ? wavelength / (2.0 * c * reach) : kInfinity;
}

bool inside_aperture(const OpticalSystemConfig& cfg, double u, double v) {
    const double ax = 0.5 * cfg.pitch_x_mm;
    const double ay = 0.5 * cfg.pitch_y_mm;
    if (cfg.aperture == ApertureShape::rectangle) return std::abs(u) <= ax && std::abs(v) <= ay;
    const double nu = u / ax;
    const double nv = v / ay;
    return nu * nu + nv * nv <= 1.0;
}

}  // namespace

PsfSampling choose_psf_sampling(const OpticalSystemConfig& cfg, double z_local, double z_i, double target_pitch_mm) {
    if (!(z_local > 0.0)) throw DomainError("choose_psf_sampling: z_local must be positive");
    if (!(target_pitch_mm > 0.0)) throw DomainError("choose_psf_sampling: target pitch must be positive");
    const double lambda = cfg.wavelength_mm();
    const double span = std::max(cfg.pitch_x_mm, cfg.pitch_y_mm);
    const double reach = aperture_reach(cfg);
    const double curvature = defocus_curvature(z_local, z_i);

    const double du = std::min(span / 64.0, 0.5 * phase_limited_pitch(lambda, curvature, reach));
    const double needed = std::max({128.0, std::ceil(2.0 * span / du), std::ceil(lambda * z_local / (du * target_pitch_mm))});
    if (needed > static_cast<double>(kMaxPsfTransform)) {
        std::ostringstream os;
        os << "defocus PSF at z_local = " << z_local << " mm needs a " << needed << "-point transform with pupil pitch "
           << du << " mm (limit " << kMaxPsfTransform << ")";
        throw SamplingError(os.str());
    }
    return {std::bit_ceil(static_cast<std::size_t>(needed)), du};
}

PSFKernel defocus_psf(const OpticalSystemConfig& cfg, double z_local, double z_i, std::size_t kernel_size,
                      double pupil_sample_pitch_mm) {
    cfg.validate();
    if (!(z_local > 0.0) || !std::isfinite(z_local)) throw DomainError("defocus_psf: z_local must be positive and finite");
    if (kernel_size < 128 || !std::has_single_bit(kernel_size))
        throw DomainError("defocus_psf: kernel size must be a power of two >= 128");
    if (!(pupil_sample_pitch_mm > 0.0)) throw DomainError("defocus_psf: pupil sample pitch must be positive");

    const std::size_t n = kernel_size;
    const double du = pupil_sample_pitch_mm;
    const double lambda = cfg.wavelength_mm();
    const double k = 2.0 * std::numbers::pi / lambda;
    const double curvature = defocus_curvature(z_local, z_i);
    const double reach = aperture_reach(cfg);
    const double span = std::max(cfg.pitch_x_mm, cfg.pitch_y_mm);

    if (du > phase_limited_pitch(lambda, curvature, reach)) {
        const double need = phase_limited_pitch(lambda, curvature, reach);
        std::ostringstream os;
        os << "defocus phase aliases: pupil sample pitch " << du << " mm exceeds " << need
           << " mm; use a pupil grid of at least " << std::bit_ceil(static_cast<std::size_t>(std::ceil(2.0 * span / need)))
           << " samples";
        throw SamplingError(os.str());
    }
    if (span > 0.5 * static_cast<double>(n) * du) {
        std::ostringstream os;
        os << "pupil of " << span << " mm does not fit half of the " << n << "-sample aperture plane at pitch " << du
           << " mm; need at least " << std::bit_ceil(static_cast<std::size_t>(std::ceil(2.0 * span / du))) << " samples";
        throw SamplingError(os.str());
    }

    // Pupil stored with u = 0 at index 0 so the transform is centred on the axis.
    auto buffer = detail::fftw_buffer<fftw_complex>(n * n);
    const auto centred = [n](std::size_t idx) {
        return idx < n / 2 ? static_cast<double>(idx) : static_cast<double>(idx) - static_cast<double>(n);
    };
    const double half_phase = 0.5 * k * curvature;
    for (std::size_t r = 0; r < n; ++r) {
        const double v = centred(r) * du;
        for (std::size_t c = 0; c < n; ++c) {
            const double u = centred(c) * du;
            fftw_complex& cell = buffer[r * n + c];
            if (inside_aperture(cfg, u, v)) {
                const double phase = half_phase * (u * u + v * v);
                cell[0] = std::cos(phase);
                cell[1] = std::sin(phase);
            } else {
                cell[0] = 0.0;
                cell[1] = 0.0;
            }
        }
    }
    {
        std::unique_lock lock(detail::fftw_planner_mutex());
        fftw_plan raw = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buffer.get(), buffer.get(),
                                         FFTW_FORWARD, FFTW_ESTIMATE);
        lock.unlock();
        detail::FftwPlan plan(raw);
        plan.execute();
    }

    std::vector<double> intensity(n * n);
    double peak = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const fftw_complex& cell = buffer[r * n + c];
            const double value = cell[0] * cell[0] + cell[1] * cell[1];
            // fftshift: frequency index c maps to column (c + n/2) mod n.
            intensity[((r + n / 2) % n) * n + (c + n / 2) % n] = value;
            peak = std::max(peak, value);
        }
    }

    const double threshold = kPsfCropFraction * peak;
    const std::ptrdiff_t centre = static_cast<std::ptrdiff_t>(n / 2);
    std::ptrdiff_t reach_x = 0, reach_y = 0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (intensity[r * n + c] >= threshold) {
                reach_x = std::max(reach_x, std::abs(static_cast<std::ptrdiff_t>(c) - centre));
                reach_y = std::max(reach_y, std::abs(static_cast<std::ptrdiff_t>(r) - centre));
            }
    reach_x = std::min(reach_x + 1, centre - 1);
    reach_y = std::min(reach_y + 1, centre - 1);

    const double out_pitch = lambda * z_local / (static_cast<double>(n) * du);
    PSFKernel kernel;
    kernel.samples = ScalarField2D(static_cast<std::size_t>(2 * reach_x + 1), static_cast<std::size_t>(2 * reach_y + 1), out_pitch);
    double total = 0.0;
    for (std::ptrdiff_t j = -reach_y; j <= reach_y; ++j)
        for (std::ptrdiff_t i = -reach_x; i <= reach_x; ++i) {
            const double value = intensity[static_cast<std::size_t>(centre + j) * n + static_cast<std::size_t>(centre + i)];
            kernel.samples(static_cast<std::size_t>(i + reach_x), static_cast<std::size_t>(j + reach_y)) = value;
            total += value;
        }
    kernel.samples.scale(1.0 / total);
    kernel.z_local_mm = z_local;
    kernel.defocus_distance_mm = std::isinf(z_i) ? -kInfinity : z_local - z_i;
    kernel.defocus_curvature_per_mm = curvature;
    kernel.transform_size = n;
    kernel.pupil_sample_pitch_mm = du;
    return kernel;
}

PSFKernel defocus_psf(const OpticalSystemConfig& cfg, double z_local, double z_i, double target_pitch_mm) {
    const PsfSampling s = choose_psf_sampling(cfg, z_local, z_i, target_pitch_mm);
    return defocus_psf(cfg, z_local, z_i, s.kernel_size, s.pupil_sample_pitch_mm);
}

ScalarField2D resample_kernel(const ScalarField2D& kernel, double grid_pitch_mm) {
    if (!(grid_pitch_mm > 0.0)) throw DomainError("resample_kernel: grid pitch must be positive");
    if (kernel.nx() % 2 == 0 || kernel.ny() % 2 == 0) throw DomainError("resample_kernel: kernel must have odd size");
    const double kp = kernel.pitch();

    ScalarField2D out;
    if (kp == grid_pitch_mm) {
        out = kernel;
    } else if (kp < grid_pitch_mm) {
        const double ratio = kp / grid_pitch_mm;
        const std::size_t hx = static_cast<std::size_t>(std::ceil(0.5 * static_cast<double>(kernel.nx() - 1) * ratio)) + 1;
        const std::size_t hy = static_cast<std::size_t>(std::ceil(0.5 * static_cast<double>(kernel.ny() - 1) * ratio)) + 1;
        out = ScalarField2D(2 * hx + 1, 2 * hy + 1, grid_pitch_mm);
        for (std::size_t j = 0; j < kernel.ny(); ++j) {
            const double gy = kernel.y(j) / grid_pitch_mm + static_cast<double>(hy);
            const double fy = std::floor(gy);
            const double ty = gy - fy;
            const auto y0 = static_cast<std::size_t>(fy);
            for (std::size_t i = 0; i < kernel.nx(); ++i) {
                const double v = kernel(i, j);
                if (v == 0.0) continue;
                const double gx = kernel.x(i) / grid_pitch_mm + static_cast<double>(hx);
                const double fx = std::floor(gx);
                const double tx = gx - fx;
                const auto x0 = static_cast<std::size_t>(fx);
                out(x0, y0) += v * (1.0 - tx) * (1.0 - ty);
                out(x0 + 1, y0) += v * tx * (1.0 - ty);
                out(x0, y0 + 1) += v * (1.0 - tx) * ty;
                out(x0 + 1, y0 + 1) += v * tx * ty;
            }
        }
    } else {
        const double ratio = kp / grid_pitch_mm;
        const auto hx = static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(kernel.nx() - 1) * ratio));
        const auto hy = static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(kernel.ny() - 1) * ratio));
        out = ScalarField2D(2 * hx + 1, 2 * hy + 1, grid_pitch_mm);
        const double cx = 0.5 * static_cast<double>(kernel.nx() - 1);
        const double cy = 0.5 * static_cast<double>(kernel.ny() - 1);
        for (std::size_t j = 0; j < out.ny(); ++j) {
            const double fy = out.y(j) / kp + cy;
            const auto y0 = static_cast<std::size_t>(std::floor(fy));
            const double ty = fy - std::floor(fy);
            const std::size_t y1 = std::min(y0 + 1, kernel.ny() - 1);
            for (std::size_t i = 0; i < out.nx(); ++i) {
                const double fx = out.x(i) / kp + cx;
                const auto x0 = static_cast<std::size_t>(std::floor(fx));
                const double tx = fx - std::floor(fx);
                const std::size_t x1 = std::min(x0 + 1, kernel.nx() - 1);
                out(i, j) = (1.0 - ty) * ((1.0 - tx) * kernel(x0, y0) + tx * kernel(x1, y0)) +
                            ty * ((1.0 - tx) * kernel(x0, y1) + tx * kernel(x1, y1));
            }
        }
    }
    const double total = out.sum();
    if (!(total > 0.0)) throw DegenerateInputError("resample_kernel: kernel has no energy");
    out.scale(1.0 / total);
    return out;
}

double encircled_energy_radius(const ScalarField2D& kernel, double fraction) {
    std::vector<std::pair<double, double>> rings;
    rings.reserve(kernel.size());
    double total = 0.0;
    for (std::size_t j = 0; j < kernel.ny(); ++j)
        for (std::size_t i = 0; i < kernel.nx(); ++i) {
            rings.emplace_back(std::hypot(kernel.x(i), kernel.y(j)), kernel(i, j));
            total += kernel(i, j);
        }
    if (!(total > 0.0)) throw DegenerateInputError("encircled_energy_radius: kernel has no energy");
    std::sort(rings.begin(), rings.end());
    double acc = 0.0;
    for (const auto& [r, v] : rings) {
        acc += v;
        if (acc >= fraction * total) return r;
    }
    return rings.back().first;
}

}  // namespace intimg
