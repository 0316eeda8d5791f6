#include "intimg/convolution.hpp"

#include <algorithm>
#include <complex>

#include "fftw_support.hpp"
#include "intimg/error.hpp"

namespace intimg {
namespace {

void check_kernel(const ScalarField2D& kernel) {
    if (kernel.empty()) throw DomainError("convolution kernel is empty");
    if (kernel.nx() % 2 == 0 || kernel.ny() % 2 == 0) throw DomainError("convolution kernel must have odd dimensions");
}

// Smallest 2^a 3^b 5^c 7^d not below n.
std::size_t fft_friendly(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (const std::size_t f : {2u, 3u, 5u, 7u})
            while (r % f == 0) r /= f;
        if (r == 1) return m;
    }
}

}  // namespace

bool is_single_tap(const ScalarField2D& kernel) {
    const auto v = kernel.values();
    return std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }) == 1;
}

ScalarField2D convolve_same(const ScalarField2D& field, const ScalarField2D& kernel) {
    check_kernel(kernel);
    const std::size_t nx = field.nx(), ny = field.ny();
    const std::size_t kx = kernel.nx(), ky = kernel.ny();
    const std::ptrdiff_t hx = static_cast<std::ptrdiff_t>(kx / 2);
    const std::ptrdiff_t hy = static_cast<std::ptrdiff_t>(ky / 2);

    if (is_single_tap(kernel)) {
        const auto v = kernel.values();
        const auto at = static_cast<std::size_t>(std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; }) - v.begin());
        const double w = v[at];
        const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(at % kx) - hx;
        const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(at / kx) - hy;
        ScalarField2D out(nx, ny, field.pitch());
        for (std::size_t j = 0; j < ny; ++j) {
            const std::ptrdiff_t src_j = static_cast<std::ptrdiff_t>(j) - sy;
            if (src_j < 0 || src_j >= static_cast<std::ptrdiff_t>(ny)) continue;
            for (std::size_t i = 0; i < nx; ++i) {
                const std::ptrdiff_t src_i = static_cast<std::ptrdiff_t>(i) - sx;
                if (src_i < 0 || src_i >= static_cast<std::ptrdiff_t>(nx)) continue;
                const double s = field(static_cast<std::size_t>(src_i), static_cast<std::size_t>(src_j));
                out(i, j) = w == 1.0 ? s : w * s;
            }
        }
        return out;
    }

    const std::size_t px = fft_friendly(nx + kx - 1);
    const std::size_t py = fft_friendly(ny + ky - 1);
    const std::size_t spectrum = py * (px / 2 + 1);

    auto real_a = detail::fftw_buffer<double>(px * py);
    auto real_b = detail::fftw_buffer<double>(px * py);
    auto spec_a = detail::fftw_buffer<fftw_complex>(spectrum);
    auto spec_b = detail::fftw_buffer<fftw_complex>(spectrum);
    std::fill_n(real_a.get(), px * py, 0.0);
    std::fill_n(real_b.get(), px * py, 0.0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) real_a[j * px + i] = field(i, j);
    for (std::size_t j = 0; j < ky; ++j)
        for (std::size_t i = 0; i < kx; ++i) real_b[j * px + i] = kernel(i, j);

    std::unique_lock lock(detail::fftw_planner_mutex());
    const int rows = static_cast<int>(py), cols = static_cast<int>(px);
    detail::FftwPlan fwd_a(fftw_plan_dft_r2c_2d(rows, cols, real_a.get(), spec_a.get(), FFTW_ESTIMATE));
    detail::FftwPlan fwd_b(fftw_plan_dft_r2c_2d(rows, cols, real_b.get(), spec_b.get(), FFTW_ESTIMATE));
    detail::FftwPlan inv(fftw_plan_dft_c2r_2d(rows, cols, spec_a.get(), real_a.get(), FFTW_ESTIMATE));
    lock.unlock();

    fwd_a.execute();
    fwd_b.execute();
    const double norm = 1.0 / static_cast<double>(px * py);
    for (std::size_t k = 0; k < spectrum; ++k) {
        const std::complex<double> a(spec_a[k][0], spec_a[k][1]);
        const std::complex<double> b(spec_b[k][0], spec_b[k][1]);
        const std::complex<double> c = a * b * norm;
        spec_a[k][0] = c.real();
        spec_a[k][1] = c.imag();
    }
    inv.execute();

    ScalarField2D out(nx, ny, field.pitch());
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            out(i, j) = std::max(0.0, real_a[(j + static_cast<std::size_t>(hy)) * px + i + static_cast<std::size_t>(hx)]);
    return out;
}

ScalarField2D convolve_direct(const ScalarField2D& field, const ScalarField2D& kernel) {
    check_kernel(kernel);
    const auto nx = static_cast<std::ptrdiff_t>(field.nx()), ny = static_cast<std::ptrdiff_t>(field.ny());
    const auto kx = static_cast<std::ptrdiff_t>(kernel.nx()), ky = static_cast<std::ptrdiff_t>(kernel.ny());
    const std::ptrdiff_t hx = kx / 2, hy = ky / 2;
    ScalarField2D out(field.nx(), field.ny(), field.pitch());
    for (std::ptrdiff_t j = 0; j < ny; ++j)
        for (std::ptrdiff_t i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (std::ptrdiff_t b = 0; b < ky; ++b) {
                const std::ptrdiff_t sj = j - (b - hy);
                if (sj < 0 || sj >= ny) continue;
                for (std::ptrdiff_t a = 0; a < kx; ++a) {
                    const std::ptrdiff_t si = i - (a - hx);
                    if (si < 0 || si >= nx) continue;
                    acc += kernel(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
                           field(static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
                }
            }
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
        }
    return out;
}

}  // namespace intimg
