#pragma once

#include <cstddef>

#include "intimg/field.hpp"
#include "intimg/optics.hpp"

namespace intimg {

/// Incoherent defocus point-spread function of one lenslet aperture.
struct PSFKernel {
    /// Centred, odd-sized, unit-sum samples on the plane at z_local.
    ScalarField2D samples;
    double z_local_mm = 0.0;
    /// z_local - z_i (infinite in focused mode).
    double defocus_distance_mm = 0.0;
    /// 1/z_local - 1/z_i, the quantity the defocus phase depends on.
    double defocus_curvature_per_mm = 0.0;
    std::size_t transform_size = 0;
    double pupil_sample_pitch_mm = 0.0;

    double sample_pitch() const { return samples.pitch(); }
};

/// Transform size and pupil sampling for a PSF evaluation.
struct PsfSampling {
    std::size_t kernel_size = 0;
    double pupil_sample_pitch_mm = 0.0;
};

/// Kernels are cropped to the smallest centred window holding every sample at or
/// above this fraction of the peak, plus a one-sample border.
inline constexpr double kPsfCropFraction = 1e-6;

inline constexpr std::size_t kMaxPsfTransform = 4096;

/// Picks a pupil sampling that keeps the defocus phase below pi per sample with a
/// factor-two margin, at least 64 samples across the aperture, the pupil inside
/// half of the transform window, and output samples no coarser than
/// `target_pitch_mm`. Throws SamplingError if that needs more than kMaxPsfTransform.
PsfSampling choose_psf_sampling(const OpticalSystemConfig& cfg, double z_local, double z_i, double target_pitch_mm);

/// |DFT{ P(u,v) exp(i k/2 (1/z_local - 1/z_i)(u^2+v^2)) }|^2 for the lenslet aperture
/// (ellipse or rectangle with diameters equal to the pitches), mapped to the plane at
/// z_local with pitch lambda z_local / (N du) and normalised to unit sum. Pass
/// z_i = kInfinity for focused mode.
PSFKernel defocus_psf(const OpticalSystemConfig& cfg, double z_local, double z_i, std::size_t kernel_size,
                      double pupil_sample_pitch_mm);

/// Same as defocus_psf with choose_psf_sampling(cfg, z_local, z_i, target_pitch_mm).
PSFKernel defocus_psf(const OpticalSystemConfig& cfg, double z_local, double z_i, double target_pitch_mm);

/// Moves a kernel onto a grid of pitch `grid_pitch_mm`. Finer kernels are splatted
/// bilinearly (energy preserving); coarser ones are bilinearly interpolated. The
/// result is centred, odd-sized and sums to one.
ScalarField2D resample_kernel(const ScalarField2D& kernel, double grid_pitch_mm);

/// Radius of the centred circle holding `fraction` of the kernel's energy.
double encircled_energy_radius(const ScalarField2D& kernel, double fraction);

}  // namespace intimg
