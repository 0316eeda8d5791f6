#pragma once

#include "intimg/field.hpp"

namespace intimg {

/// True when the kernel has exactly one non-zero tap.
bool is_single_tap(const ScalarField2D& kernel);

/// Linear convolution with zero boundary; the output has the geometry of `field`.
/// `kernel` must have odd dimensions and is taken as centred. Single-tap kernels
/// are applied as an exact shifted copy; everything else goes through a real-to-
/// complex FFT. Negative round-off is clamped to zero.
ScalarField2D convolve_same(const ScalarField2D& field, const ScalarField2D& kernel);

/// Direct O(N^2 K^2) convolution with the same conventions, for verification.
ScalarField2D convolve_direct(const ScalarField2D& field, const ScalarField2D& kernel);

}  // namespace intimg
