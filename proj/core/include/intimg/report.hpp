#pragma once

#include <filesystem>
#include <string>

#include "intimg/reconstruction.hpp"
#include "intimg/resolution.hpp"

namespace intimg {

/// CSV with header theta_x_deg,theta_y_deg,radial_extent_mm; 12 significant digits.
std::string curve_csv(const ResolutionCurve& curve);
void write_curve_csv(const ResolutionCurve& curve, const std::filesystem::path& path);

/// {threshold_ratio, min_extent_mm, fov_negative_deg, fov_positive_deg}; null when open-ended.
std::string fov_json(const FovResult& fov);
void write_fov_json(const FovResult& fov, const std::filesystem::path& path);

/// Writes `stem.pgm` (normalised so the maximum maps to 65535) and `stem.json`:
/// {theta_x_deg, theta_y_deg, D_mm, sample_pitch_mm, mode, max_intensity}.
void write_reconstruction(const Reconstruction& rec, const std::filesystem::path& stem);

}  // namespace intimg
