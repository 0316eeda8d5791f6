#pragma once

#include <filesystem>
#include <string>

#include "intimg/reconstruction.hpp"

namespace intimg {

/// File name of elemental image (p, q): e_PP_QQ.pgm.
std::string elemental_image_name(int p, int q);

/// Writes `dir/manifest.json` and one 16-bit PGM per lenslet. Intensities are
/// normalised globally so the brightest pixel maps to 65535; the factor is stored
/// as `max_intensity`. Creates `dir` if needed.
void save_elemental_images(const ElementalImageSet& eis, const std::filesystem::path& dir);

/// Reads a manifest and its images (paths relative to the manifest). Fields the
/// manifest does not carry (aperture, focus tolerance, power) keep their defaults.
ElementalImageSet load_elemental_images(const std::filesystem::path& manifest_path);

}  // namespace intimg
