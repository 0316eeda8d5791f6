#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "intimg/field.hpp"

namespace intimg {

/// Binary (P5) greymap. Rows are stored top to bottom as in the file.
struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t maxval = 65535;
    std::vector<std::uint16_t> pixels;
};

/// Writes P5 with the image's maxval (two big-endian bytes per sample above 255).
void write_pgm(const std::filesystem::path& path, const PgmImage& image);

/// Reads P5 with maxval up to 65535. Throws FormatError naming the file on any defect.
PgmImage read_pgm(const std::filesystem::path& path);

/// Quantises `field * scale` to 16 bits with rounding; clamps to [0, 65535]. The top
/// file row is the highest-y row of the field.
PgmImage field_to_pgm(const ScalarField2D& field, double scale);

/// Inverse of field_to_pgm: sample / scale on a grid of the given pitch.
ScalarField2D pgm_to_field(const PgmImage& image, double pitch, double scale);

}  // namespace intimg
