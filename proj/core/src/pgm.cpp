#include "intimg/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "intimg/error.hpp"

namespace intimg {
namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw FormatError(path.string() + ": " + what);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::string& data, std::size_t& pos) {
    while (pos < data.size()) {
        if (std::isspace(static_cast<unsigned char>(data[pos]))) {
            ++pos;
        } else if (data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
    if (image.pixels.size() != image.width * image.height) fail(path, "pixel buffer does not match dimensions");
    if (image.maxval == 0) fail(path, "maxval must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
    const bool wide = image.maxval > 255;
    std::string body;
    body.reserve(image.pixels.size() * (wide ? 2 : 1));
    for (const std::uint16_t v : image.pixels) {
        if (wide) body.push_back(static_cast<char>(v >> 8));
        body.push_back(static_cast<char>(v & 0xff));
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) fail(path, "write failed");
}

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    if (header_token(data, pos) != "P5") fail(path, "not a binary PGM (missing P5 magic)");
    PgmImage image;
    try {
        image.width = std::stoul(header_token(data, pos));
        image.height = std::stoul(header_token(data, pos));
        const unsigned long maxval = std::stoul(header_token(data, pos));
        if (maxval == 0 || maxval > 65535) fail(path, "maxval out of range");
        image.maxval = static_cast<std::uint16_t>(maxval);
    } catch (const std::logic_error&) {
        fail(path, "malformed header");
    }
    if (image.width == 0 || image.height == 0) fail(path, "empty image");
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) fail(path, "malformed header");
    ++pos;

    const std::size_t bytes = image.maxval > 255 ? 2 : 1;
    const std::size_t count = image.width * image.height;
    if (data.size() - pos < count * bytes) fail(path, "truncated pixel data");
    image.pixels.resize(count);
    const auto* raw = reinterpret_cast<const unsigned char*>(data.data() + pos);
    for (std::size_t k = 0; k < count; ++k) {
        image.pixels[k] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]) : raw[k];
        if (image.pixels[k] > image.maxval) fail(path, "sample exceeds maxval");
    }
    return image;
}

PgmImage field_to_pgm(const ScalarField2D& field, double scale) {
    PgmImage image;
    image.width = field.nx();
    image.height = field.ny();
    image.maxval = 65535;
    image.pixels.resize(field.size());
    for (std::size_t r = 0; r < field.ny(); ++r) {
        const std::size_t j = field.ny() - 1 - r;
        for (std::size_t i = 0; i < field.nx(); ++i) {
            const double v = std::round(field(i, j) * scale);
            image.pixels[r * field.nx() + i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
        }
    }
    return image;
}

ScalarField2D pgm_to_field(const PgmImage& image, double pitch, double scale) {
    ScalarField2D field(image.width, image.height, pitch);
    for (std::size_t r = 0; r < image.height; ++r) {
        const std::size_t j = image.height - 1 - r;
        for (std::size_t i = 0; i < image.width; ++i) field(i, j) = image.pixels[r * image.width + i] / scale;
    }
    return field;
}

}  // namespace intimg
