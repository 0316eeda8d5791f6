#include "intimg/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include "json.hpp"

#include "intimg/error.hpp"
#include "intimg/pgm.hpp"

namespace intimg {
namespace {

using nlohmann::json;

const std::set<std::string> kManifestKeys = {"m",          "n",          "pitch_x_mm",     "pitch_y_mm",
                                             "g_mm",       "f_mm",       "wavelength_nm",  "pixel_pitch_mm",
                                             "pixels_x",   "pixels_y",   "images",         "z_i_override_mm",
                                             "max_intensity"};

template <typename T>
T required(const json& doc, const char* key, const std::filesystem::path& path) {
    if (!doc.contains(key)) throw FormatError(path.string() + ": missing key '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(path.string() + ": key '" + key + "' has the wrong type");
    }
}

}  // namespace

std::string elemental_image_name(int p, int q) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "e_%02d_%02d.pgm", p, q);
    return buf;
}

void save_elemental_images(const ElementalImageSet& eis, const std::filesystem::path& dir) {
    eis.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

    double peak = 0.0;
    for (const auto& img : eis.images) peak = std::max(peak, img.max());
    const double scale = peak > 0.0 ? 65535.0 / peak : 1.0;

    const auto& cfg = eis.capture_config;
    json doc;
    doc["m"] = cfg.m;
    doc["n"] = cfg.n;
    doc["pitch_x_mm"] = cfg.pitch_x_mm;
    doc["pitch_y_mm"] = cfg.pitch_y_mm;
    doc["g_mm"] = cfg.gap_mm;
    doc["f_mm"] = cfg.focal_length_mm;
    doc["wavelength_nm"] = cfg.wavelength_nm;
    if (cfg.z_i_override_mm) doc["z_i_override_mm"] = *cfg.z_i_override_mm;
    doc["pixel_pitch_mm"] = eis.pixel_pitch_mm;
    doc["pixels_x"] = eis.pixels_x;
    doc["pixels_y"] = eis.pixels_y;
    doc["max_intensity"] = peak > 0.0 ? peak : 1.0;
    json images = json::array();
    for (int p = 0; p < cfg.m; ++p) {
        for (int q = 0; q < cfg.n; ++q) {
            const std::string name = elemental_image_name(p, q);
            write_pgm(dir / name, field_to_pgm(eis.image(p, q), scale));
            images.push_back({{"p", p}, {"q", q}, {"file", name}});
        }
    }
    doc["images"] = std::move(images);

    const auto path = dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

ElementalImageSet load_elemental_images(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw FormatError(manifest_path.string() + ": cannot open manifest");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(manifest_path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw FormatError(manifest_path.string() + ": manifest must be a JSON object");
    for (const auto& item : doc.items()) {
        if (!kManifestKeys.count(item.key()))
            throw FormatError(manifest_path.string() + ": unknown key '" + item.key() + "'");
    }

    OpticalSystemConfig cfg;
    cfg.m = required<int>(doc, "m", manifest_path);
    cfg.n = required<int>(doc, "n", manifest_path);
    cfg.pitch_x_mm = required<double>(doc, "pitch_x_mm", manifest_path);
    cfg.pitch_y_mm = required<double>(doc, "pitch_y_mm", manifest_path);
    cfg.gap_mm = required<double>(doc, "g_mm", manifest_path);
    cfg.focal_length_mm = required<double>(doc, "f_mm", manifest_path);
    cfg.wavelength_nm = required<double>(doc, "wavelength_nm", manifest_path);
    if (doc.contains("z_i_override_mm")) cfg.z_i_override_mm = required<double>(doc, "z_i_override_mm", manifest_path);
    cfg.validate();

    const double pixel_pitch = required<double>(doc, "pixel_pitch_mm", manifest_path);
    const int px = required<int>(doc, "pixels_x", manifest_path);
    const int py = required<int>(doc, "pixels_y", manifest_path);
    const double peak = doc.contains("max_intensity") ? required<double>(doc, "max_intensity", manifest_path) : 1.0;
    if (!(pixel_pitch > 0.0) || px <= 0 || py <= 0 || !(peak > 0.0))
        throw FormatError(manifest_path.string() + ": pixel geometry and max_intensity must be positive");

    ElementalImageSet eis = ElementalImageSet::blank(cfg, px, py, pixel_pitch);
    const json images = required<json>(doc, "images", manifest_path);
    if (!images.is_array()) throw FormatError(manifest_path.string() + ": 'images' must be an array");

    std::set<std::pair<int, int>> seen;
    const auto base = manifest_path.parent_path();
    for (const auto& entry : images) {
        const int p = required<int>(entry, "p", manifest_path);
        const int q = required<int>(entry, "q", manifest_path);
        const auto file = required<std::string>(entry, "file", manifest_path);
        if (p < 0 || p >= cfg.m || q < 0 || q >= cfg.n)
            throw FormatError(manifest_path.string() + ": image index (" + std::to_string(p) + ", " +
                              std::to_string(q) + ") outside the array");
        if (!seen.insert({p, q}).second)
            throw FormatError(manifest_path.string() + ": duplicate image (" + std::to_string(p) + ", " +
                              std::to_string(q) + ")");
        const auto image_path = base / file;
        const PgmImage pgm = read_pgm(image_path);
        if (pgm.width != static_cast<std::size_t>(px) || pgm.height != static_cast<std::size_t>(py))
            throw FormatError(image_path.string() + ": size does not match the manifest");
        eis.image(p, q) = pgm_to_field(pgm, pixel_pitch, pgm.maxval / peak);
    }
    if (seen.size() != static_cast<std::size_t>(cfg.m) * static_cast<std::size_t>(cfg.n)) {
        for (int p = 0; p < cfg.m; ++p)
            for (int q = 0; q < cfg.n; ++q)
                if (!seen.count({p, q}))
                    throw FormatError(manifest_path.string() + ": missing elemental image (" + std::to_string(p) +
                                      ", " + std::to_string(q) + ")");
    }
    eis.validate();
    return eis;
}

}  // namespace intimg
