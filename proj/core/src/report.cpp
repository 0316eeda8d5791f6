#include "intimg/report.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "intimg/error.hpp"
#include "intimg/pgm.hpp"

namespace intimg {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string curve_csv(const ResolutionCurve& curve) {
    std::string out = "theta_x_deg,theta_y_deg,radial_extent_mm\n";
    char line[128];
    for (const auto& s : curve.samples) {
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", s.theta_x_deg, s.theta_y_deg, s.radial_extent_mm);
        out += line;
    }
    return out;
}

void write_curve_csv(const ResolutionCurve& curve, const std::filesystem::path& path) {
    write_text(path, curve_csv(curve));
}

std::string fov_json(const FovResult& fov) {
    nlohmann::ordered_json doc;
    doc["threshold_ratio"] = fov.threshold_ratio;
    doc["min_extent_mm"] = fov.min_extent_mm;
    doc["fov_negative_deg"] = optional_number(fov.fov_negative_deg);
    doc["fov_positive_deg"] = optional_number(fov.fov_positive_deg);
    return doc.dump(2) + "\n";
}

void write_fov_json(const FovResult& fov, const std::filesystem::path& path) { write_text(path, fov_json(fov)); }

void write_reconstruction(const Reconstruction& rec, const std::filesystem::path& stem) {
    const double peak = rec.field.max();
    const double scale = peak > 0.0 ? 65535.0 / peak : 1.0;
    auto pgm_path = stem;
    pgm_path += ".pgm";
    auto json_path = stem;
    json_path += ".json";
    if (stem.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(stem.parent_path(), ec);
    }
    write_pgm(pgm_path, field_to_pgm(rec.field, scale));

    nlohmann::ordered_json doc;
    doc["theta_x_deg"] = rec.plane.theta_x_deg;
    doc["theta_y_deg"] = rec.plane.theta_y_deg;
    doc["D_mm"] = rec.plane.axial_offset_mm;
    doc["sample_pitch_mm"] = rec.plane.grid.sample_pitch_mm;
    doc["mode"] = to_string(rec.mode);
    doc["max_intensity"] = peak;
    doc["overlap"] = rec.overlap;
    write_text(json_path, doc.dump(2) + "\n");
}

}  // namespace intimg
