#include "intimg/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "intimg/error.hpp"
#include "intimg/pgm.hpp"

namespace intimg {
namespace {

using nlohmann::json;

// Reads typed keys from one JSON object and rejects anything it was not asked for.
class StrictObject {
public:
    StrictObject(const json& node, std::string where) : node_(node), where_(std::move(where)) {
        if (!node_.is_object()) throw ConfigError(where_ + " must be a JSON object");
    }

    bool has(const char* key) {
        known_.insert(key);
        return node_.contains(key);
    }

    template <typename T>
    T get(const char* key) {
        known_.insert(key);
        if (!node_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
        return convert<T>(node_.at(key), key);
    }

    template <typename T>
    T get_or(const char* key, T fallback) {
        return has(key) ? convert<T>(node_.at(key), key) : fallback;
    }

    template <typename T>
    std::optional<T> get_opt(const char* key) {
        if (!has(key) || node_.at(key).is_null()) return std::nullopt;
        return convert<T>(node_.at(key), key);
    }

    const json& child(const char* key) {
        known_.insert(key);
        return node_.at(key);
    }

    std::string path(const char* key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!known_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
        }
    }

private:
    template <typename T>
    T convert(const json& value, const char* key) const {
        if constexpr (std::is_same_v<T, double>) {
            if (!value.is_number()) throw ConfigError(where_ + "." + key + " must be a number");
        } else if constexpr (std::is_same_v<T, int>) {
            if (!value.is_number_integer()) throw ConfigError(where_ + "." + key + " must be an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) throw ConfigError(where_ + "." + key + " must be true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) throw ConfigError(where_ + "." + key + " must be a string");
        }
        return value.get<T>();
    }

    const json& node_;
    std::string where_;
    std::set<std::string> known_;
};

json parse_document(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

ApertureShape aperture_from_string(const std::string& name) {
    if (name == "ellipse") return ApertureShape::ellipse;
    if (name == "rectangle") return ApertureShape::rectangle;
    throw ConfigError("unknown aperture '" + name + "' (expected ellipse or rectangle)");
}

void read_optics(const json& node, OpticalSystemConfig& cfg) {
    StrictObject o(node, "optics");
    cfg.m = o.get_or("m", cfg.m);
    cfg.n = o.get_or("n", cfg.n);
    cfg.pitch_x_mm = o.get_or("pitch_x_mm", cfg.pitch_x_mm);
    cfg.pitch_y_mm = o.get_or("pitch_y_mm", cfg.pitch_y_mm);
    cfg.gap_mm = o.get_or("g_mm", cfg.gap_mm);
    cfg.focal_length_mm = o.get_or("f_mm", cfg.focal_length_mm);
    cfg.wavelength_nm = o.get_or("wavelength_nm", cfg.wavelength_nm);
    if (o.has("aperture")) cfg.aperture = aperture_from_string(o.get<std::string>("aperture"));
    cfg.focus_epsilon = o.get_or("focus_epsilon", cfg.focus_epsilon);
    cfg.z_i_override_mm = o.get_opt<double>("z_i_override_mm");
    cfg.power = o.get_or("power", cfg.power);
    o.finish();
}

void read_plane(const json& node, PlaneBlock& plane) {
    StrictObject o(node, "plane");
    if (o.has("theta_x_deg")) {
        const json& t = o.child("theta_x_deg");
        plane.theta_x_deg.clear();
        if (t.is_number()) {
            plane.theta_x_deg.push_back(t.get<double>());
        } else if (t.is_array() && !t.empty()) {
            for (const auto& v : t) {
                if (!v.is_number()) throw ConfigError("plane.theta_x_deg entries must be numbers");
                plane.theta_x_deg.push_back(v.get<double>());
            }
        } else {
            throw ConfigError("plane.theta_x_deg must be a number or a non-empty array");
        }
    }
    plane.theta_y_deg = o.get_or("theta_y_deg", plane.theta_y_deg);
    plane.depth_mm = o.get_opt<double>("D_mm");
    const auto hx = o.get_opt<double>("half_width_x_mm");
    const auto hy = o.get_opt<double>("half_width_y_mm");
    const auto pitch = o.get_opt<double>("sample_pitch_mm");
    if (hx || hy || pitch) {
        if (!hx || !hy || !pitch)
            throw ConfigError("plane: half_width_x_mm, half_width_y_mm and sample_pitch_mm go together");
        plane.grid = PlaneGrid{*hx, *hy, *pitch};
    }
    o.finish();
}

void read_scan(const json& node, ScanBlock& scan) {
    StrictObject o(node, "scan");
    if (o.has("axis")) scan.axis = scan_axis_from_string(o.get<std::string>("axis"));
    scan.theta_min_deg = o.get_or("theta_min_deg", scan.theta_min_deg);
    scan.theta_max_deg = o.get_or("theta_max_deg", scan.theta_max_deg);
    scan.steps = o.get_or("steps", scan.steps);
    scan.threshold_ratio = o.get_or("threshold_ratio", scan.threshold_ratio);
    o.finish();
}

void read_capture(const json& node, CaptureBlock& capture) {
    StrictObject o(node, "capture");
    capture.pixels_x = o.get_or("pixels_x", capture.pixels_x);
    capture.pixels_y = o.get_or("pixels_y", capture.pixels_y);
    capture.pixel_pitch_mm = o.get_or("pixel_pitch_mm", capture.pixel_pitch_mm);
    o.finish();
}

void read_reconstruct(const json& node, ReconstructBlock& rec) {
    StrictObject o(node, "reconstruct");
    if (o.has("mode")) rec.mode = reconstruction_mode_from_string(o.get<std::string>("mode"));
    rec.strip_width_mm = o.get_opt<double>("strip_width_mm");
    rec.impulse_psf = o.get_or("impulse_psf", rec.impulse_psf);
    o.finish();
}

void read_io(const json& node, IoBlock& io, const std::filesystem::path& base) {
    StrictObject o(node, "io");
    if (o.has("output_dir")) io.output_dir = resolve(base, o.get<std::string>("output_dir"));
    if (o.has("scene")) io.scene = resolve(base, o.get<std::string>("scene"));
    if (o.has("manifest")) io.manifest = resolve(base, o.get<std::string>("manifest"));
    o.finish();
}

TexturedPlane read_textured_plane(const json& node, const std::string& where, const std::filesystem::path& base) {
    StrictObject o(node, where);
    TexturedPlane plane;
    plane.z_mm = o.get<double>("z_mm");
    plane.center_x_mm = o.get_or("center_x_mm", 0.0);
    plane.center_y_mm = o.get_or("center_y_mm", 0.0);
    plane.half_width_x_mm = o.get<double>("half_width_x_mm");
    plane.half_width_y_mm = o.get<double>("half_width_y_mm");
    plane.intensity_scale = o.get_or("intensity_scale", 1.0);

    const int sources = int(o.has("texture")) + int(o.has("texture_file")) + int(o.has("checker"));
    if (sources != 1) throw ConfigError(where + ": give exactly one of texture, texture_file, checker");

    if (o.has("texture")) {
        StrictObject t(o.child("texture"), o.path("texture"));
        const int w = t.get<int>("width");
        const int h = t.get<int>("height");
        const json& values = t.child("values");
        t.finish();
        if (w < 1 || h < 1) throw ConfigError(where + ".texture: width and height must be positive");
        if (!values.is_array() || values.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
            throw ConfigError(where + ".texture.values must hold width*height numbers");
        plane.width = static_cast<std::size_t>(w);
        plane.height = static_cast<std::size_t>(h);
        for (const auto& v : values) {
            if (!v.is_number()) throw ConfigError(where + ".texture.values must hold numbers");
            plane.texture.push_back(v.get<double>());
        }
    } else if (o.has("texture_file")) {
        const auto file = resolve(base, o.get<std::string>("texture_file"));
        const PgmImage pgm = read_pgm(file);
        const ScalarField2D tex = pgm_to_field(pgm, 1.0, pgm.maxval);
        plane.width = tex.nx();
        plane.height = tex.ny();
        plane.texture.assign(tex.values().begin(), tex.values().end());
    } else {
        StrictObject c(o.child("checker"), o.path("checker"));
        const int cx = c.get<int>("cells_x");
        const int cy = c.get<int>("cells_y");
        const double low = c.get_or("low", 0.0);
        const double high = c.get_or("high", 1.0);
        c.finish();
        if (cx < 1 || cy < 1) throw ConfigError(where + ".checker: cell counts must be positive");
        plane.width = static_cast<std::size_t>(cx);
        plane.height = static_cast<std::size_t>(cy);
        for (int j = 0; j < cy; ++j)
            for (int i = 0; i < cx; ++i) plane.texture.push_back((i + j) % 2 ? high : low);
    }
    o.finish();
    return plane;
}

}  // namespace

void RunConfig::validate() const {
    optics.validate();
    std::ostringstream msg;
    if (scan.steps < 3) msg << "scan.steps must be at least 3 (got " << scan.steps << "); ";
    if (!(scan.theta_min_deg < scan.theta_max_deg)) msg << "scan.theta_min_deg must be below theta_max_deg; ";
    if (!(scan.threshold_ratio > 1.0)) msg << "scan.threshold_ratio must exceed 1; ";
    if (plane.depth_mm && !(*plane.depth_mm > 0.0)) msg << "plane.D_mm must be positive; ";
    for (const double t : plane.theta_x_deg)
        if (!std::isfinite(t) || std::abs(t) >= 90.0) msg << "plane.theta_x_deg must lie in (-90, 90); ";
    if (capture.pixels_x < 1 || capture.pixels_y < 1) msg << "capture pixel counts must be positive; ";
    if (capture.pixel_pitch_mm < 0.0) msg << "capture.pixel_pitch_mm must not be negative; ";
    if (reconstruct.strip_width_mm && !(*reconstruct.strip_width_mm > 0.0))
        msg << "reconstruct.strip_width_mm must be positive; ";
    const std::string text = msg.str();
    if (!text.empty()) throw ConfigError(text.substr(0, text.size() - 2));
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_document(text, "run config");
    StrictObject root(doc, "config");
    RunConfig cfg;
    if (root.has("optics")) read_optics(root.child("optics"), cfg.optics);
    if (root.has("plane")) read_plane(root.child("plane"), cfg.plane);
    if (root.has("scan")) read_scan(root.child("scan"), cfg.scan);
    if (root.has("capture")) read_capture(root.child("capture"), cfg.capture);
    if (root.has("reconstruct")) read_reconstruct(root.child("reconstruct"), cfg.reconstruct);
    if (root.has("io")) read_io(root.child("io"), cfg.io, base_dir);
    const int workers = root.get_or("workers", 0);
    if (workers < 0) throw ConfigError("workers must not be negative");
    cfg.workers = static_cast<unsigned>(workers);
    root.finish();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    try {
        return parse_run_config(slurp(path), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_document(text, "scene");
    StrictObject root(doc, "scene");
    Scene scene;
    if (root.has("emitters")) {
        const json& list = root.child("emitters");
        if (!list.is_array()) throw ConfigError("scene.emitters must be an array");
        for (std::size_t k = 0; k < list.size(); ++k) {
            StrictObject e(list[k], "scene.emitters[" + std::to_string(k) + "]");
            PointEmitter em;
            em.x_mm = e.get_or("x_mm", 0.0);
            em.y_mm = e.get_or("y_mm", 0.0);
            em.z_mm = e.get<double>("z_mm");
            em.intensity = e.get_or("intensity", 1.0);
            e.finish();
            scene.emitters.push_back(em);
        }
    }
    if (root.has("planes")) {
        const json& list = root.child("planes");
        if (!list.is_array()) throw ConfigError("scene.planes must be an array");
        for (std::size_t k = 0; k < list.size(); ++k)
            scene.planes.push_back(read_textured_plane(list[k], "scene.planes[" + std::to_string(k) + "]", base_dir));
    }
    root.finish();
    scene.validate();
    return scene;
}

Scene load_scene(const std::filesystem::path& path) {
    try {
        return parse_scene(slurp(path), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace intimg
