#include "attend/config.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "attend/error.hpp"

namespace attend {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"quality_floor", "min gaze quality for a frame to enter the session gaze statistics", &Config::quality_floor},
        {"quality_gate", "gaze quality below which the head model replaces eye gaze", &Config::quality_gate},
        {"pvd_coefficient", "viewing distance / screen height ratio for desktop screen sizing", &Config::pvd_coefficient},
        {"desktop_aspect", "desktop screen width / height", &Config::desktop_aspect},
        {"mobile_screen_width_cm", "handset width in portrait (camera on top)", &Config::mobile_screen_width_cm},
        {"mobile_screen_height_cm", "handset height in portrait (camera on top)", &Config::mobile_screen_height_cm},
        {"default_desktop_width_cm", "desktop width used when screen sizing is disabled", &Config::default_desktop_width_cm},
        {"default_desktop_height_cm", "desktop height used when screen sizing is disabled", &Config::default_desktop_height_cm},
        {"desktop_camera_bezel_cm", "assumed camera-to-screen-edge gap for desktops", &Config::desktop_camera_bezel_cm},
        {"mobile_camera_bezel_cm", "assumed camera-to-screen-edge gap for handsets", &Config::mobile_camera_bezel_cm},
        {"margin_cm", "tolerance added around the screen rectangle", &Config::margin_cm},
        {"orientation_yaw_deg", "|mean head yaw| above which the yaw vote says rotated", &Config::orientation_yaw_deg},
        {"orientation_face_low", "mean face x below which the face vote says rotated", &Config::orientation_face_low},
        {"orientation_face_high", "mean face x above which the face vote says rotated", &Config::orientation_face_high},
        {"orientation_gaze_x_cm", "|mean raw gaze x| above which the gaze vote says rotated", &Config::orientation_gaze_x_cm},
        {"head_yaw_threshold_deg", "normalized yaw beyond which the head is off-screen", &Config::head_yaw_threshold_deg},
        {"head_pitch_threshold_deg", "normalized pitch beyond which the head is off-screen", &Config::head_pitch_threshold_deg},
        {"speaking_threshold", "speaking probability threshold", &Config::speaking_threshold},
        {"speaking_min_duration_s", "speaking runs longer than this are distracting", &Config::speaking_min_duration_s},
        {"closure_gate", "eye closure intensity (0-100) counted as closed", &Config::closure_gate},
        {"au_gate", "AU6/AU12 intensity at or above which closure is ignored", &Config::au_gate},
        {"closure_min_duration_s", "eye closures longer than this are distracting", &Config::closure_min_duration_s},
        {"yawn_threshold", "yawn probability threshold", &Config::yawn_threshold},
        {"yawn_smoothing_s", "majority-vote window for yawn flags", &Config::yawn_smoothing_s},
        {"unattended_min_duration_s", "dual no-face runs longer than this are unattended", &Config::unattended_min_duration_s},
        {"gbt_stages", "boosting stages", &Config::gbt_stages},
        {"gbt_max_depth", "boosted tree depth", &Config::gbt_max_depth},
        {"gbt_learning_rate", "boosting shrinkage", &Config::gbt_learning_rate},
        {"gbt_min_samples_leaf", "minimum samples per tree leaf", &Config::gbt_min_samples_leaf},
        {"cnn_epochs", "speaking CNN training epochs", &Config::cnn_epochs},
        {"cnn_learning_rate", "speaking CNN SGD learning rate", &Config::cnn_learning_rate},
    };
    return keys;
}

namespace {

const ConfigKey& find_key(std::string_view name) {
    for (const auto& k : config_keys()) {
        if (k.name == name) return k;
    }
    throw ConfigError("unknown config key '" + std::string(name) + "'");
}

std::string format_value(const Config& c, const ConfigKey& key) {
    char buf[40];
    if (auto d = std::get_if<double Config::*>(&key.member))
        std::snprintf(buf, sizeof buf, "%.10g", c.**d);
    else
        std::snprintf(buf, sizeof buf, "%zu", c.*std::get<std::size_t Config::*>(key.member));
    return buf;
}

}  // namespace

void apply_config_json(Config& config, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [name, value] : j.items()) {
        const auto& key = find_key(name);
        if (auto d = std::get_if<double Config::*>(&key.member)) {
            if (!value.is_number()) throw ConfigError("config key '" + name + "' must be a number");
            config.**d = value.get<double>();
        } else {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0) throw ConfigError("config key '" + name + "' must be a non-negative integer");
            config.*std::get<std::size_t Config::*>(key.member) = value.get<std::size_t>();
        }
    }
}

void apply_config_file(Config& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    apply_config_json(config, j);
}

void apply_override(Config& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
    const std::string name(assignment.substr(0, eq));
    const std::string value(assignment.substr(eq + 1));
    const auto& key = find_key(name);
    char* end = nullptr;
    if (auto d = std::get_if<double Config::*>(&key.member)) {
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size()) throw ConfigError("bad value for " + name + ": " + value);
        config.**d = v;
    } else {
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("bad value for " + name + ": " + value);
        config.*std::get<std::size_t Config::*>(key.member) = std::stoull(value);
    }
}

void validate_config(const Config& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid config: ") + what);
    };
    require(c.quality_floor >= 0.0 && c.quality_floor <= 1.0, "quality_floor must be in [0, 1]");
    require(c.quality_gate >= 0.0 && c.quality_gate <= 1.0, "quality_gate must be in [0, 1]");
    require(c.pvd_coefficient > 0.0 && c.desktop_aspect > 0.0, "pvd_coefficient and desktop_aspect must be > 0");
    require(c.mobile_screen_width_cm > 0.0 && c.mobile_screen_height_cm > 0.0, "mobile screen must be > 0");
    require(c.default_desktop_width_cm > 0.0 && c.default_desktop_height_cm > 0.0, "default desktop screen must be > 0");
    require(c.margin_cm >= 0.0, "margin_cm must be >= 0");
    require(c.orientation_face_low < c.orientation_face_high, "orientation_face_low must be < orientation_face_high");
    require(c.head_yaw_threshold_deg > 0.0 && c.head_pitch_threshold_deg > 0.0, "head thresholds must be > 0");
    require(c.speaking_threshold > 0.0 && c.speaking_threshold < 1.0, "speaking_threshold must be in (0, 1)");
    require(c.yawn_threshold > 0.0 && c.yawn_threshold < 1.0, "yawn_threshold must be in (0, 1)");
    require(c.closure_gate >= 0.0 && c.closure_gate <= 100.0 && c.au_gate >= 0.0 && c.au_gate <= 100.0,
            "closure_gate and au_gate must be in [0, 100]");
    require(c.speaking_min_duration_s >= 0.0 && c.closure_min_duration_s >= 0.0 && c.unattended_min_duration_s >= 0.0 &&
                c.yawn_smoothing_s >= 0.0,
            "durations must be >= 0");
    require(c.gbt_max_depth > 0 && c.gbt_min_samples_leaf > 0, "gbt_max_depth and gbt_min_samples_leaf must be > 0");
    require(c.gbt_learning_rate > 0.0 && c.gbt_learning_rate <= 1.0, "gbt_learning_rate must be in (0, 1]");
    require(c.cnn_learning_rate > 0.0, "cnn_learning_rate must be > 0");
}

nlohmann::json config_to_json(const Config& c) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& k : config_keys()) {
        if (auto d = std::get_if<double Config::*>(&k.member))
            j[std::string(k.name)] = c.**d;
        else
            j[std::string(k.name)] = c.*std::get<std::size_t Config::*>(k.member);
    }
    return j;
}

std::string describe_defaults() {
    const Config defaults;
    std::ostringstream out;
    out << "Config keys (defaults; override with --config FILE or --set key=value):\n";
    for (const auto& k : config_keys()) {
        out << "  " << k.name << " = " << format_value(defaults, k) << "    # " << k.help << '\n';
    }
    return out.str();
}

}  // namespace attend
