#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace attend {

/// Every tunable threshold and hyperparameter. Defaults are the shipped
/// values; a JSON config file and then `--set key=value` overrides apply
/// on top, in that order.
struct Config {
    // gaze model
    double quality_floor = 0.3;
    double quality_gate = 0.5;
    double pvd_coefficient = 3.0;
    double desktop_aspect = 16.0 / 9.0;
    double mobile_screen_width_cm = 7.0;
    double mobile_screen_height_cm = 14.0;
    double default_desktop_width_cm = 34.5;
    double default_desktop_height_cm = 19.4;
    double desktop_camera_bezel_cm = 1.0;
    double mobile_camera_bezel_cm = 0.8;
    double margin_cm = 1.0;
    double orientation_yaw_deg = 10.0;
    double orientation_face_low = 0.35;
    double orientation_face_high = 0.65;
    double orientation_gaze_x_cm = 4.0;
    // head model
    double head_yaw_threshold_deg = 20.0;
    double head_pitch_threshold_deg = 12.0;
    // speaking
    double speaking_threshold = 0.5;
    double speaking_min_duration_s = 1.0;
    // drowsiness
    double closure_gate = 50.0;
    double au_gate = 20.0;
    double closure_min_duration_s = 2.0;
    double yawn_threshold = 0.5;
    double yawn_smoothing_s = 0.5;
    // unattended screen
    double unattended_min_duration_s = 1.0;
    // training
    std::size_t gbt_stages = 100;
    std::size_t gbt_max_depth = 3;
    double gbt_learning_rate = 0.1;
    std::size_t gbt_min_samples_leaf = 1;
    std::size_t cnn_epochs = 200;
    double cnn_learning_rate = 0.01;
};

struct ConfigKey {
    std::string_view name;
    std::string_view help;
    std::variant<double Config::*, std::size_t Config::*> member;
};

const std::vector<ConfigKey>& config_keys();

/// Applies a flat JSON object; unknown keys or wrong types throw ConfigError.
void apply_config_json(Config& config, const nlohmann::json& j);
void apply_config_file(Config& config, const std::filesystem::path& path);

/// Applies one "key=value" override; throws ConfigError on unknown keys or
/// unparsable values.
void apply_override(Config& config, std::string_view assignment);

/// Validates ranges (thresholds positive, gates within their scales).
void validate_config(const Config& config);

nlohmann::json config_to_json(const Config& config);

/// "key = value  # help" lines, one per key, for --help output.
std::string describe_defaults();

}  // namespace attend
