#include "attend/session_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "attend/error.hpp"

namespace attend {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(DeviceType d) {
    return d == DeviceType::desktop ? "desktop" : "mobile";
}

DeviceType parse_device_type(std::string_view s) {
    if (s == "desktop") return DeviceType::desktop;
    if (s == "mobile") return DeviceType::mobile;
    throw DataError("unknown device_type '" + std::string(s) + "'");
}

std::string mask_names(SignalMask mask) {
    std::string out;
    for (std::size_t i = 0; i < kSignalCount; ++i) {
        if ((mask >> i) & 1u) {
            if (!out.empty()) out += ',';
            out += kSignalNames[i];
        }
    }
    return out.empty() ? "-" : out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw DataError(where + ": bad number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw DataError(where + ": bad integer '" + s + "'");
    return std::stoull(s);
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

ordered_json vec3_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const ordered_json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected 3-vector");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

ordered_json frame_json(const FrameRecord& f) {
    ordered_json mouth = ordered_json::array();
    for (const auto& p : f.mouth_points) mouth.push_back(ordered_json::array({p.x, p.y}));
    ordered_json j;
    j["frame_index"] = f.frame_index;
    j["timestamp_ms"] = f.timestamp_ms;
    j["pupil_position_cm"] = vec3_json(f.pupil_position_cm);
    j["gaze_direction"] = vec3_json(f.gaze_direction);
    j["gaze_quality"] = f.gaze_quality;
    j["head_yaw_deg"] = f.head_yaw_deg;
    j["head_pitch_deg"] = f.head_pitch_deg;
    j["head_roll_deg"] = f.head_roll_deg;
    j["mouth_points"] = std::move(mouth);
    j["au_intensities"] = f.au_intensities;
    j["eye_closure"] = f.eye_closure;
    j["face_detected_expr"] = f.face_detected_expr;
    j["face_detected_gaze"] = f.face_detected_gaze;
    j["face_center_x"] = f.face_center_x;
    return j;
}

constexpr std::array<std::string_view, 14> kFrameFields = {
    "frame_index",    "timestamp_ms",  "pupil_position_cm", "gaze_direction", "gaze_quality",
    "head_yaw_deg",   "head_pitch_deg", "head_roll_deg",    "mouth_points",   "au_intensities",
    "eye_closure",    "face_detected_expr", "face_detected_gaze", "face_center_x"};

FrameRecord frame_from(const ordered_json& j) {
    if (!j.is_object()) throw std::invalid_argument("expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(kFrameFields.begin(), kFrameFields.end(), key) == kFrameFields.end())
            throw std::invalid_argument("unknown field '" + key + "'");
    }
    FrameRecord f;
    f.frame_index = j.at("frame_index").get<std::uint64_t>();
    f.timestamp_ms = j.at("timestamp_ms").get<double>();
    f.pupil_position_cm = vec3_from(j.at("pupil_position_cm"));
    f.gaze_direction = vec3_from(j.at("gaze_direction"));
    f.gaze_quality = j.at("gaze_quality").get<double>();
    f.head_yaw_deg = j.at("head_yaw_deg").get<double>();
    f.head_pitch_deg = j.at("head_pitch_deg").get<double>();
    f.head_roll_deg = j.at("head_roll_deg").get<double>();
    const auto& mouth = j.at("mouth_points");
    if (!mouth.is_array() || mouth.size() != 4) throw std::invalid_argument("mouth_points needs 4 points");
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& p = mouth.at(i);
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("mouth point needs 2 coordinates");
        f.mouth_points[i] = {p.at(0).get<double>(), p.at(1).get<double>()};
    }
    const auto& aus = j.at("au_intensities");
    if (!aus.is_array() || aus.size() != kAuCount)
        throw std::invalid_argument("au_intensities needs " + std::to_string(kAuCount) + " values");
    for (std::size_t i = 0; i < kAuCount; ++i) f.au_intensities[i] = aus.at(i).get<double>();
    f.eye_closure = j.at("eye_closure").get<double>();
    f.face_detected_expr = j.at("face_detected_expr").get<bool>();
    f.face_detected_gaze = j.at("face_detected_gaze").get<bool>();
    f.face_center_x = j.at("face_center_x").get<double>();
    return f;
}

bool finite3(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

void check_range(double v, double lo, double hi, const char* name, const std::string& where) {
    if (!(v >= lo && v <= hi)) {
        throw DataError(where + ": " + name + " = " + format_double(v) + " outside [" + format_double(lo) + ", " +
                        format_double(hi) + "]");
    }
}

}  // namespace

void validate_frame(const FrameRecord& f, const std::string& where) {
    if (!(f.timestamp_ms >= 0.0) || !std::isfinite(f.timestamp_ms)) throw DataError(where + ": timestamp_ms must be >= 0");
    check_range(f.gaze_quality, 0.0, 1.0, "gaze_quality", where);
    check_range(f.eye_closure, 0.0, 100.0, "eye_closure", where);
    check_range(f.face_center_x, 0.0, 1.0, "face_center_x", where);
    for (std::size_t i = 0; i < kAuCount; ++i) check_range(f.au_intensities[i], 0.0, 100.0, kAuNames[i].data(), where);
    if (!finite3(f.pupil_position_cm) || !finite3(f.gaze_direction)) throw DataError(where + ": non-finite gaze field");
    if (!std::isfinite(f.head_yaw_deg) || !std::isfinite(f.head_pitch_deg) || !std::isfinite(f.head_roll_deg))
        throw DataError(where + ": non-finite head pose");
    for (const auto& p : f.mouth_points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DataError(where + ": non-finite mouth point");
    }
    if (f.face_detected_gaze && !(f.pupil_position_cm.z > 0.0))
        throw DataError(where + ": pupil z must be > 0 when face_detected_gaze is true");
}

SessionManifest load_manifest(const fs::path& path) {
    auto in = open_in(path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path fp(p);
        return (fp.is_absolute() || base.empty()) ? fp.string() : (base / fp).string();
    };
    SessionManifest m;
    try {
        m.session_id = j.at("session_id").get<std::string>();
        m.device_type = parse_device_type(j.at("device_type").get<std::string>());
        m.frame_rate_hz = j.at("frame_rate_hz").get<double>();
        m.frame_source = resolve(j.at("frame_source").get<std::string>());
        if (j.contains("ground_truth") && !j["ground_truth"].is_null())
            m.ground_truth = resolve(j["ground_truth"].get<std::string>());
        if (j.contains("annotations") && !j["annotations"].is_null())
            m.annotations = resolve(j["annotations"].get<std::string>());
        if (j.contains("screen_override_cm") && !j["screen_override_cm"].is_null()) {
            const auto& s = j["screen_override_cm"];
            m.screen_override_cm = std::make_pair(s.at(0).get<double>(), s.at(1).get<double>());
        }
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (!(m.frame_rate_hz >= 5.0 && m.frame_rate_hz <= 120.0))
        throw DataError(path.string() + ": frame_rate_hz must be in [5, 120]");
    if (m.screen_override_cm && !(m.screen_override_cm->first > 0.0 && m.screen_override_cm->second > 0.0))
        throw DataError(path.string() + ": screen_override_cm must be positive");
    return m;
}

void write_manifest(const SessionManifest& m, const fs::path& path) {
    ordered_json j;
    j["session_id"] = m.session_id;
    j["device_type"] = std::string(to_string(m.device_type));
    j["frame_rate_hz"] = m.frame_rate_hz;
    j["frame_source"] = m.frame_source;
    if (m.ground_truth) j["ground_truth"] = *m.ground_truth;
    if (m.annotations) j["annotations"] = *m.annotations;
    if (m.screen_override_cm)
        j["screen_override_cm"] = ordered_json::array({m.screen_override_cm->first, m.screen_override_cm->second});
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::vector<FrameRecord> load_frames(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("missing frame file " + path.string());
    auto in = open_in(path);
    std::vector<FrameRecord> frames;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.filename().string() + " row " + std::to_string(row);
        FrameRecord f;
        try {
            f = frame_from(ordered_json::parse(line));
        } catch (const std::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        validate_frame(f, where);
        frames.push_back(f);
    }
    if (frames.empty()) throw DataError(path.string() + ": empty session");
    std::stable_sort(frames.begin(), frames.end(),
                     [](const FrameRecord& a, const FrameRecord& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].frame_index == frames[i - 1].frame_index)
            throw DataError(path.string() + ": duplicate frame_index " + std::to_string(frames[i].frame_index));
        if (!(frames[i].timestamp_ms > frames[i - 1].timestamp_ms))
            throw DataError(path.string() + ": non-monotonic timestamps at frame_index " +
                            std::to_string(frames[i].frame_index));
    }
    return frames;
}

std::vector<FrameRecord> load_session(const SessionManifest& manifest) { return load_frames(manifest.frame_source); }

void write_frames(const std::vector<FrameRecord>& frames, const fs::path& path) {
    auto out = open_out(path);
    for (const auto& f : frames) out << frame_json(f).dump() << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

void write_timeline(const DistractionTimeline& timeline, const fs::path& path) {
    if (timeline.empty()) throw DataError("refusing to write an empty timeline");
    auto out = open_out(path);
    out << "# attend-timeline v1 frame_rate_hz=" << format_double(timeline.frame_rate_hz) << '\n';
    out << "frame_index\ttimestamp_ms\tattentive\tmask\tsignals\n";
    for (const auto& f : timeline.frames) {
        out << f.frame_index << '\t' << format_double(f.timestamp_ms) << '\t' << (f.attentive() ? 1 : 0) << '\t'
            << static_cast<unsigned>(f.mask) << '\t' << mask_names(f.mask) << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

DistractionTimeline read_timeline(const fs::path& path) {
    auto in = open_in(path);
    DistractionTimeline t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# attend-timeline v1 frame_rate_hz=", 0) != 0)
        throw DataError(path.string() + ": missing timeline header");
    t.frame_rate_hz = parse_double(line.substr(line.find('=') + 1), path.string());
    if (!std::getline(in, line) || line != "frame_index\ttimestamp_ms\tattentive\tmask\tsignals")
        throw DataError(path.string() + ": missing column header");
    std::size_t row = 2;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::string where = path.filename().string() + " row " + std::to_string(row);
        const auto cols = split_tabs(line);
        if (cols.size() != 5) throw DataError(where + ": expected 5 columns");
        TimelineFrame f;
        f.frame_index = parse_uint(cols[0], where);
        f.timestamp_ms = parse_double(cols[1], where);
        const auto mask = parse_uint(cols[3], where);
        if (mask >= (1u << kSignalCount)) throw DataError(where + ": mask out of range");
        f.mask = static_cast<SignalMask>(mask);
        if (cols[2] != (f.attentive() ? "1" : "0")) throw DataError(where + ": attentive flag disagrees with mask");
        if (cols[4] != mask_names(f.mask)) throw DataError(where + ": signal names disagree with mask");
        t.frames.push_back(f);
    }
    if (t.frames.empty()) throw DataError(path.string() + ": empty timeline");
    return t;
}

void write_annotations(const std::vector<FrameAnnotation>& rows, const fs::path& path) {
    auto out = open_out(path);
    out << "frame_index\tdot_x_cm\tdot_y_cm\tspeaking\tyawning\n";
    for (const auto& r : rows) {
        out << r.frame_index << '\t';
        if (r.dot_cm)
            out << format_double(r.dot_cm->x) << '\t' << format_double(r.dot_cm->y);
        else
            out << "-\t-";
        out << '\t' << (r.speaking ? 1 : 0) << '\t' << (r.yawning ? 1 : 0) << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

std::vector<FrameAnnotation> read_annotations(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "frame_index\tdot_x_cm\tdot_y_cm\tspeaking\tyawning")
        throw DataError(path.string() + ": missing annotation header");
    std::vector<FrameAnnotation> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::string where = path.filename().string() + " row " + std::to_string(row);
        const auto cols = split_tabs(line);
        if (cols.size() != 5) throw DataError(where + ": expected 5 columns");
        FrameAnnotation a;
        a.frame_index = parse_uint(cols[0], where);
        if (cols[1] != "-") a.dot_cm = Point2{parse_double(cols[1], where), parse_double(cols[2], where)};
        a.speaking = parse_uint(cols[3], where) != 0;
        a.yawning = parse_uint(cols[4], where) != 0;
        rows.push_back(a);
    }
    return rows;
}

}  // namespace attend
