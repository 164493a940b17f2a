#include "attend/training.hpp"

#include <algorithm>

#include "attend/drowsiness.hpp"
#include "attend/error.hpp"
#include "attend/rng.hpp"
#include "attend/speaking.hpp"

namespace attend {

namespace fs = std::filesystem;

LabeledSession load_labeled_session(const fs::path& manifest_path) {
    LabeledSession s;
    s.manifest = load_manifest(manifest_path);
    if (!s.manifest.annotations) throw DataError(manifest_path.string() + ": no annotations for training");
    s.frames = load_session(s.manifest);
    s.annotations = read_annotations(*s.manifest.annotations);
    return s;
}

namespace {

ml::BoostConfig boost_config(const Config& c, ml::BoostMode mode) {
    ml::BoostConfig b;
    b.mode = mode;
    b.stages = c.gbt_stages;
    b.max_depth = c.gbt_max_depth;
    b.learning_rate = c.gbt_learning_rate;
    b.min_samples_leaf = c.gbt_min_samples_leaf;
    return b;
}

nlohmann::json boost_hyperparameters(const Config& c) {
    return {{"stages", c.gbt_stages},
            {"max_depth", c.gbt_max_depth},
            {"learning_rate", c.gbt_learning_rate},
            {"min_samples_leaf", c.gbt_min_samples_leaf}};
}

nlohmann::json gaze_payload(const GazeRegressor& r) { return {{"x", ml::to_json(r.x)}, {"y", ml::to_json(r.y)}}; }

GazeRegressor gaze_from_payload(const nlohmann::json& j) {
    return {ml::boosted_from_json(j.at("x")), ml::boosted_from_json(j.at("y"))};
}

}  // namespace

GazeRegressor train_gaze_model(std::span<const LabeledSession> sessions, DeviceType device, const Config& config,
                               ml::DataHash* hash) {
    std::vector<DotSession> dots;
    for (const auto& s : sessions) {
        if (s.manifest.device_type == device) dots.push_back({s.frames, s.annotations});
    }
    if (dots.empty()) throw DataError(std::string("no ") + std::string(to_string(device)) + " training sessions");
    if (hash) {
        for (const auto& d : dots) {
            for (const auto& sample : collect_dot_samples(d, config)) {
                const std::array<double, 4> row{sample.normalized.x, sample.normalized.y, sample.truth.x, sample.truth.y};
                hash->add(row);
            }
        }
    }
    return train_gaze_regressor(dots, config);
}

SpeakingDataset speaking_dataset(std::span<const LabeledSession> sessions, std::size_t budget, std::uint64_t seed) {
    LabeledWindows all;
    for (const auto& s : sessions) {
        auto w = labeled_speaking_windows(s.frames, s.annotations);
        for (std::size_t i = 0; i < w.features.size(); ++i) {
            all.features.push_back(std::move(w.features[i]));
            all.labels.push_back(w.labels[i]);
            all.yawning.push_back(w.yawning[i]);
        }
    }
    std::vector<std::size_t> pos, yawn_neg, neg;
    for (std::size_t i = 0; i < all.labels.size(); ++i) {
        if (all.labels[i] > 0.5)
            pos.push_back(i);
        else if (all.yawning[i])
            yawn_neg.push_back(i);
        else
            neg.push_back(i);
    }
    if (pos.empty() || (neg.empty() && yawn_neg.empty()))
        throw DataError("speaking training needs both speaking and silent windows");
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(pos));
    rng.shuffle(std::span<std::size_t>(yawn_neg));
    rng.shuffle(std::span<std::size_t>(neg));
    const std::size_t half = std::max<std::size_t>(1, budget / 2);
    const std::size_t n_pos = std::min(half, pos.size());
    const std::size_t n_yawn = std::min(half / 4, yawn_neg.size());
    const std::size_t n_neg = std::min(half - n_yawn, neg.size());
    std::vector<std::size_t> chosen(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
    chosen.insert(chosen.end(), yawn_neg.begin(), yawn_neg.begin() + static_cast<std::ptrdiff_t>(n_yawn));
    chosen.insert(chosen.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
    std::sort(chosen.begin(), chosen.end());
    SpeakingDataset d;
    for (auto i : chosen) {
        d.windows.push_back(all.features[i]);
        d.labels.push_back(all.labels[i]);
    }
    return d;
}

ml::TemporalCnn train_speaking_model(std::span<const LabeledSession> sessions, const Config& config,
                                     const TrainOptions& options, ml::DataHash* hash) {
    const auto data = speaking_dataset(sessions, options.speaking_windows, derive_seed(options.seed, 1));
    if (hash) {
        for (std::size_t i = 0; i < data.windows.size(); ++i) {
            hash->add(data.windows[i]);
            hash->add(data.labels[i]);
        }
    }
    ml::CnnConfig c;
    c.epochs = config.cnn_epochs;
    c.learning_rate = config.cnn_learning_rate;
    c.seed = derive_seed(options.seed, 2);
    return ml::train_cnn(data.windows, data.labels, c);
}

ml::BoostedEnsemble train_yawn_model(std::span<const LabeledSession> sessions, const Config& config,
                                     ml::DataHash* hash) {
    YawnDataset d;
    for (const auto& s : sessions) append_yawn_samples(s.frames, s.annotations, d);
    if (d.labels.empty()) throw DataError("yawn training found no usable frames");
    const auto positives = std::count(d.labels.begin(), d.labels.end(), 1.0);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(d.labels.size()))
        throw DataError("yawn training needs both yawning and non-yawning frames");
    if (hash) {
        hash->add(d.features.data());
        hash->add(d.labels);
    }
    return ml::fit_boosted(d.features, d.labels, boost_config(config, ml::BoostMode::logistic_classification));
}

TrainedModels train_models(std::span<const LabeledSession> sessions, const Config& config, const TrainOptions& options) {
    if (sessions.empty()) throw DataError("no training sessions");
    TrainedModels t;
    if (options.gaze) {
        ml::Artifact a;
        a.kind = "gaze_regressor";
        a.metadata.seed = options.seed;
        a.metadata.hyperparameters = boost_hyperparameters(config);
        a.metadata.hyperparameters["quality_floor"] = config.quality_floor;
        a.metadata.hyperparameters["quality_gate"] = config.quality_gate;
        a.payload = nlohmann::json::object();
        ml::DataHash hash;
        for (auto device : {DeviceType::desktop, DeviceType::mobile}) {
            const bool any = std::any_of(sessions.begin(), sessions.end(),
                                         [&](const LabeledSession& s) { return s.manifest.device_type == device; });
            if (!any) continue;
            auto r = train_gaze_model(sessions, device, config, &hash);
            a.payload[std::string(to_string(device))] = gaze_payload(r);
            (device == DeviceType::desktop ? t.models.desktop_gaze : t.models.mobile_gaze) = std::move(r);
        }
        a.metadata.data_hash = hash.hex();
        t.gaze = std::move(a);
    }
    if (options.speaking) {
        ml::DataHash hash;
        auto net = train_speaking_model(sessions, config, options, &hash);
        ml::Artifact a;
        a.kind = "speaking_cnn";
        a.metadata.seed = options.seed;
        a.metadata.data_hash = hash.hex();
        a.metadata.hyperparameters = {{"epochs", config.cnn_epochs},
                                      {"learning_rate", config.cnn_learning_rate},
                                      {"windows", options.speaking_windows},
                                      {"kernel", ml::TemporalCnn::kKernel},
                                      {"channels", {ml::TemporalCnn::kConv1Channels, ml::TemporalCnn::kConv2Channels}},
                                      {"hidden", ml::TemporalCnn::kHidden}};
        a.payload = ml::to_json(net);
        t.models.speaking = std::move(net);
        t.speaking = std::move(a);
    }
    if (options.yawn) {
        ml::DataHash hash;
        auto model = train_yawn_model(sessions, config, &hash);
        ml::Artifact a;
        a.kind = "yawn_classifier";
        a.metadata.seed = options.seed;
        a.metadata.data_hash = hash.hex();
        a.metadata.hyperparameters = boost_hyperparameters(config);
        a.payload = ml::to_json(model);
        t.models.yawn = std::move(model);
        t.yawn = std::move(a);
    }
    return t;
}

void save_models(const TrainedModels& t, const fs::path& dir) {
    if (t.gaze) ml::save_artifact(dir / kGazeArtifact, *t.gaze);
    if (t.speaking) ml::save_artifact(dir / kSpeakingArtifact, *t.speaking);
    if (t.yawn) ml::save_artifact(dir / kYawnArtifact, *t.yawn);
}

ModelBundle load_models(const fs::path& dir, bool gaze, bool speaking, bool yawn) {
    ModelBundle b;
    try {
        if (gaze) {
            const auto a = ml::load_artifact(dir / kGazeArtifact, "gaze_regressor");
            if (a.payload.contains("desktop")) b.desktop_gaze = gaze_from_payload(a.payload["desktop"]);
            if (a.payload.contains("mobile")) b.mobile_gaze = gaze_from_payload(a.payload["mobile"]);
        }
        if (speaking) b.speaking = ml::cnn_from_json(ml::load_artifact(dir / kSpeakingArtifact, "speaking_cnn").payload);
        if (yawn) b.yawn = ml::boosted_from_json(ml::load_artifact(dir / kYawnArtifact, "yawn_classifier").payload);
    } catch (const ArtifactError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArtifactError("corrupt artifact in " + dir.string() + ": " + e.what());
    }
    return b;
}

}  // namespace attend
