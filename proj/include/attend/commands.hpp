#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attend/config.hpp"
#include "attend/frame.hpp"
#include "attend/gaze_model.hpp"

namespace attend {

/// Flags shared by every subcommand.
struct GlobalOptions {
    std::uint64_t seed = 7;
    std::optional<std::filesystem::path> config_file;
    std::vector<std::string> overrides;
    std::size_t jobs = 1;
    std::filesystem::path output = "attend_out";
};

struct SimulateOptions {
    std::string suite = "default";
    std::optional<std::filesystem::path> script;
    /// Sessions per split and device; 0 keeps the preset.
    std::size_t sessions = 0;
    /// Session length (s); 0 keeps the preset.
    double duration_s = 0.0;
};

struct TrainOptionsCli {
    std::filesystem::path suite;
    /// Subset of {gaze, speaking, yawn}; empty trains all three.
    std::vector<std::string> only;
};

/// Inputs are suite directories (filtered by split), session directories
/// or manifest files.
struct ScoreOptions {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path models = "models";
    std::optional<std::string> device;
    std::string split = "test";
};

struct EvaluateOptions {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path timelines;
    std::string split = "test";
    bool macro = false;
};

struct AblateOptions {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path models = "models";
    std::string split = "test";
    /// "gaze", "signals" or "both".
    std::string table = "both";
    bool macro = false;
};

/// Defaults, then the config file, then --set overrides; validated.
Config resolve_config(const GlobalOptions& global);

/// One session found among the inputs.
struct SessionRef {
    std::filesystem::path manifest;
    std::string split;
    std::optional<Orientation> true_orientation;
};

/// Expands inputs into manifests. Suite directories contribute the
/// sessions of `split` ("all" keeps every split). Throws DataError when an
/// input does not exist or nothing is found.
std::vector<SessionRef> find_sessions(const std::vector<std::filesystem::path>& inputs, const std::string& split);

int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options, std::ostream& log);
int cmd_train(const GlobalOptions& global, const TrainOptionsCli& options, std::ostream& log);
int cmd_score(const GlobalOptions& global, const ScoreOptions& options, std::ostream& log);
int cmd_evaluate(const GlobalOptions& global, const EvaluateOptions& options, std::ostream& log);
int cmd_ablate(const GlobalOptions& global, const AblateOptions& options, std::ostream& log);

/// CLI exit code for an exception: 2 config, 3 data, 4 missing artifact, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace attend
