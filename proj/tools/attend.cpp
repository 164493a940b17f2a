#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "attend/commands.hpp"
#include "attend/config.hpp"

int main(int argc, char** argv) {
    using namespace attend;
    CLI::App app{"Offline attention scoring for ad-viewing sessions"};
    app.require_subcommand(1);
    app.fallthrough();
    app.footer(describe_defaults() +
               "\nExit codes: 0 success, 2 config error, 3 data error, 4 missing artifact.");

    GlobalOptions global;
    std::string config_file;
    app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
    app.add_option("--config", config_file, "JSON config file");
    app.add_option("--set", global.overrides, "Override a config key (key=value), repeatable");
    app.add_option("--jobs", global.jobs, "Sessions processed in parallel")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--output", global.output, "Output directory")->capture_default_str();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic session suite");
    simulate->add_option("--suite", sim.suite, "Preset: default, small, gaze, offset, clean")->capture_default_str();
    simulate->add_option("--script", sim.script, "Scenario script (JSON) for a single session");
    simulate->add_option("--sessions", sim.sessions, "Sessions per split and device (0 keeps the preset)")
        ->capture_default_str();
    simulate->add_option("--duration", sim.duration_s, "Session length in seconds (0 keeps the preset)")
        ->capture_default_str();

    TrainOptionsCli tr;
    auto* train = app.add_subcommand("train", "Train the gaze regressors, speaking CNN and yawn classifier");
    train->add_option("--suite", tr.suite, "Suite directory (its training split is used)")->required();
    train->add_option("--only", tr.only, "Train a subset: gaze, speaking, yawn")->delimiter(',');

    ScoreOptions sc;
    auto* score = app.add_subcommand("score", "Score sessions into timelines and summaries");
    score->add_option("inputs", sc.inputs, "Suite directories, session directories or manifests")->required();
    score->add_option("--models", sc.models, "Artifact directory")->capture_default_str();
    score->add_option("--device", sc.device, "Only score desktop or mobile sessions");
    score->add_option("--split", sc.split, "Suite split to score (train, test, all)")->capture_default_str();

    EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "Compare timelines with ground truth");
    evaluate->add_option("inputs", ev.inputs, "Suite directories, session directories or manifests")->required();
    evaluate->add_option("--timelines", ev.timelines, "Directory of scored timelines")->required();
    evaluate->add_option("--split", ev.split, "Suite split to evaluate")->capture_default_str();
    evaluate->add_flag("--macro", ev.macro, "Average per session instead of over frames");

    AblateOptions ab;
    auto* ablate = app.add_subcommand("ablate", "Run the ablation tables");
    ablate->add_option("inputs", ab.inputs, "Suite directories, session directories or manifests")->required();
    ablate->add_option("--models", ab.models, "Artifact directory")->capture_default_str();
    ablate->add_option("--split", ab.split, "Suite split to use")->capture_default_str();
    ablate->add_option("--table", ab.table, "gaze, signals or both")->capture_default_str();
    ablate->add_flag("--macro", ab.macro, "Average per session instead of over frames");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!config_file.empty()) global.config_file = config_file;

    try {
        if (simulate->parsed()) return cmd_simulate(global, sim, std::cerr);
        if (train->parsed()) return cmd_train(global, tr, std::cerr);
        if (score->parsed()) return cmd_score(global, sc, std::cerr);
        if (evaluate->parsed()) return cmd_evaluate(global, ev, std::cerr);
        if (ablate->parsed()) return cmd_ablate(global, ab, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}
