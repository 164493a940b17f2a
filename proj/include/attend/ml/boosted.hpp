#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "attend/ml/matrix.hpp"

namespace attend::ml {

enum class BoostMode { squared_error_regression, logistic_classification };

struct BoostConfig {
    BoostMode mode = BoostMode::squared_error_regression;
    std::size_t stages = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_samples_leaf = 1;
};

/// Axis-aligned regression tree stored as a flat node array; node 0 is the root.
struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    /// Samples with x[feature] <= threshold go left.
    double predict(std::span<const double> x) const;
};

/// Gradient-boosted tree ensemble.
///
/// raw score = base_prediction + learning_rate * sum of tree outputs; in
/// logistic mode the score is a log-odds and predictions go through the
/// logistic link.
struct BoostedEnsemble {
    BoostMode mode = BoostMode::squared_error_regression;
    std::size_t feature_count = 0;
    double learning_rate = 0.1;
    double base_prediction = 0.0;
    std::vector<RegressionTree> trees;
    /// Training loss after the base fit (index 0) and after each stage.
    std::vector<double> training_loss;

    double raw_score(std::span<const double> x) const;
};

/// Fits an ensemble. Throws std::invalid_argument on empty data, size
/// mismatch, fewer than 10 rows, or non-finite values. Logistic mode needs
/// targets in {0, 1}.
BoostedEnsemble fit_boosted(const FeatureMatrix& X, std::span<const double> y, const BoostConfig& config = {});

/// Regression value, or probability in (0, 1) for classifiers. Throws on a
/// dimension mismatch.
double predict_boosted(const BoostedEnsemble& model, std::span<const double> x);

nlohmann::json to_json(const BoostedEnsemble& model);
BoostedEnsemble boosted_from_json(const nlohmann::json& j);

}  // namespace attend::ml
