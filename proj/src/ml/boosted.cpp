#include "attend/ml/boosted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace attend::ml {

namespace {

double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double log_loss(double score, double label) { return softplus(score) - label * score; }

double stage_loss(BoostMode mode, std::span<const double> score, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (mode == BoostMode::squared_error_regression) {
            const double r = y[i] - score[i];
            total += r * r;
        } else {
            total += log_loss(score[i], y[i]);
        }
    }
    return total / static_cast<double>(y.size());
}

/// Midpoint that is guaranteed to separate lo from hi.
double split_point(double lo, double hi) {
    const double mid = lo + (hi - lo) * 0.5;
    return (mid >= hi) ? lo : mid;
}

struct NodeStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
};

struct SplitSearch {
    double left_sum = 0.0;
    std::size_t left_count = 0;
    double last_value = 0.0;
    bool best_found = false;
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
};

/// Grows one tree on `target` level by level using presorted feature orders.
/// Returns the tree (leaf values unset) and leaves each sample's leaf id in node_of.
RegressionTree grow_tree(const FeatureMatrix& X, std::span<const double> target,
                         const std::vector<std::vector<std::size_t>>& order, const BoostConfig& config,
                         std::vector<int>& node_of) {
    const std::size_t n = X.rows();
    RegressionTree tree;
    tree.nodes.push_back({});
    std::fill(node_of.begin(), node_of.end(), 0);

    std::vector<int> frontier{0};
    for (std::size_t depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
        std::vector<NodeStats> stats(tree.nodes.size());
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = stats[static_cast<std::size_t>(node_of[i])];
            s.sum += target[i];
            s.sum_sq += target[i] * target[i];
            ++s.count;
        }
        std::vector<char> active(tree.nodes.size(), 0);
        for (int id : frontier) {
            if (stats[static_cast<std::size_t>(id)].count >= 2 * config.min_samples_leaf) active[static_cast<std::size_t>(id)] = 1;
        }

        std::vector<SplitSearch> search(tree.nodes.size());
        for (std::size_t f = 0; f < X.cols(); ++f) {
            for (auto& s : search) {
                s.left_sum = 0.0;
                s.left_count = 0;
            }
            for (std::size_t i : order[f]) {
                const auto k = static_cast<std::size_t>(node_of[i]);
                if (!active[k]) continue;
                auto& s = search[k];
                const double v = X.at(i, f);
                const auto& st = stats[k];
                if (s.left_count >= config.min_samples_leaf && v > s.last_value &&
                    st.count - s.left_count >= config.min_samples_leaf) {
                    const double nl = static_cast<double>(s.left_count);
                    const double nr = static_cast<double>(st.count - s.left_count);
                    const double right_sum = st.sum - s.left_sum;
                    const double gain = s.left_sum * s.left_sum / nl + right_sum * right_sum / nr -
                                        st.sum * st.sum / static_cast<double>(st.count);
                    const double floor = 1e-12 * std::max(st.sum_sq, 1e-300);
                    if (gain > floor && (!s.best_found || gain > s.best_gain)) {
                        s.best_found = true;
                        s.best_gain = gain;
                        s.best_feature = static_cast<int>(f);
                        s.best_threshold = split_point(s.last_value, v);
                    }
                }
                s.left_sum += target[i];
                ++s.left_count;
                s.last_value = v;
            }
        }

        std::vector<int> next;
        for (int id : frontier) {
            const auto& s = search[static_cast<std::size_t>(id)];
            if (!active[static_cast<std::size_t>(id)] || !s.best_found) continue;
            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({});
            tree.nodes.push_back({});
            auto& node = tree.nodes[static_cast<std::size_t>(id)];
            node.feature = s.best_feature;
            node.threshold = s.best_threshold;
            node.left = left;
            node.right = left + 1;
            next.push_back(left);
            next.push_back(left + 1);
        }
        if (next.empty()) break;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
            if (node.feature >= 0) {
                node_of[i] = X.at(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
            }
        }
        frontier = std::move(next);
    }
    return tree;
}

void check_inputs(const FeatureMatrix& X, std::span<const double> y, const BoostConfig& config) {
    if (X.rows() == 0 || y.empty()) throw std::invalid_argument("fit_boosted: empty data");
    if (X.rows() != y.size()) throw std::invalid_argument("fit_boosted: feature/target size mismatch");
    if (X.rows() < 10) throw std::invalid_argument("fit_boosted: need at least 10 samples");
    if (X.cols() == 0) throw std::invalid_argument("fit_boosted: no features");
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0))
        throw std::invalid_argument("fit_boosted: learning_rate must be in (0, 1]");
    if (config.max_depth == 0 || config.min_samples_leaf == 0)
        throw std::invalid_argument("fit_boosted: max_depth and min_samples_leaf must be positive");
    for (double v : X.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit_boosted: non-finite feature value");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit_boosted: non-finite target");
        if (config.mode == BoostMode::logistic_classification && v != 0.0 && v != 1.0)
            throw std::invalid_argument("fit_boosted: classification targets must be 0 or 1");
    }
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t k = 0;
    while (nodes[k].feature >= 0) {
        const auto& node = nodes[k];
        k = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
    }
    return nodes[k].value;
}

double BoostedEnsemble::raw_score(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return base_prediction + learning_rate * sum;
}

BoostedEnsemble fit_boosted(const FeatureMatrix& X, std::span<const double> y, const BoostConfig& config) {
    check_inputs(X, y, config);
    const std::size_t n = X.rows();

    BoostedEnsemble model;
    model.mode = config.mode;
    model.feature_count = X.cols();
    model.learning_rate = config.learning_rate;

    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (config.mode == BoostMode::squared_error_regression) {
        model.base_prediction = (*ymin == *ymax) ? *ymin : std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    } else {
        double p = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        p = std::clamp(p, 1e-6, 1.0 - 1e-6);
        model.base_prediction = std::log(p / (1.0 - p));
    }

    std::vector<std::vector<std::size_t>> order(X.cols());
    for (std::size_t f = 0; f < X.cols(); ++f) {
        auto& o = order[f];
        o.resize(n);
        std::iota(o.begin(), o.end(), std::size_t{0});
        std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return X.at(a, f) < X.at(b, f); });
    }

    std::vector<double> score(n, model.base_prediction);
    std::vector<double> target(n);
    std::vector<int> node_of(n, 0);
    model.training_loss.push_back(stage_loss(config.mode, score, y));

    const double tiny = 1e-12 * std::max({1.0, std::abs(*ymin), std::abs(*ymax)});
    for (std::size_t stage = 0; stage < config.stages; ++stage) {
        double max_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = config.mode == BoostMode::squared_error_regression ? y[i] - score[i] : y[i] - logistic(score[i]);
            max_abs = std::max(max_abs, std::abs(target[i]));
        }
        if (config.mode == BoostMode::squared_error_regression && max_abs <= tiny) break;

        RegressionTree tree = grow_tree(X, target, order, config, node_of);

        // Leaf values: mean residual (squared error) or a damped Newton step
        // with backtracking so that each leaf's log-loss cannot increase.
        const std::size_t node_count = tree.nodes.size();
        std::vector<double> grad(node_count, 0.0), hess(node_count, 0.0);
        std::vector<std::size_t> count(node_count, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(node_of[i]);
            grad[k] += target[i];
            ++count[k];
            if (config.mode == BoostMode::logistic_classification) {
                const double p = logistic(score[i]);
                hess[k] += p * (1.0 - p);
            }
        }
        for (std::size_t k = 0; k < node_count; ++k) {
            if (tree.nodes[k].feature >= 0 || count[k] == 0) continue;
            if (config.mode == BoostMode::squared_error_regression) {
                tree.nodes[k].value = grad[k] / static_cast<double>(count[k]);
            } else if (hess[k] > 1e-12) {
                tree.nodes[k].value = grad[k] / hess[k];
            }
        }
        if (config.mode == BoostMode::logistic_classification) {
            std::vector<std::vector<std::size_t>> members(node_count);
            for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(node_of[i])].push_back(i);
            for (std::size_t k = 0; k < node_count; ++k) {
                auto& leaf = tree.nodes[k];
                if (leaf.feature >= 0 || count[k] == 0 || leaf.value == 0.0) continue;
                double before = 0.0;
                for (std::size_t i : members[k]) before += log_loss(score[i], y[i]);
                double step = config.learning_rate * leaf.value;
                for (int attempt = 0; attempt < 60; ++attempt) {
                    double after = 0.0;
                    for (std::size_t i : members[k]) after += log_loss(score[i] + step, y[i]);
                    if (after <= before) break;
                    step *= 0.5;
                    if (attempt == 59) step = 0.0;
                }
                leaf.value = step / config.learning_rate;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            score[i] += config.learning_rate * tree.nodes[static_cast<std::size_t>(node_of[i])].value;
        }
        model.trees.push_back(std::move(tree));
        model.training_loss.push_back(stage_loss(config.mode, score, y));
    }
    return model;
}

double predict_boosted(const BoostedEnsemble& model, std::span<const double> x) {
    if (x.size() != model.feature_count) {
        throw std::invalid_argument("predict_boosted: expected " + std::to_string(model.feature_count) +
                                    " features, got " + std::to_string(x.size()));
    }
    const double raw = model.raw_score(x);
    if (model.mode == BoostMode::squared_error_regression) return raw;
    return std::clamp(logistic(raw), 1e-12, 1.0 - 1e-12);
}

nlohmann::json to_json(const BoostedEnsemble& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : t.nodes) {
            if (node.feature < 0)
                nodes.push_back({{"value", node.value}});
            else
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right}});
        }
        trees.push_back(std::move(nodes));
    }
    return {{"mode", model.mode == BoostMode::squared_error_regression ? "squared_error_regression"
                                                                       : "logistic_classification"},
            {"feature_count", model.feature_count},
            {"learning_rate", model.learning_rate},
            {"base_prediction", model.base_prediction},
            {"training_loss", model.training_loss},
            {"trees", std::move(trees)}};
}

BoostedEnsemble boosted_from_json(const nlohmann::json& j) {
    BoostedEnsemble m;
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "squared_error_regression")
        m.mode = BoostMode::squared_error_regression;
    else if (mode == "logistic_classification")
        m.mode = BoostMode::logistic_classification;
    else
        throw std::invalid_argument("unknown boosting mode '" + mode + "'");
    m.feature_count = j.at("feature_count").get<std::size_t>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.base_prediction = j.at("base_prediction").get<double>();
    m.training_loss = j.at("training_loss").get<std::vector<double>>();
    for (const auto& jt : j.at("trees")) {
        RegressionTree t;
        for (const auto& jn : jt) {
            RegressionTree::Node node;
            if (jn.contains("feature")) {
                node.feature = jn.at("feature").get<int>();
                node.threshold = jn.at("threshold").get<double>();
                node.left = jn.at("left").get<int>();
                node.right = jn.at("right").get<int>();
            } else {
                node.value = jn.at("value").get<double>();
            }
            t.nodes.push_back(node);
        }
        for (const auto& node : t.nodes) {
            const auto size = static_cast<int>(t.nodes.size());
            if (node.feature >= 0 && (node.left <= 0 || node.left >= size || node.right <= 0 || node.right >= size ||
                                      static_cast<std::size_t>(node.feature) >= m.feature_count))
                throw std::invalid_argument("corrupt tree node");
        }
        if (t.nodes.empty()) throw std::invalid_argument("empty tree");
        m.trees.push_back(std::move(t));
    }
    return m;
}

}  // namespace attend::ml
