#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace attend::ml {

struct CnnConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
};

/// Small 1-D CNN for binary classification of fixed-length sequences:
/// conv(k=3, 1->8) tanh, conv(k=3, 8->16) tanh, dense(50) tanh, dense(1) sigmoid.
/// Valid convolutions, stride 1, no pooling.
class TemporalCnn {
public:
    static constexpr std::size_t kKernel = 3;
    static constexpr std::size_t kConv1Channels = 8;
    static constexpr std::size_t kConv2Channels = 16;
    static constexpr std::size_t kHidden = 50;

    TemporalCnn() = default;

    /// Glorot-uniform weights from `seed`, zero biases.
    TemporalCnn(std::size_t input_length, std::uint64_t seed);

    std::size_t input_length() const { return input_length_; }
    std::size_t parameter_count() const { return params_.size(); }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Probability of the positive class. Throws on a length mismatch.
    double predict(std::span<const double> window) const;

    /// Binary cross-entropy for one example; fills `grad` (resized to
    /// parameter_count()) with dLoss/dParameter when non-null.
    double loss_and_gradient(std::span<const double> window, double label, std::vector<double>* grad) const;

    /// Mean training log-loss per epoch, as accumulated during training.
    std::vector<double> training_loss;

private:
    std::size_t conv1_len() const { return input_length_ - (kKernel - 1); }
    std::size_t conv2_len() const { return input_length_ - 2 * (kKernel - 1); }
    std::size_t flat_len() const { return conv2_len() * kConv2Channels; }

    // Offsets into params_.
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return w1() + kConv1Channels * kKernel; }
    std::size_t w2() const { return b1() + kConv1Channels; }
    std::size_t b2() const { return w2() + kConv2Channels * kConv1Channels * kKernel; }
    std::size_t w3() const { return b2() + kConv2Channels; }
    std::size_t b3() const { return w3() + kHidden * flat_len(); }
    std::size_t w4() const { return b3() + kHidden; }
    std::size_t b4() const { return w4() + kHidden; }
    std::size_t total() const { return b4() + 1; }

    struct Activations {
        std::vector<double> a1, a2, a3;
        double logit = 0.0;
    };
    void forward(std::span<const double> x, Activations& act) const;

    std::size_t input_length_ = 0;
    std::vector<double> params_;

    friend nlohmann::json to_json(const TemporalCnn& net);
    friend TemporalCnn cnn_from_json(const nlohmann::json& j);
};

/// Trains with plain per-example SGD, shuffling each epoch from config.seed.
/// Throws std::invalid_argument on an empty set, mixed window lengths,
/// labels outside {0, 1}, or a count mismatch. epochs = 0 returns the
/// initialized network.
TemporalCnn train_cnn(const std::vector<std::vector<double>>& windows, std::span<const double> labels,
                      const CnnConfig& config = {});

/// Max relative error between analytic and central-difference (h = 1e-4)
/// gradients over all parameters; relative error is |a - n| / max(|a|, |n|, 1e-6).
double cnn_gradient_check(const TemporalCnn& net, std::span<const double> window, double label);

nlohmann::json to_json(const TemporalCnn& net);
TemporalCnn cnn_from_json(const nlohmann::json& j);

}  // namespace attend::ml
