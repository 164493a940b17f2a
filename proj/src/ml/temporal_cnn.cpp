#include "attend/ml/temporal_cnn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "attend/rng.hpp"

namespace attend::ml {

namespace {

double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

void glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w) v = rng.uniform(-limit, limit);
}

}  // namespace

TemporalCnn::TemporalCnn(std::size_t input_length, std::uint64_t seed) : input_length_(input_length) {
    if (input_length < 2 * (kKernel - 1) + 1) throw std::invalid_argument("TemporalCnn: input too short");
    params_.assign(total(), 0.0);
    Rng rng(seed);
    std::span<double> p(params_);
    glorot(p.subspan(w1(), b1() - w1()), kKernel, kConv1Channels * kKernel, rng);
    glorot(p.subspan(w2(), b2() - w2()), kConv1Channels * kKernel, kConv2Channels * kKernel, rng);
    glorot(p.subspan(w3(), b3() - w3()), flat_len(), kHidden, rng);
    glorot(p.subspan(w4(), b4() - w4()), kHidden, 1, rng);
}

void TemporalCnn::forward(std::span<const double> x, Activations& act) const {
    if (x.size() != input_length_) {
        throw std::invalid_argument("TemporalCnn: expected window of " + std::to_string(input_length_) + ", got " +
                                    std::to_string(x.size()));
    }
    const double* p = params_.data();
    const std::size_t l1 = conv1_len(), l2 = conv2_len(), nf = flat_len();

    act.a1.assign(kConv1Channels * l1, 0.0);
    for (std::size_t c = 0; c < kConv1Channels; ++c) {
        const double* w = p + w1() + c * kKernel;
        for (std::size_t t = 0; t < l1; ++t) {
            double z = p[b1() + c];
            for (std::size_t k = 0; k < kKernel; ++k) z += w[k] * x[t + k];
            act.a1[c * l1 + t] = std::tanh(z);
        }
    }

    act.a2.assign(kConv2Channels * l2, 0.0);
    for (std::size_t o = 0; o < kConv2Channels; ++o) {
        double* out = act.a2.data() + o * l2;
        for (std::size_t t = 0; t < l2; ++t) out[t] = p[b2() + o];
        for (std::size_t c = 0; c < kConv1Channels; ++c) {
            const double* w = p + w2() + (o * kConv1Channels + c) * kKernel;
            const double* in = act.a1.data() + c * l1;
            for (std::size_t t = 0; t < l2; ++t) out[t] += w[0] * in[t] + w[1] * in[t + 1] + w[2] * in[t + 2];
        }
        for (std::size_t t = 0; t < l2; ++t) out[t] = std::tanh(out[t]);
    }

    act.a3.assign(kHidden, 0.0);
    for (std::size_t j = 0; j < kHidden; ++j) {
        const double* w = p + w3() + j * nf;
        double z = p[b3() + j];
        for (std::size_t m = 0; m < nf; ++m) z += w[m] * act.a2[m];
        act.a3[j] = std::tanh(z);
    }

    double logit = p[b4()];
    for (std::size_t j = 0; j < kHidden; ++j) logit += p[w4() + j] * act.a3[j];
    act.logit = logit;
}

double TemporalCnn::predict(std::span<const double> window) const {
    Activations act;
    forward(window, act);
    return std::clamp(1.0 / (1.0 + std::exp(-act.logit)), 1e-12, 1.0 - 1e-12);
}

double TemporalCnn::loss_and_gradient(std::span<const double> x, double label, std::vector<double>* grad) const {
    Activations act;
    forward(x, act);
    const double loss = softplus(act.logit) - label * act.logit;
    if (grad == nullptr) return loss;

    grad->assign(params_.size(), 0.0);
    double* g = grad->data();
    const double* p = params_.data();
    const std::size_t l1 = conv1_len(), l2 = conv2_len(), nf = flat_len();

    const double d_logit = 1.0 / (1.0 + std::exp(-act.logit)) - label;
    g[b4()] = d_logit;
    std::vector<double> dz3(kHidden);
    for (std::size_t j = 0; j < kHidden; ++j) {
        g[w4() + j] = d_logit * act.a3[j];
        dz3[j] = d_logit * p[w4() + j] * (1.0 - act.a3[j] * act.a3[j]);
    }

    std::vector<double> dflat(nf, 0.0);
    for (std::size_t j = 0; j < kHidden; ++j) {
        g[b3() + j] = dz3[j];
        double* gw = g + w3() + j * nf;
        const double* w = p + w3() + j * nf;
        for (std::size_t m = 0; m < nf; ++m) {
            gw[m] = dz3[j] * act.a2[m];
            dflat[m] += dz3[j] * w[m];
        }
    }

    std::vector<double> da1(kConv1Channels * l1, 0.0);
    for (std::size_t o = 0; o < kConv2Channels; ++o) {
        double bias_grad = 0.0;
        for (std::size_t t = 0; t < l2; ++t) {
            const double a = act.a2[o * l2 + t];
            dflat[o * l2 + t] *= (1.0 - a * a);
            bias_grad += dflat[o * l2 + t];
        }
        g[b2() + o] = bias_grad;
        const double* dz = dflat.data() + o * l2;
        for (std::size_t c = 0; c < kConv1Channels; ++c) {
            const std::size_t wi = w2() + (o * kConv1Channels + c) * kKernel;
            const double* in = act.a1.data() + c * l1;
            double* din = da1.data() + c * l1;
            for (std::size_t k = 0; k < kKernel; ++k) {
                double acc = 0.0;
                const double w = p[wi + k];
                for (std::size_t t = 0; t < l2; ++t) {
                    acc += dz[t] * in[t + k];
                    din[t + k] += dz[t] * w;
                }
                g[wi + k] = acc;
            }
        }
    }

    for (std::size_t c = 0; c < kConv1Channels; ++c) {
        double bias_grad = 0.0;
        std::array<double, kKernel> wg{};
        for (std::size_t t = 0; t < l1; ++t) {
            const double a = act.a1[c * l1 + t];
            const double dz = da1[c * l1 + t] * (1.0 - a * a);
            bias_grad += dz;
            for (std::size_t k = 0; k < kKernel; ++k) wg[k] += dz * x[t + k];
        }
        g[b1() + c] = bias_grad;
        for (std::size_t k = 0; k < kKernel; ++k) g[w1() + c * kKernel + k] = wg[k];
    }
    return loss;
}

TemporalCnn train_cnn(const std::vector<std::vector<double>>& windows, std::span<const double> labels,
                      const CnnConfig& config) {
    if (windows.empty()) throw std::invalid_argument("train_cnn: empty dataset");
    if (windows.size() != labels.size()) throw std::invalid_argument("train_cnn: window/label count mismatch");
    const std::size_t len = windows.front().size();
    for (const auto& w : windows) {
        if (w.size() != len) throw std::invalid_argument("train_cnn: inconsistent window lengths");
        for (double v : w) {
            if (!std::isfinite(v)) throw std::invalid_argument("train_cnn: non-finite sample");
        }
    }
    for (double l : labels) {
        if (l != 0.0 && l != 1.0) throw std::invalid_argument("train_cnn: labels must be 0 or 1");
    }

    Rng rng(config.seed);
    TemporalCnn net(len, rng.next_u64());
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        for (std::size_t idx : order) {
            total += net.loss_and_gradient(windows[idx], labels[idx], &grad);
            auto params = net.parameters();
            for (std::size_t k = 0; k < params.size(); ++k) params[k] -= config.learning_rate * grad[k];
        }
        net.training_loss.push_back(total / static_cast<double>(windows.size()));
    }
    return net;
}

double cnn_gradient_check(const TemporalCnn& net, std::span<const double> window, double label) {
    constexpr double h = 1e-4;
    std::vector<double> analytic;
    net.loss_and_gradient(window, label, &analytic);
    TemporalCnn probe = net;
    auto params = probe.parameters();
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = params[k];
        params[k] = saved + h;
        const double up = probe.loss_and_gradient(window, label, nullptr);
        params[k] = saved - h;
        const double down = probe.loss_and_gradient(window, label, nullptr);
        params[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

nlohmann::json to_json(const TemporalCnn& net) {
    return {{"input_length", net.input_length_},
            {"kernel", TemporalCnn::kKernel},
            {"conv1_channels", TemporalCnn::kConv1Channels},
            {"conv2_channels", TemporalCnn::kConv2Channels},
            {"hidden", TemporalCnn::kHidden},
            {"training_loss", net.training_loss},
            {"parameters", net.params_}};
}

TemporalCnn cnn_from_json(const nlohmann::json& j) {
    if (j.at("kernel").get<std::size_t>() != TemporalCnn::kKernel ||
        j.at("conv1_channels").get<std::size_t>() != TemporalCnn::kConv1Channels ||
        j.at("conv2_channels").get<std::size_t>() != TemporalCnn::kConv2Channels ||
        j.at("hidden").get<std::size_t>() != TemporalCnn::kHidden)
        throw std::invalid_argument("CNN artifact has an incompatible architecture");
    TemporalCnn net(j.at("input_length").get<std::size_t>(), 0);
    auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) throw std::invalid_argument("CNN artifact parameter count mismatch");
    net.params_ = std::move(params);
    net.training_loss = j.at("training_loss").get<std::vector<double>>();
    return net;
}

}  // namespace attend::ml
