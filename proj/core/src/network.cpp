// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#include "polyact/network.hpp"

#include <string>

#include "polyact/errors.hpp"

namespace polyact {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw parameter_error("learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw parameter_error("momentum must be in [0, 1)");
    if (batch_size == 0) throw parameter_error("batch_size must be positive");
    if (epochs < 1) throw parameter_error("epochs must be positive");
}

void Network::set_tap_points(std::vector<std::size_t> taps) {
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (taps[i] >= layers.size())
            throw structural_error("tap point " + std::to_string(taps[i]) + " out of bounds for " +
                                   std::to_string(layers.size()) + " layers");
        if (i > 0 && taps[i] <= taps[i - 1]) throw structural_error("tap points must be strictly increasing");
    }
    taps_ = std::move(taps);
}

ForwardResult Network::forward(const Tensor& batch, RunMode mode, const LayerObserver* observer) {
    ForwardResult result;
    result.taps.reserve(taps_.size());
    Tensor cur = batch;
    std::size_t next_tap = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        cur = layers[i].forward(cur, mode);
        if (observer && *observer) (*observer)(i, layers[i], cur);
        if (next_tap < taps_.size() && taps_[next_tap] == i) {
            result.taps.push_back(cur);
            ++next_tap;
        }
    }
    logits_shape_ = cur.shape();
    tape_valid_ = true;
    result.logits = std::move(cur);
    return result;
}

void Network::backward(const Tensor& loss_grad_seed) {
    if (!tape_valid_) throw usage_error("backward called before any forward pass");
    if (loss_grad_seed.shape() != logits_shape_) {
        throw structural_error("loss gradient seed shape " + shape_to_string(loss_grad_seed.shape()) +
                               " does not match logits shape " + shape_to_string(logits_shape_));
    }
    zero_grad();

    // Propagation below the shallowest unfrozen parameter is unobservable.
    std::size_t lowest = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].has_params() && !layers[i].frozen) {
            lowest = i;
            break;
        }
    }
    if (lowest == layers.size()) return;

    Tensor dy = loss_grad_seed;
    for (std::size_t i = layers.size(); i > lowest; --i) {
        dy = layers[i - 1].backward(dy);
    }
}

void Network::sgd_step(const TrainConfig& cfg) {
    cfg.validate();
    for (auto& layer : layers) {
        if (layer.frozen) continue;
        layer.for_each_param([&](Tensor& p, Tensor& v) {
            if (!p.has_grad())
                throw usage_error("sgd_step on a parameter without gradients; run backward first");
            if (v.size() != p.size()) v = Tensor(std::vector<std::size_t>(p.shape()));
            auto g = p.grad();
            for (std::size_t i = 0; i < p.size(); ++i) {
                v[i] = cfg.momentum * v[i] + g[i];
                p[i] -= cfg.learning_rate * v[i];
            }
        });
    }
}

void Network::zero_grad() {
    for (auto& layer : layers) layer.zero_grad();
}

void Network::freeze_all(bool frozen) {
    for (auto& layer : layers) layer.frozen = frozen;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) layer.for_each_param([&](const Tensor& p) { n += p.size(); });
    return n;
}

}  // namespace polyact
