// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "polyact/layer.hpp"
#include "polyact/tensor.hpp"

namespace polyact {

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.9;       // in [0, 1)
    std::size_t batch_size = 128;
    int epochs = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ForwardResult {
    Tensor logits;
    std::vector<Tensor> taps;  // one per tap point, captured after that layer
};

/// Called after every layer of a forward pass with (index, layer, output).
/// Observers only read; logits with and without an observer are bit-identical.
using LayerObserver = std::function<void(std::size_t, const Layer&, const Tensor&)>;

/// Sequential stack of layers with reverse-mode differentiation.
///
/// forward records the per-layer state backward consumes; the pair is
/// single-threaded per instance. Copying a Network deep-copies parameters,
/// so clones train independently. Non-finite values propagate through
/// forward passes as data and never raise.
class Network {
public:
    std::vector<Layer> layers;

    void set_tap_points(std::vector<std::size_t> taps);
    const std::vector<std::size_t>& tap_points() const { return taps_; }

    ForwardResult forward(const Tensor& batch, RunMode mode = RunMode::Infer,
                          const LayerObserver* observer = nullptr);

    /// Reverse-mode pass from a loss gradient seed of logits shape.
    /// Fills the grad slot of every unfrozen parameter with the exact
    /// gradient of the recorded computation; frozen layers stay at zero.
    void backward(const Tensor& loss_grad_seed);

    /// Momentum SGD on every unfrozen parameter: v <- m v + g, p <- p - lr v.
    void sgd_step(const TrainConfig& cfg);

    void zero_grad();
    void freeze_all(bool frozen);
    bool has_forward_tape() const { return tape_valid_; }

    std::size_t parameter_count() const;

private:
    std::vector<std::size_t> taps_;
    std::vector<std::size_t> logits_shape_;
    bool tape_valid_ = false;
};

}  // namespace polyact
