// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <variant>

#include "polyact/activation.hpp"
#include "polyact/minmax.hpp"
#include "polyact/rng.hpp"
#include "polyact/tensor.hpp"

namespace polyact {

enum class LayerKind { Dense, Conv2d, AvgPool2d, Flatten, Activation, MinMaxNorm };

/// Forward-pass statistics mode, relevant only to MinMaxNorm layers.
enum class RunMode { Train, Infer, InferTrueMinMax };

struct DenseLayer {
    Tensor weight;  // (out_features, in_features)
    Tensor bias;    // (out_features)
    Tensor weight_velocity, bias_velocity;
    Tensor input_cache;

    std::size_t in_features() const { return weight.extent(1); }
    std::size_t out_features() const { return weight.extent(0); }

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy, bool frozen);
};

struct Conv2dLayer {
    std::size_t in_channels = 0, out_channels = 0;
    std::size_t kernel_h = 0, kernel_w = 0;
    std::size_t stride = 1, padding = 0;
    Tensor weight;  // (out_channels, in_channels, kernel_h, kernel_w)
    Tensor bias;    // (out_channels)
    Tensor weight_velocity, bias_velocity;
    std::vector<std::size_t> input_shape_cache;
    std::vector<double> col_cache;  // im2col patches of the last forward

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy, bool frozen);
};

struct AvgPool2dLayer {
    std::size_t kernel = 2;
    std::size_t stride = 2;
    std::vector<std::size_t> input_shape_cache;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
};

struct FlattenLayer {
    std::vector<std::size_t> input_shape_cache;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
};

struct ActivationLayer {
    ActivationSpec spec;
    Tensor input_cache;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
};

struct MinMaxNormLayer {
    MinMaxState state;
    std::vector<double> scale_cache;
    std::vector<std::size_t> input_shape_cache;

    Tensor forward(const Tensor& x, RunMode mode);
    Tensor backward(const Tensor& dy);
};

/// One step of a sequential network. Parameter gradients land in the
/// grad slots of the owned tensors; frozen layers keep them at zero.
struct Layer {
    std::variant<DenseLayer, Conv2dLayer, AvgPool2dLayer, FlattenLayer, ActivationLayer, MinMaxNormLayer> op;
    bool frozen = false;

    LayerKind kind() const;
    bool has_params() const;
    /// Trace hook site: activation or normalization output.
    bool is_nonlinear() const;

    Tensor forward(const Tensor& x, RunMode mode);
    Tensor backward(const Tensor& dy);

    void for_each_param(const std::function<void(Tensor& param, Tensor& velocity)>& fn);
    void for_each_param(const std::function<void(const Tensor& param)>& fn) const;
    void zero_grad();
};

const char* to_string(LayerKind kind);

// Seeded Kaiming-uniform initialization for the parameterized layers.
Layer make_dense(std::size_t in_features, std::size_t out_features, Rng& rng);
Layer make_dense(Tensor weight, Tensor bias);
Layer make_conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng,
                  std::size_t stride = 1, std::size_t padding = 0);
Layer make_conv2d(Tensor weight, Tensor bias, std::size_t stride = 1, std::size_t padding = 0);
Layer make_avg_pool(std::size_t kernel, std::size_t stride = 0);  // stride 0 means stride = kernel
Layer make_flatten();
Layer make_activation(ActivationSpec spec);
Layer make_minmax_norm(MinMaxState proto = {});

}  // namespace polyact
