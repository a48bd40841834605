// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "polyact/tensor.hpp"

namespace polyact {

/// Which statistic feeds the per-dimension rescale.
///   Train         : true batch extremes; running stats updated by EMA.
///   Approx        : stored running extremes (inference path).
///   TrueMinMax    : current batch extremes, no state update (diagnostic twin).
enum class MinMaxMode { Train, Approx, TrueMinMax };

/// Per-dimension running min/max plus the affine output mapping.
///
/// The rescale is  alpha * (x - m) / (M - m + epsilon) - beta,  which sends
/// [m, M] onto [-beta, alpha - beta]. In training mode m, M are the true
/// batch extremes; the running approximations are updated afterwards as
/// r <- (1-gamma) r + gamma * batch_stat (first batch copies directly).
/// Inference uses the stored approximations and deliberately does not clamp,
/// so out-of-range inputs overshoot [-beta, alpha - beta]; that overshoot is
/// exactly what the escaping-activation diagnostics measure.
struct MinMaxState {
    double alpha = 2.0;
    double beta = 1.0;
    double gamma = 0.1;      // EMA smoothing factor
    double epsilon = 1e-6;   // guards degenerate (constant) dimensions
    std::vector<double> running_min;
    std::vector<double> running_max;
    bool initialized = false;

    void validate() const;
};

/// Slot count for per-dimension statistics as seen by the layer:
/// rank-2 (batch, features) -> one slot per feature; rank-4
/// (batch, C, H, W) -> one slot per channel, extremes taken over batch
/// and spatial positions.
std::size_t dimension_layout(std::span<const std::size_t> shape);

/// Slot of flat element index i for the given shape.
std::size_t dimension_slot(std::span<const std::size_t> shape, std::size_t i);

struct MinMaxForward {
    Tensor output;
    std::vector<double> scale;  // alpha / (M - m + eps) per slot, for backward
};

MinMaxForward minmax_forward_train(MinMaxState& state, const Tensor& x);
MinMaxForward minmax_forward_eval(const MinMaxState& state, const Tensor& x);
MinMaxForward minmax_forward_true(const MinMaxState& state, const Tensor& x);

}  // namespace polyact
