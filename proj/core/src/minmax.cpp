// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#include "polyact/minmax.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "polyact/errors.hpp"

namespace polyact {

void MinMaxState::validate() const {
    if (alpha <= 0.0) throw parameter_error("minmax alpha must be positive");
    if (gamma <= 0.0 || gamma > 1.0) throw parameter_error("minmax gamma must be in (0, 1]");
    if (epsilon < 0.0) throw parameter_error("minmax epsilon must be non-negative");
    if (initialized && running_min.size() != running_max.size())
        throw structural_error("minmax running stats have mismatched lengths");
}

std::size_t dimension_layout(std::span<const std::size_t> shape) {
    if (shape.size() == 2) return shape[1];
    if (shape.size() == 4) return shape[1];
    throw structural_error("minmax normalization expects a rank-2 or rank-4 input, got " +
                           shape_to_string(shape));
}

std::size_t dimension_slot(std::span<const std::size_t> shape, std::size_t i) {
    if (shape.size() == 2) return i % shape[1];
    // rank-4: consecutive H*W elements share a channel
    std::size_t hw = shape[2] * shape[3];
    return (i / hw) % shape[1];
}

namespace {

struct BatchStats {
    std::vector<double> min, max;
};

BatchStats batch_extremes(const Tensor& x) {
    std::size_t slots = dimension_layout(x.shape());
    BatchStats s;
    s.min.assign(slots, std::numeric_limits<double>::infinity());
    s.max.assign(slots, -std::numeric_limits<double>::infinity());
    const auto shape = x.shape();
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t d = dimension_slot(shape, i);
        double v = x[i];
        // NaN propagates: min/max of a NaN-containing slot becomes NaN
        if (!(v >= s.min[d])) s.min[d] = std::isnan(v) ? v : std::min(s.min[d], v);
        if (!(v <= s.max[d])) s.max[d] = std::isnan(v) ? v : std::max(s.max[d], v);
    }
    return s;
}

MinMaxForward rescale(const MinMaxState& state, const Tensor& x, const std::vector<double>& m,
                      const std::vector<double>& M) {
    MinMaxForward out;
    out.output = x;
    out.scale.resize(m.size());
    for (std::size_t d = 0; d < m.size(); ++d) out.scale[d] = state.alpha / (M[d] - m[d] + state.epsilon);
    const auto shape = x.shape();
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t d = dimension_slot(shape, i);
        out.output[i] = (x[i] - m[d]) * out.scale[d] - state.beta;
    }
    return out;
}

}  // namespace

MinMaxForward minmax_forward_train(MinMaxState& state, const Tensor& x) {
    state.validate();
    BatchStats s = batch_extremes(x);
    if (!state.initialized) {
        state.running_min = s.min;
        state.running_max = s.max;
        state.initialized = true;
    } else {
        if (state.running_min.size() != s.min.size())
            throw structural_error("minmax slot count changed between batches: " +
                                   std::to_string(state.running_min.size()) + " vs " +
                                   std::to_string(s.min.size()));
        for (std::size_t d = 0; d < s.min.size(); ++d) {
            state.running_min[d] = (1.0 - state.gamma) * state.running_min[d] + state.gamma * s.min[d];
            state.running_max[d] = (1.0 - state.gamma) * state.running_max[d] + state.gamma * s.max[d];
        }
    }
    return rescale(state, x, s.min, s.max);
}

MinMaxForward minmax_forward_eval(const MinMaxState& state, const Tensor& x) {
    state.validate();
    if (!state.initialized)
        throw usage_error("minmax eval before any training batch: running statistics are empty");
    if (state.running_min.size() != dimension_layout(x.shape()))
        throw structural_error("minmax input has " + std::to_string(dimension_layout(x.shape())) +
                               " slots but state holds " + std::to_string(state.running_min.size()));
    return rescale(state, x, state.running_min, state.running_max);
}

MinMaxForward minmax_forward_true(const MinMaxState& state, const Tensor& x) {
    state.validate();
    BatchStats s = batch_extremes(x);
    return rescale(state, x, s.min, s.max);
}

}  // namespace polyact
