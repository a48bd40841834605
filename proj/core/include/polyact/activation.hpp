// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "polyact/tensor.hpp"

namespace polyact {

class Network;

enum class ActivationKind { ReLU, TaylorReLU, Quad, Polynomial };

/// Tagged description of a scalar nonlinearity.
///
/// TaylorReLU is the degree-1 substitute x/2 (the linearization of ReLU at
/// the origin). Quad is x^2. Polynomial evaluates sum_d w_d x^d for a
/// declared coefficient vector w0..wD; the leading coefficient may be zero,
/// the degree is declared rather than inferred.
struct ActivationSpec {
    ActivationKind kind = ActivationKind::ReLU;
    std::vector<double> coefficients;  // Polynomial only

    static ActivationSpec relu() { return {ActivationKind::ReLU, {}}; }
    static ActivationSpec taylor_relu() { return {ActivationKind::TaylorReLU, {}}; }
    static ActivationSpec quad() { return {ActivationKind::Quad, {}}; }
    static ActivationSpec polynomial(std::vector<double> w);

    bool operator==(const ActivationSpec&) const = default;
};

const char* to_string(ActivationKind kind);

double apply_scalar(const ActivationSpec& spec, double x);

/// Derivative of the scalar map. ReLU'(0) is defined as 0.
double derivative_scalar(const ActivationSpec& spec, double x);

Tensor apply(const ActivationSpec& spec, const Tensor& x);
Tensor derivative(const ActivationSpec& spec, const Tensor& x);

/// Structurally identical network with every Activation layer of kind `from`
/// replaced by `to`. Parameters are copied unchanged.
Network replace_all(const Network& net, ActivationKind from, const ActivationSpec& to);

}  // namespace polyact
