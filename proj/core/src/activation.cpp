// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#include "polyact/activation.hpp"

#include <cmath>

#include "polyact/errors.hpp"
#include "polyact/network.hpp"

namespace polyact {

ActivationSpec ActivationSpec::polynomial(std::vector<double> w) {
    if (w.empty()) throw parameter_error("polynomial activation needs a non-empty coefficient vector");
    return {ActivationKind::Polynomial, std::move(w)};
}

const char* to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::TaylorReLU: return "taylor_relu";
        case ActivationKind::Quad: return "quad";
        case ActivationKind::Polynomial: return "polynomial";
    }
    return "?";
}

namespace {

// max(0, x) written so NaN passes through instead of being absorbed
// by the comparison.
inline double relu(double x) {
    if (std::isnan(x)) return x;
    return x > 0.0 ? x : 0.0;
}

inline double horner(const std::vector<double>& w, double x) {
    double acc = 0.0;
    for (std::size_t i = w.size(); i > 0; --i) acc = acc * x + w[i - 1];
    return acc;
}

// Derivative of sum w_d x^d, evaluated by Horner on the derived coefficients.
inline double horner_derivative(const std::vector<double>& w, double x) {
    double acc = 0.0;
    for (std::size_t i = w.size(); i > 1; --i) {
        acc = acc * x + w[i - 1] * static_cast<double>(i - 1);
    }
    return acc;
}

}  // namespace

double apply_scalar(const ActivationSpec& spec, double x) {
    switch (spec.kind) {
        case ActivationKind::ReLU: return relu(x);
        case ActivationKind::TaylorReLU: return 0.5 * x;
        case ActivationKind::Quad: return x * x;
        case ActivationKind::Polynomial: return horner(spec.coefficients, x);
    }
    return x;
}

double derivative_scalar(const ActivationSpec& spec, double x) {
    switch (spec.kind) {
        case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
        case ActivationKind::TaylorReLU: return 0.5;
        case ActivationKind::Quad: return 2.0 * x;
        case ActivationKind::Polynomial: return horner_derivative(spec.coefficients, x);
    }
    return 1.0;
}

Tensor apply(const ActivationSpec& spec, const Tensor& x) {
    Tensor out = x;
    for (double& v : out.values()) v = apply_scalar(spec, v);
    return out;
}

Tensor derivative(const ActivationSpec& spec, const Tensor& x) {
    Tensor out = x;
    for (double& v : out.values()) v = derivative_scalar(spec, v);
    return out;
}

Network replace_all(const Network& net, ActivationKind from, const ActivationSpec& to) {
    Network out = net;
    for (auto& layer : out.layers) {
        if (auto* act = std::get_if<ActivationLayer>(&layer.op)) {
            if (act->spec.kind == from) act->spec = to;
        }
    }
    return out;
}

}  // namespace polyact
