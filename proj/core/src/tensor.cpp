// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#include "polyact/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyact/errors.hpp"

namespace polyact {

std::size_t shape_product(std::span<const std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

std::string shape_to_string(std::span<const std::size_t> shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

namespace {
void check_shape(const std::vector<std::size_t>& shape, std::size_t data_len) {
    for (std::size_t e : shape) {
        if (e == 0) throw structural_error("tensor shape has a zero extent: " + shape_to_string(shape));
    }
    if (shape_product(shape) != data_len) {
        throw structural_error("tensor shape " + shape_to_string(shape) + " does not match data length " +
                               std::to_string(data_len));
    }
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    for (std::size_t e : shape_) {
        if (e == 0) throw structural_error("tensor shape has a zero extent: " + shape_to_string(shape_));
    }
    data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_, data_.size());
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

Tensor Tensor::row(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

void Tensor::ensure_grad() {
    if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
}

void Tensor::zero_grad() {
    if (grad_.empty()) {
        grad_.assign(data_.size(), 0.0);
    } else {
        std::fill(grad_.begin(), grad_.end(), 0.0);
    }
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
    if (shape_product(new_shape) != data_.size()) {
        throw structural_error("reshape to " + shape_to_string(new_shape) + " does not preserve element count " +
                               std::to_string(data_.size()));
    }
    return Tensor(std::move(new_shape), data_);
}

}  // namespace polyact
