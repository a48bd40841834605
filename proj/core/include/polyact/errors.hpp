// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace polyact {

// Shape or wiring mismatch. Numeric overflow is never an error here;
// Inf/NaN flow through forward passes as data.
class structural_error : public std::runtime_error {
public:
    explicit structural_error(const std::string& msg) : std::runtime_error(msg) {}
};

// API called out of order (e.g. backward before forward).
class usage_error : public std::logic_error {
public:
    explicit usage_error(const std::string& msg) : std::logic_error(msg) {}
};

// Malformed input file; message names the file and byte offset.
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range argument to a numeric routine.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Unrecoverable numerical failure (e.g. Cholesky after jitter ceiling).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace polyact
