// Copyright (C) 2026 polyact contributors
// SPDX-License-Identifier: Apache-2.0
#include "polyact/layer.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "polyact/errors.hpp"

namespace polyact {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMat = Eigen::MatrixXd;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;
using ColMap = Eigen::Map<ColMat>;
using ConstColMap = Eigen::Map<const ColMat>;

inline std::size_t offset4(std::size_t b, std::size_t c, std::size_t y, std::size_t x, std::size_t C,
                           std::size_t H, std::size_t W) {
    return ((b * C + c) * H + y) * W + x;
}

void require_rank(const Tensor& x, std::size_t rank, const char* who) {
    if (x.rank() != rank) {
        throw structural_error(std::string(who) + " expects a rank-" + std::to_string(rank) + " input, got " +
                               shape_to_string(x.shape()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dense

Tensor DenseLayer::forward(const Tensor& x) {
    require_rank(x, 2, "dense layer");
    if (x.extent(1) != in_features()) {
        throw structural_error("dense layer expects " + std::to_string(in_features()) + " input features, got " +
                               shape_to_string(x.shape()));
    }
    input_cache = x;
    const std::size_t batch = x.extent(0);
    Tensor y({batch, out_features()});
    ConstRowMap xm(x.data(), batch, in_features());
    ConstRowMap wm(weight.data(), out_features(), in_features());
    RowMap ym(y.data(), batch, out_features());
    ym.noalias() = xm * wm.transpose();
    ConstRowMap bm(bias.data(), 1, out_features());
    ym.rowwise() += bm.row(0);
    return y;
}

Tensor DenseLayer::backward(const Tensor& dy, bool frozen) {
    const std::size_t batch = input_cache.extent(0);
    ConstRowMap dym(dy.data(), batch, out_features());
    ConstRowMap xm(input_cache.data(), batch, in_features());
    ConstRowMap wm(weight.data(), out_features(), in_features());
    if (!frozen) {
        weight.ensure_grad();
        bias.ensure_grad();
        RowMap dwm(weight.grad().data(), out_features(), in_features());
        dwm.noalias() += dym.transpose() * xm;
        RowMap dbm(bias.grad().data(), 1, out_features());
        dbm.row(0) += dym.colwise().sum();
    }
    Tensor dx({batch, in_features()});
    RowMap dxm(dx.data(), batch, in_features());
    dxm.noalias() = dym * wm;
    return dx;
}

// ---------------------------------------------------------------------------
// Conv2d (im2col + GEMM)

Tensor Conv2dLayer::forward(const Tensor& x) {
    require_rank(x, 4, "conv2d layer");
    const std::size_t B = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (C != in_channels) {
        throw structural_error("conv2d expects " + std::to_string(in_channels) + " input channels, got " +
                               shape_to_string(x.shape()));
    }
    if (H + 2 * padding < kernel_h || W + 2 * padding < kernel_w ||
        (H + 2 * padding - kernel_h) % stride != 0 || (W + 2 * padding - kernel_w) % stride != 0) {
        throw structural_error("conv2d geometry does not tile input " + shape_to_string(x.shape()));
    }
    const std::size_t OH = (H + 2 * padding - kernel_h) / stride + 1;
    const std::size_t OW = (W + 2 * padding - kernel_w) / stride + 1;
    const std::size_t K = in_channels * kernel_h * kernel_w;
    const std::size_t N = B * OH * OW;

    input_shape_cache = x.shape();
    col_cache.assign(K * N, 0.0);
    ColMap col(col_cache.data(), static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));

#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(B); ++b) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
                const std::size_t n = (static_cast<std::size_t>(b) * OH + oy) * OW + ox;
                double* colp = col_cache.data() + n * K;
                for (std::size_t c = 0; c < C; ++c) {
                    for (std::size_t ky = 0; ky < kernel_h; ++ky) {
                        const std::size_t iy = oy * stride + ky;
                        for (std::size_t kx = 0; kx < kernel_w; ++kx) {
                            const std::size_t ix = ox * stride + kx;
                            double v = 0.0;
                            if (iy >= padding && ix >= padding && iy - padding < H && ix - padding < W) {
                                v = x[offset4(static_cast<std::size_t>(b), c, iy - padding, ix - padding, C, H, W)];
                            }
                            colp[(c * kernel_h + ky) * kernel_w + kx] = v;
                        }
                    }
                }
            }
        }
    }

    ConstRowMap wm(weight.data(), out_channels, K);
    ColMat ym(out_channels, N);
    ym.noalias() = wm * col;

    Tensor out({B, out_channels, OH, OW});
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(B); ++b) {
        for (std::size_t oc = 0; oc < out_channels; ++oc) {
            const double bb = bias[oc];
            for (std::size_t oy = 0; oy < OH; ++oy) {
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    const std::size_t n = (static_cast<std::size_t>(b) * OH + oy) * OW + ox;
                    out[offset4(static_cast<std::size_t>(b), oc, oy, ox, out_channels, OH, OW)] =
                        ym(static_cast<Eigen::Index>(oc), static_cast<Eigen::Index>(n)) + bb;
                }
            }
        }
    }
    return out;
}

Tensor Conv2dLayer::backward(const Tensor& dy, bool frozen) {
    const std::size_t B = input_shape_cache[0], C = input_shape_cache[1];
    const std::size_t H = input_shape_cache[2], W = input_shape_cache[3];
    const std::size_t OH = dy.extent(2), OW = dy.extent(3);
    const std::size_t K = in_channels * kernel_h * kernel_w;
    const std::size_t N = B * OH * OW;

    // gather dy into (out_channels x N), matching the forward column order
    ColMat dym(out_channels, N);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(B); ++b) {
        for (std::size_t oc = 0; oc < out_channels; ++oc) {
            for (std::size_t oy = 0; oy < OH; ++oy) {
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    const std::size_t n = (static_cast<std::size_t>(b) * OH + oy) * OW + ox;
                    dym(static_cast<Eigen::Index>(oc), static_cast<Eigen::Index>(n)) =
                        dy[offset4(static_cast<std::size_t>(b), oc, oy, ox, out_channels, OH, OW)];
                }
            }
        }
    }

    ConstColMap col(col_cache.data(), static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
    if (!frozen) {
        weight.ensure_grad();
        bias.ensure_grad();
        RowMap dwm(weight.grad().data(), out_channels, K);
        dwm.noalias() += dym * col.transpose();
        Eigen::Map<Eigen::VectorXd> dbm(bias.grad().data(), static_cast<Eigen::Index>(out_channels));
        dbm += dym.rowwise().sum();
    }

    ConstRowMap wm(weight.data(), out_channels, K);
    ColMat dcol(K, N);
    dcol.noalias() = wm.transpose() * dym;

    Tensor dx(std::vector<std::size_t>(input_shape_cache));
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(B); ++b) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
                const std::size_t n = (static_cast<std::size_t>(b) * OH + oy) * OW + ox;
                const double* dcolp = dcol.data() + n * K;
                for (std::size_t c = 0; c < C; ++c) {
                    for (std::size_t ky = 0; ky < kernel_h; ++ky) {
                        const std::size_t iy = oy * stride + ky;
                        for (std::size_t kx = 0; kx < kernel_w; ++kx) {
                            const std::size_t ix = ox * stride + kx;
                            if (iy >= padding && ix >= padding && iy - padding < H && ix - padding < W) {
                                dx[offset4(static_cast<std::size_t>(b), c, iy - padding, ix - padding, C, H, W)] +=
                                    dcolp[(c * kernel_h + ky) * kernel_w + kx];
                            }
                        }
                    }
                }
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// AvgPool2d

Tensor AvgPool2dLayer::forward(const Tensor& x) {
    require_rank(x, 4, "avg pool layer");
    const std::size_t B = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (H < kernel || W < kernel || (H - kernel) % stride != 0 || (W - kernel) % stride != 0) {
        throw structural_error("avg pool geometry does not tile input " + shape_to_string(x.shape()));
    }
    const std::size_t OH = (H - kernel) / stride + 1;
    const std::size_t OW = (W - kernel) / stride + 1;
    input_shape_cache = x.shape();
    Tensor out({B, C, OH, OW});
    const double inv = 1.0 / static_cast<double>(kernel * kernel);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t oy = 0; oy < OH; ++oy) {
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    double acc = 0.0;
                    for (std::size_t ky = 0; ky < kernel; ++ky) {
                        for (std::size_t kx = 0; kx < kernel; ++kx) {
                            acc += x[offset4(b, c, oy * stride + ky, ox * stride + kx, C, H, W)];
                        }
                    }
                    out[offset4(b, c, oy, ox, C, OH, OW)] = acc * inv;
                }
            }
        }
    }
    return out;
}

Tensor AvgPool2dLayer::backward(const Tensor& dy) {
    const std::size_t B = input_shape_cache[0], C = input_shape_cache[1];
    const std::size_t H = input_shape_cache[2], W = input_shape_cache[3];
    const std::size_t OH = dy.extent(2), OW = dy.extent(3);
    Tensor dx(std::vector<std::size_t>(input_shape_cache));
    const double inv = 1.0 / static_cast<double>(kernel * kernel);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t oy = 0; oy < OH; ++oy) {
                for (std::size_t ox = 0; ox < OW; ++ox) {
                    const double g = dy[offset4(b, c, oy, ox, C, OH, OW)] * inv;
                    for (std::size_t ky = 0; ky < kernel; ++ky) {
                        for (std::size_t kx = 0; kx < kernel; ++kx) {
                            dx[offset4(b, c, oy * stride + ky, ox * stride + kx, C, H, W)] += g;
                        }
                    }
                }
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Flatten / Activation / MinMaxNorm

Tensor FlattenLayer::forward(const Tensor& x) {
    if (x.rank() < 2) throw structural_error("flatten expects rank >= 2, got " + shape_to_string(x.shape()));
    input_shape_cache = x.shape();
    return x.reshaped({x.extent(0), x.size() / x.extent(0)});
}

Tensor FlattenLayer::backward(const Tensor& dy) {
    return dy.reshaped(std::vector<std::size_t>(input_shape_cache));
}

Tensor ActivationLayer::forward(const Tensor& x) {
    input_cache = x;
    return apply(spec, x);
}

Tensor ActivationLayer::backward(const Tensor& dy) {
    Tensor dx = derivative(spec, input_cache);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= dy[i];
    return dx;
}

Tensor MinMaxNormLayer::forward(const Tensor& x, RunMode mode) {
    input_shape_cache = x.shape();
    MinMaxForward r;
    switch (mode) {
        case RunMode::Train: r = minmax_forward_train(state, x); break;
        case RunMode::Infer: r = minmax_forward_eval(state, x); break;
        case RunMode::InferTrueMinMax: r = minmax_forward_true(state, x); break;
    }
    scale_cache = std::move(r.scale);
    return std::move(r.output);
}

// Batch extremes are treated as constants, so the map is elementwise affine.
Tensor MinMaxNormLayer::backward(const Tensor& dy) {
    Tensor dx = dy;
    const auto shape = std::span<const std::size_t>(input_shape_cache);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= scale_cache[dimension_slot(shape, i)];
    return dx;
}

// ---------------------------------------------------------------------------
// Layer wrapper

LayerKind Layer::kind() const {
    return std::visit(
        [](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DenseLayer>) return LayerKind::Dense;
            if constexpr (std::is_same_v<T, Conv2dLayer>) return LayerKind::Conv2d;
            if constexpr (std::is_same_v<T, AvgPool2dLayer>) return LayerKind::AvgPool2d;
            if constexpr (std::is_same_v<T, FlattenLayer>) return LayerKind::Flatten;
            if constexpr (std::is_same_v<T, ActivationLayer>) return LayerKind::Activation;
            if constexpr (std::is_same_v<T, MinMaxNormLayer>) return LayerKind::MinMaxNorm;
        },
        op);
}

bool Layer::has_params() const {
    LayerKind k = kind();
    return k == LayerKind::Dense || k == LayerKind::Conv2d;
}

bool Layer::is_nonlinear() const {
    LayerKind k = kind();
    return k == LayerKind::Activation || k == LayerKind::MinMaxNorm;
}

Tensor Layer::forward(const Tensor& x, RunMode mode) {
    return std::visit(
        [&](auto& l) -> Tensor {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, MinMaxNormLayer>) {
                return l.forward(x, mode);
            } else {
                return l.forward(x);
            }
        },
        op);
}

Tensor Layer::backward(const Tensor& dy) {
    return std::visit(
        [&](auto& l) -> Tensor {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DenseLayer> || std::is_same_v<T, Conv2dLayer>) {
                return l.backward(dy, frozen);
            } else {
                return l.backward(dy);
            }
        },
        op);
}

void Layer::for_each_param(const std::function<void(Tensor&, Tensor&)>& fn) {
    if (auto* d = std::get_if<DenseLayer>(&op)) {
        fn(d->weight, d->weight_velocity);
        fn(d->bias, d->bias_velocity);
    } else if (auto* c = std::get_if<Conv2dLayer>(&op)) {
        fn(c->weight, c->weight_velocity);
        fn(c->bias, c->bias_velocity);
    }
}

void Layer::for_each_param(const std::function<void(const Tensor&)>& fn) const {
    if (const auto* d = std::get_if<DenseLayer>(&op)) {
        fn(d->weight);
        fn(d->bias);
    } else if (const auto* c = std::get_if<Conv2dLayer>(&op)) {
        fn(c->weight);
        fn(c->bias);
    }
}

void Layer::zero_grad() {
    for_each_param([](Tensor& p, Tensor&) { p.zero_grad(); });
}

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::AvgPool2d: return "avg_pool2d";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Activation: return "activation";
        case LayerKind::MinMaxNorm: return "minmax_norm";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Factories

Layer make_dense(std::size_t in_features, std::size_t out_features, Rng& rng) {
    DenseLayer d;
    d.weight = Tensor({out_features, in_features});
    d.bias = Tensor({out_features});
    const double wb = std::sqrt(6.0 / static_cast<double>(in_features));
    const double bb = 1.0 / std::sqrt(static_cast<double>(in_features));
    for (double& v : d.weight.values()) v = rng.uniform(-wb, wb);
    for (double& v : d.bias.values()) v = rng.uniform(-bb, bb);
    return Layer{std::move(d)};
}

Layer make_dense(Tensor weight, Tensor bias) {
    if (weight.rank() != 2 || bias.rank() != 1 || bias.extent(0) != weight.extent(0)) {
        throw structural_error("dense parameters must be weight (out, in) and bias (out)");
    }
    DenseLayer d;
    d.weight = std::move(weight);
    d.bias = std::move(bias);
    return Layer{std::move(d)};
}

Layer make_conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng,
                  std::size_t stride, std::size_t padding) {
    Conv2dLayer c;
    c.in_channels = in_channels;
    c.out_channels = out_channels;
    c.kernel_h = c.kernel_w = kernel;
    c.stride = stride;
    c.padding = padding;
    c.weight = Tensor({out_channels, in_channels, kernel, kernel});
    c.bias = Tensor({out_channels});
    const double fan_in = static_cast<double>(in_channels * kernel * kernel);
    const double wb = std::sqrt(6.0 / fan_in);
    const double bb = 1.0 / std::sqrt(fan_in);
    for (double& v : c.weight.values()) v = rng.uniform(-wb, wb);
    for (double& v : c.bias.values()) v = rng.uniform(-bb, bb);
    return Layer{std::move(c)};
}

Layer make_conv2d(Tensor weight, Tensor bias, std::size_t stride, std::size_t padding) {
    if (weight.rank() != 4 || bias.rank() != 1 || bias.extent(0) != weight.extent(0)) {
        throw structural_error("conv2d parameters must be weight (out_c, in_c, kh, kw) and bias (out_c)");
    }
    Conv2dLayer c;
    c.out_channels = weight.extent(0);
    c.in_channels = weight.extent(1);
    c.kernel_h = weight.extent(2);
    c.kernel_w = weight.extent(3);
    c.stride = stride;
    c.padding = padding;
    c.weight = std::move(weight);
    c.bias = std::move(bias);
    return Layer{std::move(c)};
}

Layer make_avg_pool(std::size_t kernel, std::size_t stride) {
    AvgPool2dLayer p;
    p.kernel = kernel;
    p.stride = stride == 0 ? kernel : stride;
    return Layer{std::move(p)};
}

Layer make_flatten() { return Layer{FlattenLayer{}}; }

Layer make_activation(ActivationSpec spec) { return Layer{ActivationLayer{std::move(spec), {}}}; }

Layer make_minmax_norm(MinMaxState proto) {
    proto.validate();
    return Layer{MinMaxNormLayer{std::move(proto), {}, {}}};
}

}  // namespace polyact
