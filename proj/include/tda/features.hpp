/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tda/errors.hpp"
#include "tda/matrix.hpp"
#include "tda/rng.hpp"

namespace tda {

enum class Arch : std::uint8_t { precomputed = 0, linear = 1, mlp1 = 2 };

inline std::string arch_name(Arch a) {
    switch (a) {
        case Arch::precomputed: return "precomputed";
        case Arch::linear: return "linear";
        case Arch::mlp1: return "mlp1";
    }
    return "?";
}

inline Arch arch_from_name(const std::string& s) {
    if (s == "precomputed") return Arch::precomputed;
    if (s == "linear") return Arch::linear;
    if (s == "mlp1") return Arch::mlp1;
    throw ConfigError("unknown architecture: " + s);
}

/// Parametric feature map. Parameter layout:
///   linear: A (d_out x d_in, row-major), b (d_out)
///   mlp1:   A1 (d_hidden x d_in), b1 (d_hidden), A2 (d_out x d_hidden), b2 (d_out)
/// precomputed has no parameters and passes the input through.
struct FeatureFunction {
    Arch arch = Arch::precomputed;
    int d_in = 0;
    int d_hidden = 0;  // mlp1 only
    int d_out = 0;
    std::vector<double> theta;

    static std::size_t param_count(Arch arch, int d_in, int d_hidden, int d_out) {
        switch (arch) {
            case Arch::precomputed: return 0;
            case Arch::linear:
                return static_cast<std::size_t>(d_out) * d_in + d_out;
            case Arch::mlp1:
                return static_cast<std::size_t>(d_hidden) * d_in + d_hidden +
                       static_cast<std::size_t>(d_out) * d_hidden + d_out;
        }
        return 0;
    }

    void validate() const {
        if (d_in <= 0 || d_out <= 0) throw ConfigError("feature function: nonpositive dims");
        if (arch == Arch::mlp1 && d_hidden <= 0)
            throw ConfigError("feature function: mlp1 needs d_hidden > 0");
        if (arch == Arch::precomputed && d_in != d_out)
            throw ConfigError("feature function: precomputed requires d_out == d_in");
        if (theta.size() != param_count(arch, d_in, d_hidden, d_out))
            throw ConfigError("feature function: parameter count does not match architecture");
        for (double v : theta)
            if (!std::isfinite(v)) throw NumericalError("feature function: non-finite parameter");
    }

    std::vector<double> forward(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != d_in)
            throw ShapeError("feature forward: input dimension mismatch");
        switch (arch) {
            case Arch::precomputed:
                return {x.begin(), x.end()};
            case Arch::linear: {
                std::vector<double> y(d_out);
                const double* A = theta.data();
                const double* b = theta.data() + static_cast<std::size_t>(d_out) * d_in;
                for (int r = 0; r < d_out; ++r) {
                    double acc = b[r];
                    for (int c = 0; c < d_in; ++c) acc += A[r * d_in + c] * x[c];
                    y[r] = acc;
                }
                return y;
            }
            case Arch::mlp1: {
                const double* A1 = theta.data();
                const double* b1 = A1 + static_cast<std::size_t>(d_hidden) * d_in;
                const double* A2 = b1 + d_hidden;
                const double* b2 = A2 + static_cast<std::size_t>(d_out) * d_hidden;
                std::vector<double> h(d_hidden);
                for (int r = 0; r < d_hidden; ++r) {
                    double acc = b1[r];
                    for (int c = 0; c < d_in; ++c) acc += A1[r * d_in + c] * x[c];
                    h[r] = acc > 0.0 ? acc : 0.0;  // relu; subgradient at 0 is 0
                }
                std::vector<double> y(d_out);
                for (int r = 0; r < d_out; ++r) {
                    double acc = b2[r];
                    for (int c = 0; c < d_hidden; ++c) acc += A2[r * d_hidden + c] * h[c];
                    y[r] = acc;
                }
                return y;
            }
        }
        throw ConfigError("feature forward: unknown architecture");
    }

    /// Row-wise forward over a point matrix.
    Matrix forward_batch(const Matrix& xs) const {
        Matrix out(xs.rows(), d_out);
        for (std::size_t r = 0; r < xs.rows(); ++r) {
            auto y = forward(xs.row(r));
            for (int c = 0; c < d_out; ++c) out(r, c) = y[c];
        }
        return out;
    }
};

/// Weights drawn from a unit-variance normal truncated at +-2 sd, scaled
/// by 1/sqrt(fan-in of the layer); biases zero.
inline FeatureFunction init_params(Arch arch, int d_in, int d_hidden, int d_out,
                                   std::uint64_t seed) {
    FeatureFunction f;
    f.arch = arch;
    f.d_in = d_in;
    f.d_hidden = arch == Arch::mlp1 ? d_hidden : 0;
    f.d_out = arch == Arch::precomputed ? d_in : d_out;
    f.theta.assign(FeatureFunction::param_count(f.arch, f.d_in, f.d_hidden, f.d_out), 0.0);

    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            f.theta[offset + i] = scale * rng.truncated_gaussian();
    };
    if (arch == Arch::linear) {
        fill(0, static_cast<std::size_t>(f.d_out) * f.d_in, f.d_in);
    } else if (arch == Arch::mlp1) {
        std::size_t n1 = static_cast<std::size_t>(f.d_hidden) * f.d_in;
        fill(0, n1, f.d_in);
        fill(n1 + f.d_hidden, static_cast<std::size_t>(f.d_out) * f.d_hidden, f.d_hidden);
    }
    f.validate();
    return f;
}

/// Gradient over theta of the bilinear similarity s_W(x_src, x_tgt):
/// the source side is weighted by W*phi(tgt), the target side by
/// W^T*phi(src), each backpropagated through the feature map.
inline std::vector<double> param_grad_similarity(const FeatureFunction& f, const Matrix& W,
                                                 std::span<const double> x_src,
                                                 std::span<const double> x_tgt) {
    if (f.arch == Arch::precomputed) return {};
    if (W.rows() != static_cast<std::size_t>(f.d_out) || W.cols() != W.rows())
        throw ShapeError("param_grad_similarity: W dimension mismatch");

    std::vector<double> grad(f.theta.size(), 0.0);
    auto phi_src = f.forward(x_src);
    auto phi_tgt = f.forward(x_tgt);
    std::vector<double> u_src = W.matvec(phi_tgt);             // d(s)/d(phi_src)
    std::vector<double> u_tgt = W.matvec_transposed(phi_src);  // d(s)/d(phi_tgt)

    // accumulate d(u . phi(x)) / d(theta) into grad
    auto backprop = [&](std::span<const double> u, std::span<const double> x) {
        if (f.arch == Arch::linear) {
            double* gA = grad.data();
            double* gb = grad.data() + static_cast<std::size_t>(f.d_out) * f.d_in;
            for (int r = 0; r < f.d_out; ++r) {
                for (int c = 0; c < f.d_in; ++c) gA[r * f.d_in + c] += u[r] * x[c];
                gb[r] += u[r];
            }
        } else {  // mlp1
            const double* A1 = f.theta.data();
            const double* b1 = A1 + static_cast<std::size_t>(f.d_hidden) * f.d_in;
            const double* A2 = b1 + f.d_hidden;
            std::size_t off_b1 = static_cast<std::size_t>(f.d_hidden) * f.d_in;
            std::size_t off_A2 = off_b1 + f.d_hidden;
            std::size_t off_b2 = off_A2 + static_cast<std::size_t>(f.d_out) * f.d_hidden;

            std::vector<double> z(f.d_hidden), h(f.d_hidden);
            for (int r = 0; r < f.d_hidden; ++r) {
                double acc = b1[r];
                for (int c = 0; c < f.d_in; ++c) acc += A1[r * f.d_in + c] * x[c];
                z[r] = acc;
                h[r] = acc > 0.0 ? acc : 0.0;
            }
            for (int r = 0; r < f.d_out; ++r) {
                for (int c = 0; c < f.d_hidden; ++c)
                    grad[off_A2 + static_cast<std::size_t>(r) * f.d_hidden + c] += u[r] * h[c];
                grad[off_b2 + r] += u[r];
            }
            for (int c = 0; c < f.d_hidden; ++c) {
                if (z[c] <= 0.0) continue;
                double dz = 0.0;
                for (int r = 0; r < f.d_out; ++r)
                    dz += A2[static_cast<std::size_t>(r) * f.d_hidden + c] * u[r];
                for (int i = 0; i < f.d_in; ++i)
                    grad[static_cast<std::size_t>(c) * f.d_in + i] += dz * x[i];
                grad[off_b1 + c] += dz;
            }
        }
    };
    backprop(u_src, x_src);
    backprop(u_tgt, x_tgt);
    return grad;
}

}  // namespace tda
