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

#include <cmath>
#include <span>
#include <vector>

#include "tda/errors.hpp"

namespace tda {

/// Per-coordinate squared-gradient accumulators.
struct AdaGradState {
    std::vector<double> accum;

    explicit AdaGradState(std::size_t n = 0) : accum(n, 0.0) {}
};

/// One AdaGrad descent step:
///   accum += g^2;  param -= lr * g / (sqrt(accum) + epsilon)
inline void adagrad_step(std::span<double> params, std::span<const double> grads,
                         AdaGradState& state, double learning_rate, double epsilon) {
    if (params.size() != grads.size() || params.size() != state.accum.size())
        throw ShapeError("adagrad_step: shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grads[i];
        state.accum[i] += g * g;
        if (g != 0.0)
            params[i] -= learning_rate * g / (std::sqrt(state.accum[i]) + epsilon);
    }
}

}  // namespace tda
