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

#include "tda/errors.hpp"
#include "tda/features.hpp"

namespace tda {

/// Hyperparameters of the alternating training loop. Defaults are the
/// library-wide single source of truth; the CLI mirrors them one-to-one.
struct TrainConfig {
    std::uint64_t batch_size = 256;
    double margin = 0.5;
    double lambda = 0.5;       // label-consistency weight
    int knn_k = 4;
    double learning_rate = 2.5e-4;
    std::uint64_t max_iters = 1000;
    std::uint64_t seed = 0;
    Arch arch = Arch::linear;
    int d_in = 0;              // filled from the dataset when 0
    int d_hidden = 32;         // mlp1 only
    int d_out = 128;
    double lambda_w = 1e-4;    // Frobenius regularizer weight
    bool label_propagation = true;
    bool feature_learning = true;
    double adagrad_epsilon = 1e-8;

    void validate() const {
        if (batch_size < 2) throw ConfigError("config: batch_size must be >= 2");
        if (margin < 0.0) throw ConfigError("config: margin must be >= 0");
        if (lambda < 0.0) throw ConfigError("config: lambda must be >= 0");
        if (knn_k < 1) throw ConfigError("config: knn_k must be >= 1");
        if (learning_rate <= 0.0) throw ConfigError("config: learning_rate must be > 0");
        if (lambda_w < 0.0) throw ConfigError("config: lambda_w must be >= 0");
        if (adagrad_epsilon < 0.0) throw ConfigError("config: adagrad_epsilon must be >= 0");
    }

    bool operator==(const TrainConfig&) const = default;
};

}  // namespace tda
