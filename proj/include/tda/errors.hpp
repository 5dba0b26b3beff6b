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

#include <stdexcept>
#include <string>

namespace tda {

/// Malformed text input (CSV rows, numeric cells).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed binary input (bad magic, truncated payload, version mismatch).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value (dimensions, class counts, hyperparameters).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Value outside its admissible set (e.g. a label not present in the model).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite value encountered during optimization.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tda
