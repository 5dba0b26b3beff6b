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
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace tda {

/// Deterministic random source. Gaussian draws are hand-rolled via
/// Box-Muller so the byte stream does not depend on the standard
/// library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in (0, 1).
    double uniform() {
        return (static_cast<double>(gen_()) + 0.5) * 0x1.0p-64;
    }

    /// Standard normal (Box-Muller, second value discarded).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard normal truncated at +-cut standard deviations (rejection).
    double truncated_gaussian(double cut = 2.0) {
        for (;;) {
            double v = gaussian();
            if (std::abs(v) <= cut) return v;
        }
    }

    /// Integer uniform in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is negligible for desk-scale n against a 64-bit stream
        return gen_() % n;
    }

    /// k distinct indices from [0, n), partial Fisher-Yates order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    std::vector<std::size_t> sample_with_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<std::size_t>(below(n));
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace tda
