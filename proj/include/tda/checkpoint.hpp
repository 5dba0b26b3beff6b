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

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tda/adagrad.hpp"
#include "tda/config.hpp"
#include "tda/errors.hpp"
#include "tda/features.hpp"
#include "tda/matrix.hpp"
#include "tda/rawmat.hpp"

namespace tda {

/// Full training state. Round-trips bit-exactly through save/load.
struct Checkpoint {
    TrainConfig config;
    FeatureFunction feature;
    Matrix W;
    AdaGradState accum_w;
    AdaGradState accum_theta;
    std::uint64_t iteration = 0;

    void validate() const {
        feature.validate();
        if (W.rows() != W.cols() || W.rows() != static_cast<std::size_t>(feature.d_out))
            throw FormatError("checkpoint: W dimensions inconsistent with feature descriptor");
        if (accum_w.accum.size() != W.size())
            throw FormatError("checkpoint: W accumulator size mismatch");
        if (accum_theta.accum.size() != feature.theta.size())
            throw FormatError("checkpoint: theta accumulator size mismatch");
        if (!W.all_finite()) throw NumericalError("checkpoint: non-finite W");
    }
};

namespace detail {

constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> read_doubles(std::istream& in, std::size_t n) {
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw FormatError("checkpoint: truncated double payload");
    return v;
}

/// Serializes one length-prefixed section.
inline void write_section(std::ostream& out, const std::string& payload) {
    write_le<std::uint64_t>(out, payload.size());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

inline std::string read_section(std::istream& in) {
    auto len = read_le<std::uint64_t>(in);
    std::string payload(len, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(len));
    if (!in) throw FormatError("checkpoint: truncated section");
    return payload;
}

inline std::string encode_config(const TrainConfig& c) {
    std::ostringstream os(std::ios::binary);
    write_le<std::uint64_t>(os, c.batch_size);
    write_le<double>(os, c.margin);
    write_le<double>(os, c.lambda);
    write_le<std::int32_t>(os, c.knn_k);
    write_le<double>(os, c.learning_rate);
    write_le<std::uint64_t>(os, c.max_iters);
    write_le<std::uint64_t>(os, c.seed);
    write_le<std::uint8_t>(os, static_cast<std::uint8_t>(c.arch));
    write_le<std::int32_t>(os, c.d_in);
    write_le<std::int32_t>(os, c.d_hidden);
    write_le<std::int32_t>(os, c.d_out);
    write_le<double>(os, c.lambda_w);
    write_le<std::uint8_t>(os, c.label_propagation ? 1 : 0);
    write_le<std::uint8_t>(os, c.feature_learning ? 1 : 0);
    write_le<double>(os, c.adagrad_epsilon);
    return os.str();
}

inline TrainConfig decode_config(const std::string& payload) {
    std::istringstream is(payload, std::ios::binary);
    TrainConfig c;
    c.batch_size = read_le<std::uint64_t>(is);
    c.margin = read_le<double>(is);
    c.lambda = read_le<double>(is);
    c.knn_k = read_le<std::int32_t>(is);
    c.learning_rate = read_le<double>(is);
    c.max_iters = read_le<std::uint64_t>(is);
    c.seed = read_le<std::uint64_t>(is);
    c.arch = static_cast<Arch>(read_le<std::uint8_t>(is));
    c.d_in = read_le<std::int32_t>(is);
    c.d_hidden = read_le<std::int32_t>(is);
    c.d_out = read_le<std::int32_t>(is);
    c.lambda_w = read_le<double>(is);
    c.label_propagation = read_le<std::uint8_t>(is) != 0;
    c.feature_learning = read_le<std::uint8_t>(is) != 0;
    c.adagrad_epsilon = read_le<double>(is);
    return c;
}

}  // namespace detail

/// Checkpoint file: magic "TDCK", u32 format version, u64 iteration, then
/// length-prefixed sections (config, theta descriptor, theta, W,
/// optimizer accumulators), all little-endian.
inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
    c.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("checkpoint: cannot write " + path);
    out.write("TDCK", 4);
    detail::write_le<std::uint32_t>(out, detail::kCheckpointVersion);
    detail::write_le<std::uint64_t>(out, c.iteration);

    detail::write_section(out, detail::encode_config(c.config));

    std::ostringstream desc(std::ios::binary);
    detail::write_le<std::uint8_t>(desc, static_cast<std::uint8_t>(c.feature.arch));
    detail::write_le<std::int32_t>(desc, c.feature.d_in);
    detail::write_le<std::int32_t>(desc, c.feature.d_hidden);
    detail::write_le<std::int32_t>(desc, c.feature.d_out);
    detail::write_section(out, desc.str());

    std::ostringstream theta(std::ios::binary);
    detail::write_doubles(theta, c.feature.theta);
    detail::write_section(out, theta.str());

    std::ostringstream wmat(std::ios::binary);
    detail::write_le<std::uint64_t>(wmat, c.W.rows());
    detail::write_le<std::uint64_t>(wmat, c.W.cols());
    detail::write_doubles(wmat, c.W.data());
    detail::write_section(out, wmat.str());

    std::ostringstream acc(std::ios::binary);
    detail::write_le<std::uint64_t>(acc, c.accum_w.accum.size());
    detail::write_doubles(acc, c.accum_w.accum);
    detail::write_le<std::uint64_t>(acc, c.accum_theta.accum.size());
    detail::write_doubles(acc, c.accum_theta.accum);
    detail::write_section(out, acc.str());
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("checkpoint: cannot open " + path);
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "TDCK", 4) != 0)
        throw FormatError("checkpoint: bad magic in " + path);
    auto version = detail::read_le<std::uint32_t>(in);
    if (version != detail::kCheckpointVersion)
        throw FormatError("checkpoint: unsupported format version " + std::to_string(version));

    Checkpoint c;
    c.iteration = detail::read_le<std::uint64_t>(in);
    c.config = detail::decode_config(detail::read_section(in));

    {
        std::istringstream desc(detail::read_section(in), std::ios::binary);
        c.feature.arch = static_cast<Arch>(detail::read_le<std::uint8_t>(desc));
        c.feature.d_in = detail::read_le<std::int32_t>(desc);
        c.feature.d_hidden = detail::read_le<std::int32_t>(desc);
        c.feature.d_out = detail::read_le<std::int32_t>(desc);
    }
    {
        std::string payload = detail::read_section(in);
        std::size_t expect = FeatureFunction::param_count(c.feature.arch, c.feature.d_in,
                                                          c.feature.d_hidden, c.feature.d_out);
        if (payload.size() != expect * sizeof(double))
            throw FormatError("checkpoint: theta size inconsistent with descriptor");
        std::istringstream is(payload, std::ios::binary);
        c.feature.theta = detail::read_doubles(is, expect);
    }
    {
        std::istringstream is(detail::read_section(in), std::ios::binary);
        auto rows = detail::read_le<std::uint64_t>(is);
        auto cols = detail::read_le<std::uint64_t>(is);
        c.W = Matrix(rows, cols);
        auto vals = detail::read_doubles(is, rows * cols);
        c.W.data() = std::move(vals);
    }
    {
        std::istringstream is(detail::read_section(in), std::ios::binary);
        auto nw = detail::read_le<std::uint64_t>(is);
        c.accum_w.accum = detail::read_doubles(is, nw);
        auto nt = detail::read_le<std::uint64_t>(is);
        c.accum_theta.accum = detail::read_doubles(is, nt);
    }
    c.validate();
    return c;
}

}  // namespace tda
