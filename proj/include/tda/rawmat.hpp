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
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "tda/errors.hpp"
#include "tda/matrix.hpp"

namespace tda {
namespace detail {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

template <typename T>
void write_le(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("unexpected end of file");
    return v;
}

}  // namespace detail

/// Raw matrix file: magic "TDA1", u64 rows, u64 cols, then rows*cols
/// little-endian float32 values, row-major.
inline void save_rawmat(const Matrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("rawmat: cannot write " + path);
    out.write("TDA1", 4);
    detail::write_le<std::uint64_t>(out, m.rows());
    detail::write_le<std::uint64_t>(out, m.cols());
    for (double v : m.data()) detail::write_le<float>(out, static_cast<float>(v));
}

inline Matrix load_rawmat(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("rawmat: cannot open " + path);
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "TDA1", 4) != 0)
        throw FormatError("rawmat: bad magic in " + path);
    auto rows = detail::read_le<std::uint64_t>(in);
    auto cols = detail::read_le<std::uint64_t>(in);
    Matrix m(rows, cols);
    for (double& v : m.data()) {
        float f;
        in.read(reinterpret_cast<char*>(&f), sizeof(f));
        if (!in) throw FormatError("rawmat: payload shorter than declared size");
        v = f;
    }
    in.peek();
    if (!in.eof()) throw FormatError("rawmat: payload longer than declared size");
    return m;
}

}  // namespace tda
