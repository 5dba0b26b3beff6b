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

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tda/errors.hpp"
#include "tda/matrix.hpp"
#include "tda/rng.hpp"

namespace tda {

/// Labeled source-domain dataset.
struct SourceDataset {
    Matrix points;            // N^s x d_in
    std::vector<int> labels;  // one class id per row, in [0, class_count)
    int class_count = 0;

    void validate() const {
        if (points.rows() == 0) throw ConfigError("source dataset is empty");
        if (labels.size() != points.rows())
            throw ShapeError("source dataset: label count does not match row count");
        if (!points.all_finite()) throw ParseError("source dataset: non-finite feature value");
        for (int y : labels)
            if (y < 0 || y >= class_count)
                throw ParseError("source dataset: label out of range");
    }
};

/// Unlabeled target-domain dataset. Ground-truth labels, when present,
/// are reachable only through the evaluation accessor; the training path
/// never sees them.
class TargetDataset {
public:
    TargetDataset() = default;
    explicit TargetDataset(Matrix points) : points_(std::move(points)) {}
    TargetDataset(Matrix points, std::vector<int> ground_truth)
        : points_(std::move(points)), ground_truth_(std::move(ground_truth)) {
        if (ground_truth_ && ground_truth_->size() != points_.rows())
            throw ShapeError("target dataset: ground-truth count does not match row count");
    }

    const Matrix& points() const { return points_; }
    std::size_t size() const { return points_.rows(); }
    bool has_ground_truth() const { return ground_truth_.has_value(); }

    /// Evaluation-only accessor; throws when labels were never supplied.
    const std::vector<int>& ground_truth_for_evaluation() const {
        if (!ground_truth_) throw ConfigError("target dataset carries no ground-truth labels");
        return *ground_truth_;
    }

private:
    Matrix points_;
    std::optional<std::vector<int>> ground_truth_;
};

/// One parsed CSV file: a numeric matrix plus labels taken from column 0
/// when the file is labeled.
struct CsvTable {
    Matrix points;
    std::vector<int> labels;  // empty unless loaded with has_labels
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e || !std::isfinite(v))
        throw ParseError("csv: cannot parse cell at row " + std::to_string(row) +
                         ", column " + std::to_string(col));
    return v;
}

}  // namespace detail

/// Parse a comma-separated numeric file with no header line. When
/// has_labels, column 0 holds the integer class label.
inline CsvTable load_csv(const std::string& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv: cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected_cols = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            ++lineno;
            continue;
        }
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            vals.push_back(detail::parse_cell(cell, lineno, col));
            ++col;
        }
        if (rows.empty() && labels.empty())
            expected_cols = vals.size();
        else if (vals.size() != expected_cols)
            throw ParseError("csv: ragged row " + std::to_string(lineno));
        if (has_labels) {
            double lv = vals.front();
            int y = static_cast<int>(std::llround(lv));
            if (std::abs(lv - y) > 1e-9 || y < 0)
                throw ParseError("csv: label at row " + std::to_string(lineno) +
                                 " is not a nonnegative integer");
            labels.push_back(y);
            vals.erase(vals.begin());
        }
        rows.push_back(std::move(vals));
        ++lineno;
    }
    if (rows.empty()) throw ParseError("csv: empty dataset in " + path);

    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return {std::move(m), std::move(labels)};
}

inline SourceDataset load_source_csv(const std::string& path) {
    CsvTable t = load_csv(path, /*has_labels=*/true);
    int k = 0;
    for (int y : t.labels) k = std::max(k, y + 1);
    SourceDataset ds{std::move(t.points), std::move(t.labels), k};
    ds.validate();
    return ds;
}

inline TargetDataset load_target_csv(const std::string& path) {
    CsvTable t = load_csv(path, /*has_labels=*/false);
    return TargetDataset(std::move(t.points));
}

/// Single-column label file (one integer per line).
inline std::vector<int> load_label_csv(const std::string& path) {
    CsvTable t = load_csv(path, /*has_labels=*/true);
    if (t.points.cols() != 0)
        throw ParseError("label file: expected exactly one column in " + path);
    return t.labels;
}

inline void save_csv(const Matrix& m, const std::vector<int>* labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("csv: cannot write " + path);
    out.precision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (labels) out << (*labels)[r] << (m.cols() ? "," : "");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out << m(r, c);
            if (c + 1 < m.cols()) out << ',';
        }
        out << '\n';
    }
}

/// Synthetic two-domain benchmark: K Gaussian blobs on a radius-5 circle;
/// the target is the same draw rotated then shifted, with hidden
/// ground-truth labels.
inline std::pair<SourceDataset, TargetDataset> synth_blobs(int class_count, int per_class,
                                                           double rotation_deg,
                                                           std::pair<double, double> shift,
                                                           double noise_sd,
                                                           std::uint64_t seed) {
    if (class_count < 2) throw ConfigError("synth_blobs: need at least 2 classes");
    if (per_class < 1) throw ConfigError("synth_blobs: need at least 1 point per class");
    if (noise_sd < 0.0) throw ConfigError("synth_blobs: negative noise");

    constexpr double kRadius = 5.0;
    const std::size_t n = static_cast<std::size_t>(class_count) * per_class;
    Matrix src(n, 2), tgt(n, 2);
    std::vector<int> labels(n);

    Rng rng(seed);
    const double theta = rotation_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(theta), sn = std::sin(theta);

    std::size_t r = 0;
    for (int c = 0; c < class_count; ++c) {
        double ang = 2.0 * std::numbers::pi * c / class_count;
        double cx = kRadius * std::cos(ang), cy = kRadius * std::sin(ang);
        for (int i = 0; i < per_class; ++i, ++r) {
            double x = cx + noise_sd * rng.gaussian();
            double y = cy + noise_sd * rng.gaussian();
            src(r, 0) = x;
            src(r, 1) = y;
            tgt(r, 0) = cs * x - sn * y + shift.first;
            tgt(r, 1) = sn * x + cs * y + shift.second;
            labels[r] = c;
        }
    }
    SourceDataset s{std::move(src), labels, class_count};
    s.validate();
    return {std::move(s), TargetDataset(std::move(tgt), std::move(labels))};
}

}  // namespace tda
