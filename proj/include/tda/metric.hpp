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

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "tda/errors.hpp"
#include "tda/matrix.hpp"

namespace tda {

/// Asymmetric bilinear similarity phi_s^T W phi_t. W is square but not
/// required to be symmetric or positive definite.
inline double similarity(const Matrix& W, std::span<const double> phi_s,
                         std::span<const double> phi_t) {
    if (phi_s.size() != W.rows() || phi_t.size() != W.cols())
        throw ShapeError("similarity: dimension mismatch");
    double s = 0.0;
    for (std::size_t r = 0; r < W.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < W.cols(); ++c) acc += W(r, c) * phi_t[c];
        s += phi_s[r] * acc;
    }
    return s;
}

/// Cosine similarity; defined as 0 when either norm falls below 1e-12.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("cosine: dimension mismatch");
    double na = norm(a), nb = norm(b);
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    double c = dot(a, b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

/// One source anchor with its most similar same-class and different-class
/// targets under the current predicted labels. Indices refer to rows of
/// the target batch.
struct Triplet {
    std::size_t source;    // row in the source batch
    std::size_t positive;  // target predicted as the anchor's class
    std::size_t negative;  // target predicted as another class
    double violation;      // s(neg) - s(pos) + margin at selection time
};

/// Pick the argmax-similarity positive and negative targets for one source
/// anchor. Ties resolve to the lowest index. Returns nothing when either
/// candidate set is empty (the anchor is skipped for this batch).
inline std::optional<Triplet> select_triplet(const Matrix& W, std::span<const double> phi_src,
                                             int src_label, const Matrix& target_features,
                                             const std::vector<int>& predicted_labels,
                                             double margin, std::size_t source_index = 0) {
    if (predicted_labels.size() != target_features.rows())
        throw ShapeError("select_triplet: label count does not match target batch");
    bool have_pos = false, have_neg = false;
    std::size_t best_pos = 0, best_neg = 0;
    double s_pos = 0.0, s_neg = 0.0;
    for (std::size_t j = 0; j < target_features.rows(); ++j) {
        double s = similarity(W, phi_src, target_features.row(j));
        if (predicted_labels[j] == src_label) {
            if (!have_pos || s > s_pos) {
                have_pos = true;
                best_pos = j;
                s_pos = s;
            }
        } else {
            if (!have_neg || s > s_neg) {
                have_neg = true;
                best_neg = j;
                s_neg = s;
            }
        }
    }
    if (!have_pos || !have_neg) return std::nullopt;
    return Triplet{source_index, best_pos, best_neg, s_neg - s_pos + margin};
}

/// Hinge loss over the given triplets plus the weighted Frobenius
/// regularizer lambda_w * 0.5 * ||W||_F^2.
inline double triplet_loss(const Matrix& W, const Matrix& source_features,
                           const Matrix& target_features, std::span<const Triplet> triplets,
                           double margin, double lambda_w) {
    double loss = lambda_w * 0.5 * W.frobenius_norm_sq();
    for (const Triplet& t : triplets) {
        double s_pos = similarity(W, source_features.row(t.source), target_features.row(t.positive));
        double s_neg = similarity(W, source_features.row(t.source), target_features.row(t.negative));
        loss += std::max(0.0, s_neg - s_pos + margin);
    }
    return loss;
}

/// Subgradient of triplet_loss with respect to W. A triplet is active iff
/// its hinge term is strictly positive; each active triplet contributes
/// phi(src) (phi(neg) - phi(pos))^T.
inline Matrix grad_W(const Matrix& W, const Matrix& source_features,
                     const Matrix& target_features, std::span<const Triplet> triplets,
                     double margin, double lambda_w) {
    Matrix g(W.rows(), W.cols());
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = lambda_w * W.data()[i];
    for (const Triplet& t : triplets) {
        auto phi_s = source_features.row(t.source);
        auto phi_p = target_features.row(t.positive);
        auto phi_n = target_features.row(t.negative);
        double s_pos = similarity(W, phi_s, phi_p);
        double s_neg = similarity(W, phi_s, phi_n);
        if (s_neg - s_pos + margin <= 0.0) continue;
        for (std::size_t r = 0; r < W.rows(); ++r)
            for (std::size_t c = 0; c < W.cols(); ++c)
                g(r, c) += phi_s[r] * (phi_n[c] - phi_p[c]);
    }
    return g;
}

}  // namespace tda
