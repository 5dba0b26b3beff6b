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
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "tda/adagrad.hpp"
#include "tda/checkpoint.hpp"
#include "tda/config.hpp"
#include "tda/dataset.hpp"
#include "tda/errors.hpp"
#include "tda/features.hpp"
#include "tda/metric.hpp"
#include "tda/rng.hpp"
#include "tda/transduction.hpp"

namespace tda {

struct IterationRecord {
    std::uint64_t iteration;
    double loss;
    double nn_energy;      // transduction energy of the NN-rule init
    double energy;         // energy after propagation (same as nn_energy when disabled)
    std::uint32_t active_triplets;
    std::uint32_t skipped_sources;
};

struct TrainReport {
    std::vector<IterationRecord> records;
    bool sampled_with_replacement = false;
    std::optional<double> final_accuracy;
};

enum class EvalMode { nn, propagated };

inline EvalMode eval_mode_from_name(const std::string& s) {
    if (s == "nn") return EvalMode::nn;
    if (s == "propagated") return EvalMode::propagated;
    throw ConfigError("unknown eval mode: " + s);
}

/// Fresh model state: W starts at the identity so the similarity begins
/// as a plain inner product; theta from the truncated-normal initializer.
inline Checkpoint make_initial_checkpoint(TrainConfig cfg, int d_in) {
    cfg.validate();
    if (cfg.d_in == 0) cfg.d_in = d_in;
    if (cfg.d_in != d_in)
        throw ShapeError("config d_in does not match the dataset dimensionality");
    Checkpoint c;
    c.config = cfg;
    c.feature = init_params(cfg.arch, cfg.d_in, cfg.d_hidden, cfg.d_out, cfg.seed);
    c.config.d_out = c.feature.d_out;  // precomputed forces d_out = d_in
    c.W = Matrix::identity(c.feature.d_out);
    c.accum_w = AdaGradState(c.W.size());
    c.accum_theta = AdaGradState(c.feature.theta.size());
    c.iteration = 0;
    return c;
}

namespace detail {

inline Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(idx[r], c);
    return out;
}

}  // namespace detail

/// Label the full target set with the full source set and score against
/// ground truth.
inline double evaluate(const Checkpoint& ckpt, const SourceDataset& source,
                       const TargetDataset& target, EvalMode mode) {
    const std::vector<int>& truth = target.ground_truth_for_evaluation();
    Matrix sf = ckpt.feature.forward_batch(source.points);
    Matrix tf = ckpt.feature.forward_batch(target.points());
    std::vector<int> labels = nn_rule(ckpt.W, sf, source.labels, tf);
    if (mode == EvalMode::propagated) {
        EnergyModel m = build_energy_model(ckpt.W, sf, source.labels, tf, ckpt.config.knn_k,
                                           ckpt.config.lambda);
        labels = alpha_beta_swap(m, assign(m, std::move(labels))).labels;
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

/// The alternating loop: sample a source and target batch, transduce the
/// target batch, select one triplet per usable source anchor, and apply
/// AdaGrad descent steps to W (and theta when feature learning is on).
/// Deterministic given the seed.
inline std::pair<Checkpoint, TrainReport> train(const SourceDataset& source,
                                                const TargetDataset& target, TrainConfig cfg) {
    source.validate();
    if (target.size() == 0) throw ConfigError("train: empty target dataset");
    if (source.points.cols() != target.points().cols())
        throw ShapeError("train: source and target dimensionality differ");

    Checkpoint ckpt = make_initial_checkpoint(cfg, static_cast<int>(source.points.cols()));
    cfg = ckpt.config;
    TrainReport report;

    Rng sampler(cfg.seed + 0x9E3779B97F4A7C15ULL);
    const std::size_t ns = source.points.rows();
    const std::size_t nt = target.size();
    const std::size_t B = cfg.batch_size;

    auto draw = [&](std::size_t n) {
        if (B > n) {
            report.sampled_with_replacement = true;
            return sampler.sample_with_replacement(n, B);
        }
        return sampler.sample_without_replacement(n, B);
    };

    constexpr std::size_t kWindow = 50;
    std::vector<Triplet> triplets;

    for (std::uint64_t it = 0; it < cfg.max_iters; ++it) {
        auto src_idx = draw(ns);
        auto tgt_idx = draw(nt);
        Matrix src_pts = detail::gather_rows(source.points, src_idx);
        Matrix tgt_pts = detail::gather_rows(target.points(), tgt_idx);
        std::vector<int> src_labels(src_idx.size());
        for (std::size_t i = 0; i < src_idx.size(); ++i)
            src_labels[i] = source.labels[src_idx[i]];

        Matrix sf = ckpt.feature.forward_batch(src_pts);
        Matrix tf = ckpt.feature.forward_batch(tgt_pts);

        EnergyModel model =
            build_energy_model(ckpt.W, sf, src_labels, tf, cfg.knn_k, cfg.lambda);
        LabelAssignment nn = assign(model, nn_rule(ckpt.W, sf, src_labels, tf));
        LabelAssignment labeling = cfg.label_propagation ? alpha_beta_swap(model, nn) : nn;

        triplets.clear();
        std::uint32_t skipped = 0;
        for (std::size_t a = 0; a < sf.rows(); ++a) {
            auto t = select_triplet(ckpt.W, sf.row(a), src_labels[a], tf, labeling.labels,
                                    cfg.margin, a);
            if (t)
                triplets.push_back(*t);
            else
                ++skipped;
        }
        std::uint32_t active = 0;
        for (const Triplet& t : triplets)
            if (t.violation > 0.0) ++active;

        double loss = triplet_loss(ckpt.W, sf, tf, triplets, cfg.margin, cfg.lambda_w);
        if (!std::isfinite(loss)) throw NumericalError("train: non-finite batch loss");

        Matrix gw = grad_W(ckpt.W, sf, tf, triplets, cfg.margin, cfg.lambda_w);
        adagrad_step(ckpt.W.data(), gw.data(), ckpt.accum_w, cfg.learning_rate,
                     cfg.adagrad_epsilon);

        if (cfg.feature_learning && ckpt.feature.arch != Arch::precomputed) {
            std::vector<double> gt(ckpt.feature.theta.size(), 0.0);
            for (const Triplet& t : triplets) {
                if (t.violation <= 0.0) continue;
                auto g_neg = param_grad_similarity(ckpt.feature, ckpt.W, src_pts.row(t.source),
                                                   tgt_pts.row(t.negative));
                auto g_pos = param_grad_similarity(ckpt.feature, ckpt.W, src_pts.row(t.source),
                                                   tgt_pts.row(t.positive));
                for (std::size_t i = 0; i < gt.size(); ++i) gt[i] += g_neg[i] - g_pos[i];
            }
            adagrad_step(ckpt.feature.theta, gt, ckpt.accum_theta, cfg.learning_rate,
                         cfg.adagrad_epsilon);
        }

        ckpt.iteration = it + 1;
        report.records.push_back(
            {it, loss, nn.energy, labeling.energy, active, skipped});

        // early stop when the mean batch loss over the trailing window
        // stops moving relative to the previous window
        if (report.records.size() >= 2 * kWindow) {
            auto mean_of = [&](std::size_t lo, std::size_t hi) {
                double s = 0.0;
                for (std::size_t i = lo; i < hi; ++i) s += report.records[i].loss;
                return s / static_cast<double>(hi - lo);
            };
            std::size_t n = report.records.size();
            double m_prev = mean_of(n - 2 * kWindow, n - kWindow);
            double m_last = mean_of(n - kWindow, n);
            double denom = std::max(std::abs(m_prev), std::abs(m_last));
            if (denom == 0.0 || std::abs(m_last - m_prev) < 1e-6 * denom) break;
        }
    }

    if (target.has_ground_truth())
        report.final_accuracy = evaluate(
            ckpt, source, target,
            cfg.label_propagation ? EvalMode::propagated : EvalMode::nn);
    return {std::move(ckpt), std::move(report)};
}

/// Training trace in CSV form, one row per iteration.
inline void write_report_csv(const TrainReport& report, std::ostream& out) {
    out.precision(17);
    out << "iteration,loss,energy,active_triplets,skipped_sources\n";
    for (const auto& r : report.records)
        out << r.iteration << ',' << r.loss << ',' << r.energy << ',' << r.active_triplets
            << ',' << r.skipped_sources << '\n';
}

}  // namespace tda
