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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "tda/trainer.hpp"

namespace {

// small 2-class problem: clusters at +/- e1, target slightly rotated
std::pair<tda::SourceDataset, tda::TargetDataset> tiny_problem(std::uint64_t seed) {
    auto [src, tgt] = tda::synth_blobs(2, 8, 10.0, {0.1, 0.0}, 0.3, seed);
    return {std::move(src), std::move(tgt)};
}

tda::TrainConfig tiny_config() {
    tda::TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_iters = 5;
    cfg.arch = tda::Arch::linear;
    cfg.d_out = 2;
    cfg.knn_k = 2;
    return cfg;
}

}  // namespace

TEST_CASE("adagrad step arithmetic") {
    tda::AdaGradState st(2);
    std::vector<double> p{1.0, 1.0};

    SECTION("zero gradient leaves both the parameter and accumulator") {
        std::vector<double> g{0.0, 0.0};
        tda::adagrad_step(p, g, st, 0.5, 0.0);
        CHECK(p == std::vector<double>{1.0, 1.0});
        CHECK(st.accum == std::vector<double>{0.0, 0.0});
    }
    SECTION("first step moves by lr * sign(g) when epsilon is zero") {
        std::vector<double> g{0.1, -0.1};
        tda::adagrad_step(p, g, st, 0.5, 0.0);
        // accum = g^2, so g / sqrt(accum) = sign(g)
        CHECK(p[0] == Catch::Approx(1.0 - 0.5));
        CHECK(p[1] == Catch::Approx(1.0 + 0.5));
        CHECK(st.accum[0] == Catch::Approx(0.01));
    }
    SECTION("second identical step shrinks by 1/sqrt(2)") {
        std::vector<double> g{0.1, 0.0};
        tda::adagrad_step(p, g, st, 0.5, 0.0);
        double after_one = p[0];
        tda::adagrad_step(p, g, st, 0.5, 0.0);
        CHECK((after_one - p[0]) == Catch::Approx(0.5 / std::sqrt(2.0)));
    }
    SECTION("epsilon shifts the denominator") {
        std::vector<double> g{0.1, 0.0};
        tda::adagrad_step(p, g, st, 0.5, 0.1);
        CHECK(p[0] == Catch::Approx(1.0 - 0.5 * 0.1 / (0.1 + 0.1)));
    }
    SECTION("shape mismatch throws") {
        std::vector<double> g{0.1};
        CHECK_THROWS_AS(tda::adagrad_step(p, g, st, 0.5, 0.0), tda::ShapeError);
    }
}

TEST_CASE("initial checkpoint shape and identity W") {
    tda::TrainConfig cfg = tiny_config();
    tda::Checkpoint c = tda::make_initial_checkpoint(cfg, 2);
    CHECK(c.W == tda::Matrix::identity(2));
    CHECK(c.feature.theta.size() == 2 * 2 + 2);
    CHECK(c.accum_w.accum.size() == 4);
    CHECK(c.accum_theta.accum.size() == c.feature.theta.size());
    CHECK(c.iteration == 0);

    cfg.arch = tda::Arch::precomputed;
    cfg.d_out = 128;  // ignored: precomputed pins d_out to d_in
    tda::Checkpoint pc = tda::make_initial_checkpoint(cfg, 3);
    CHECK(pc.config.d_out == 3);
    CHECK(pc.W == tda::Matrix::identity(3));

    cfg.d_in = 5;
    CHECK_THROWS_AS(tda::make_initial_checkpoint(cfg, 3), tda::ShapeError);
}

TEST_CASE("training is deterministic given the seed") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.max_iters = 20;
    auto [c1, r1] = tda::train(src, tgt, cfg);
    auto [c2, r2] = tda::train(src, tgt, cfg);
    CHECK(c1.W == c2.W);
    CHECK(c1.feature.theta == c2.feature.theta);
    CHECK(c1.accum_w.accum == c2.accum_w.accum);
    CHECK(c1.accum_theta.accum == c2.accum_theta.accum);
    CHECK(c1.iteration == c2.iteration);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].loss == r2.records[i].loss);
        CHECK(r1.records[i].energy == r2.records[i].energy);
    }

    tda::TrainConfig other = cfg;
    other.seed = cfg.seed + 1;
    auto [c3, r3] = tda::train(src, tgt, other);
    CHECK(c3.feature.theta != c1.feature.theta);  // different init draw
}

TEST_CASE("max_iters = 0 returns the untouched initial state") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.max_iters = 0;
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    tda::Checkpoint fresh = tda::make_initial_checkpoint(cfg, 2);
    CHECK(ckpt.W == fresh.W);
    CHECK(ckpt.feature.theta == fresh.feature.theta);
    CHECK(ckpt.iteration == 0);
    CHECK(report.records.empty());
}

TEST_CASE("disabling feature learning freezes theta but not W") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.feature_learning = false;
    cfg.margin = 5.0;  // keep the hinge active so W actually moves
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    tda::Checkpoint fresh = tda::make_initial_checkpoint(cfg, 2);
    CHECK(ckpt.feature.theta == fresh.feature.theta);
    for (double a : ckpt.accum_theta.accum) CHECK(a == 0.0);
    CHECK(ckpt.W != fresh.W);
}

TEST_CASE("disabling label propagation makes the recorded energies coincide") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.label_propagation = false;
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    for (const auto& r : report.records) CHECK(r.energy == r.nn_energy);

    cfg.label_propagation = true;
    auto [ckpt2, report2] = tda::train(src, tgt, cfg);
    for (const auto& r : report2.records) CHECK(r.energy <= r.nn_energy + 1e-12);
}

TEST_CASE("batch larger than the dataset falls back to replacement sampling") {
    auto [src, tgt] = tiny_problem(4);  // 16 source rows
    tda::TrainConfig cfg = tiny_config();
    cfg.batch_size = 64;
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    CHECK(report.sampled_with_replacement);

    cfg.batch_size = 8;
    auto [ckpt2, report2] = tda::train(src, tgt, cfg);
    CHECK_FALSE(report2.sampled_with_replacement);
}

TEST_CASE("anchors without a usable triplet are counted as skipped") {
    // single target point: every anchor whose class differs from its
    // predicted label has an empty positive set, the rest an empty
    // negative set, so every anchor is skipped every iteration
    tda::SourceDataset src{tda::Matrix(4, 2), {0, 0, 1, 1}, 2};
    src.points(0, 0) = 1.0;
    src.points(1, 0) = 0.9;
    src.points(2, 1) = 1.0;
    src.points(3, 1) = 0.9;
    tda::TargetDataset tgt{tda::Matrix(1, 2)};
    tda::TrainConfig cfg = tiny_config();
    cfg.batch_size = 4;
    cfg.max_iters = 3;
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    for (const auto& r : report.records) {
        CHECK(r.skipped_sources == 4);
        CHECK(r.active_triplets == 0);
        CHECK(r.loss == Catch::Approx(cfg.lambda_w * 0.5 * ckpt.W.frobenius_norm_sq())
                            .epsilon(0.5));  // regularizer-only loss
    }
}

TEST_CASE("accumulators never decrease across training") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.max_iters = 3;
    auto [c3, r3] = tda::train(src, tgt, cfg);
    cfg.max_iters = 10;
    auto [c10, r10] = tda::train(src, tgt, cfg);
    for (std::size_t i = 0; i < c3.accum_w.accum.size(); ++i)
        CHECK(c10.accum_w.accum[i] >= c3.accum_w.accum[i]);
    for (std::size_t i = 0; i < c3.accum_theta.accum.size(); ++i)
        CHECK(c10.accum_theta.accum[i] >= c3.accum_theta.accum[i]);
}

TEST_CASE("a single gradient step on an active triplet lowers the hinge loss") {
    tda::Matrix W = tda::Matrix::identity(2);
    tda::Matrix sf(1, 2), tf(2, 2);
    sf(0, 0) = 1.0;
    tf(0, 1) = 1.0;  // positive, s+ = 0
    tf(1, 0) = 1.0;  // negative, s- = 1 -> active at margin 0.5
    std::vector<tda::Triplet> ts{{0, 0, 1, 0.0}};
    double before = tda::triplet_loss(W, sf, tf, ts, 0.5, 0.0);
    tda::Matrix g = tda::grad_W(W, sf, tf, ts, 0.5, 0.0);
    tda::AdaGradState st(W.size());
    tda::adagrad_step(W.data(), g.data(), st, 1e-3, 1e-8);
    double after = tda::triplet_loss(W, sf, tf, ts, 0.5, 0.0);
    CHECK(after < before);
}

TEST_CASE("evaluate scores nn and propagated labelings against ground truth") {
    tda::TrainConfig cfg;
    cfg.arch = tda::Arch::precomputed;
    cfg.batch_size = 2;
    cfg.knn_k = 1;
    tda::Checkpoint ckpt = tda::make_initial_checkpoint(cfg, 2);

    tda::SourceDataset src{tda::Matrix(2, 2), {0, 1}, 2};
    src.points(0, 0) = 1.0;  // class 0 at e1
    src.points(1, 1) = 1.0;  // class 1 at e2

    tda::Matrix tp(4, 2);
    tp(0, 0) = 1.0;                   // clearly class 0
    tp(1, 0) = 0.9;  tp(1, 1) = 0.2;  // class 0
    tp(2, 1) = 1.0;                   // clearly class 1
    tp(3, 0) = 0.6;  tp(3, 1) = 0.5;  // nn says class 0

    SECTION("perfect labels give accuracy 1") {
        tda::TargetDataset tgt{tp, {0, 0, 1, 0}};
        CHECK(tda::evaluate(ckpt, src, tgt, tda::EvalMode::nn) == 1.0);
    }
    SECTION("one mislabel out of four gives 0.75") {
        tda::TargetDataset tgt{tp, {0, 0, 1, 1}};
        CHECK(tda::evaluate(ckpt, src, tgt, tda::EvalMode::nn) == 0.75);
    }
    SECTION("missing ground truth is a configuration error") {
        tda::TargetDataset tgt{tp};
        CHECK_THROWS_AS(tda::evaluate(ckpt, src, tgt, tda::EvalMode::nn), tda::ConfigError);
    }
    SECTION("propagated mode runs the swap solver") {
        tda::TargetDataset tgt{tp, {0, 0, 1, 0}};
        double acc = tda::evaluate(ckpt, src, tgt, tda::EvalMode::propagated);
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    }
}

TEST_CASE("final accuracy is reported only when ground truth exists") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    auto [c1, r1] = tda::train(src, tgt, cfg);
    CHECK(r1.final_accuracy.has_value());

    tda::TargetDataset unlabeled{tgt.points()};
    auto [c2, r2] = tda::train(src, unlabeled, cfg);
    CHECK_FALSE(r2.final_accuracy.has_value());
}

TEST_CASE("train validates dataset compatibility") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    tda::TargetDataset wrong{tda::Matrix(3, 5)};
    CHECK_THROWS_AS(tda::train(src, wrong, cfg), tda::ShapeError);
    CHECK_THROWS_AS(tda::train(src, tda::TargetDataset{tda::Matrix(0, 2)}, cfg),
                    tda::ConfigError);
}

TEST_CASE("eval mode names parse") {
    CHECK(tda::eval_mode_from_name("nn") == tda::EvalMode::nn);
    CHECK(tda::eval_mode_from_name("propagated") == tda::EvalMode::propagated);
    CHECK_THROWS_AS(tda::eval_mode_from_name("both"), tda::ConfigError);
}

TEST_CASE("report csv has a header and one row per iteration") {
    auto [src, tgt] = tiny_problem(4);
    tda::TrainConfig cfg = tiny_config();
    cfg.max_iters = 3;
    auto [ckpt, report] = tda::train(src, tgt, cfg);
    std::ostringstream out;
    tda::write_report_csv(report, out);
    std::string s = out.str();
    CHECK(s.rfind("iteration,loss,energy,active_triplets,skipped_sources\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
