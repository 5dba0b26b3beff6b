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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tda/tda.hpp"

namespace {

// resolved-config echo; key=value lines so runs are reproducible from the
// printed configuration plus the input files
void print_config(const tda::TrainConfig& c, std::ostream& out) {
    out.precision(6);
    out << "config.batch_size=" << c.batch_size << '\n'
        << "config.margin=" << c.margin << '\n'
        << "config.lambda=" << c.lambda << '\n'
        << "config.knn_k=" << c.knn_k << '\n'
        << "config.lr=" << c.learning_rate << '\n'
        << "config.max_iters=" << c.max_iters << '\n'
        << "config.seed=" << c.seed << '\n'
        << "config.arch=" << tda::arch_name(c.arch) << '\n'
        << "config.d_in=" << c.d_in << '\n'
        << "config.d_hidden=" << c.d_hidden << '\n'
        << "config.d_out=" << c.d_out << '\n'
        << "config.lambda_w=" << c.lambda_w << '\n'
        << "config.label_propagation=" << (c.label_propagation ? 1 : 0) << '\n'
        << "config.feature_learning=" << (c.feature_learning ? 1 : 0) << '\n'
        << "config.adagrad_epsilon=" << c.adagrad_epsilon << '\n';
}

struct SynthOpts {
    int classes = 3;
    int per_class = 100;
    double rotate = 0.0;
    double shift_x = 0.0;
    double shift_y = 0.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int run_synth(const SynthOpts& o) {
    std::cerr.precision(6);
    std::cerr << "config.classes=" << o.classes << "\nconfig.per_class=" << o.per_class
              << "\nconfig.rotate=" << o.rotate << "\nconfig.shift_x=" << o.shift_x
              << "\nconfig.shift_y=" << o.shift_y << "\nconfig.noise_sd=" << o.noise_sd
              << "\nconfig.seed=" << o.seed << '\n';
    auto [source, target] =
        tda::synth_blobs(o.classes, o.per_class, o.rotate, {o.shift_x, o.shift_y}, o.noise_sd,
                         o.seed);
    std::filesystem::create_directories(o.out_dir);
    auto path = [&](const char* name) { return (std::filesystem::path(o.out_dir) / name).string(); };
    tda::save_csv(source.points, &source.labels, path("source.csv"));
    tda::save_csv(target.points(), nullptr, path("target.csv"));
    tda::Matrix empty(target.size(), 0);
    tda::save_csv(empty, &target.ground_truth_for_evaluation(), path("target_labels.csv"));
    std::cout << "written=" << o.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transductive domain adaptation: joint target labeling and asymmetric "
                 "metric learning"};
    app.require_subcommand(1);

    // synth
    SynthOpts synth;
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic two-domain benchmark");
    cmd_synth->add_option("--classes", synth.classes, "Number of classes")->required();
    cmd_synth->add_option("--per-class", synth.per_class, "Points per class")->required();
    cmd_synth->add_option("--rotate", synth.rotate, "Target rotation in degrees");
    cmd_synth->add_option("--shift-x", synth.shift_x, "Target shift, x component");
    cmd_synth->add_option("--shift-y", synth.shift_y, "Target shift, y component");
    cmd_synth->add_option("--noise-sd", synth.noise_sd, "Gaussian noise stddev");
    cmd_synth->add_option("--seed", synth.seed, "Random seed");
    cmd_synth->add_option("--out", synth.out_dir, "Output directory")->required();

    // shared train-config options
    tda::TrainConfig cfg;
    std::string arch_name = "linear";
    std::string source_path, target_path, labels_path, out_path, ckpt_path, mode_name = "nn";
    bool no_prop = false, no_feat = false;

    auto add_train_flags = [&](CLI::App* cmd) {
        cmd->add_option("--iters", cfg.max_iters, "Max training iterations");
        cmd->add_option("--batch-size", cfg.batch_size, "Batch size");
        cmd->add_option("--margin", cfg.margin, "Triplet margin");
        cmd->add_option("--lambda", cfg.lambda, "Label-consistency weight");
        cmd->add_option("--knn-k", cfg.knn_k, "Target k-NN graph degree");
        cmd->add_option("--lr", cfg.learning_rate, "AdaGrad learning rate");
        cmd->add_option("--seed", cfg.seed, "Random seed");
        cmd->add_option("--arch", arch_name, "Feature architecture")
            ->check(CLI::IsMember({"precomputed", "linear", "mlp1"}));
        cmd->add_option("--d-hidden", cfg.d_hidden, "Hidden width (mlp1)");
        cmd->add_option("--d-out", cfg.d_out, "Feature dimension");
        cmd->add_option("--lambda-w", cfg.lambda_w, "Frobenius regularizer weight");
        cmd->add_option("--adagrad-epsilon", cfg.adagrad_epsilon, "AdaGrad epsilon");
        cmd->add_flag("--no-label-propagation", no_prop, "Disable label propagation");
        cmd->add_flag("--no-feature-learning", no_feat, "Freeze feature parameters");
    };

    auto* cmd_train = app.add_subcommand("train", "Run the alternating training loop");
    cmd_train->add_option("--source", source_path, "Labeled source CSV")->required();
    cmd_train->add_option("--target", target_path, "Unlabeled target CSV")->required();
    cmd_train->add_option("--labels", labels_path, "Target ground truth (evaluation only)");
    cmd_train->add_option("--out", out_path, "Checkpoint output path")->required();
    add_train_flags(cmd_train);

    auto* cmd_transduce = app.add_subcommand("transduce", "Label a target set");
    cmd_transduce->add_option("--ckpt", ckpt_path, "Checkpoint (identity model when absent)");
    cmd_transduce->add_option("--source", source_path, "Labeled source CSV")->required();
    cmd_transduce->add_option("--target", target_path, "Unlabeled target CSV")->required();
    cmd_transduce->add_option("--lambda", cfg.lambda, "Label-consistency weight");
    cmd_transduce->add_option("--knn-k", cfg.knn_k, "Target k-NN graph degree");
    cmd_transduce->add_flag("--no-label-propagation", no_prop, "Disable label propagation");

    auto* cmd_eval = app.add_subcommand("eval", "Score transduced labels against ground truth");
    cmd_eval->add_option("--ckpt", ckpt_path, "Checkpoint")->required();
    cmd_eval->add_option("--source", source_path, "Labeled source CSV")->required();
    cmd_eval->add_option("--target", target_path, "Target CSV")->required();
    cmd_eval->add_option("--labels", labels_path, "Target ground-truth labels")->required();
    cmd_eval->add_option("--mode", mode_name, "nn or propagated")
        ->check(CLI::IsMember({"nn", "propagated"}));

    auto* cmd_inspect = app.add_subcommand("inspect", "Print checkpoint metadata");
    cmd_inspect->add_option("--ckpt", ckpt_path, "Checkpoint")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (cmd_synth->parsed()) return run_synth(synth);

        cfg.arch = tda::arch_from_name(arch_name);
        cfg.label_propagation = !no_prop;
        cfg.feature_learning = !no_feat;

        if (cmd_train->parsed()) {
            tda::SourceDataset source = tda::load_source_csv(source_path);
            tda::TargetDataset target = tda::load_target_csv(target_path);
            if (!labels_path.empty())
                target = tda::TargetDataset(tda::Matrix(target.points()),
                                            tda::load_label_csv(labels_path));
            cfg.d_in = static_cast<int>(source.points.cols());
            if (cfg.arch == tda::Arch::precomputed) cfg.d_out = cfg.d_in;
            print_config(cfg, std::cerr);
            auto [ckpt, report] = tda::train(source, target, cfg);
            tda::save_checkpoint(ckpt, out_path);
            std::ofstream trace(out_path + ".trace.csv");
            tda::write_report_csv(report, trace);
            std::cout.precision(6);
            std::cout << "iterations=" << ckpt.iteration << '\n';
            if (report.sampled_with_replacement)
                std::cout << "warning=sampled_with_replacement\n";
            if (report.final_accuracy)
                std::cout << "final_accuracy=" << *report.final_accuracy << '\n';
            std::cout << "checkpoint=" << out_path << '\n';
            return 0;
        }

        if (cmd_transduce->parsed()) {
            tda::SourceDataset source = tda::load_source_csv(source_path);
            tda::TargetDataset target = tda::load_target_csv(target_path);
            tda::Checkpoint ckpt;
            if (!ckpt_path.empty()) {
                ckpt = tda::load_checkpoint(ckpt_path);
            } else {
                cfg.arch = tda::Arch::precomputed;
                cfg.d_in = static_cast<int>(source.points.cols());
                cfg.d_out = cfg.d_in;
                ckpt = tda::make_initial_checkpoint(cfg, cfg.d_in);
            }
            ckpt.config.lambda = cfg.lambda;
            ckpt.config.knn_k = cfg.knn_k;
            print_config(ckpt.config, std::cerr);
            tda::LabelAssignment out = tda::transduce_batch(
                ckpt.W, ckpt.feature, source.points, source.labels, target.points(),
                ckpt.config.knn_k, ckpt.config.lambda, !no_prop);
            std::cout.precision(6);
            for (std::size_t i = 0; i < out.labels.size(); ++i)
                std::cout << i << ',' << out.labels[i] << '\n';
            std::cout << "# energy=" << out.energy << '\n';
            return 0;
        }

        if (cmd_eval->parsed()) {
            tda::Checkpoint ckpt = tda::load_checkpoint(ckpt_path);
            tda::SourceDataset source = tda::load_source_csv(source_path);
            tda::TargetDataset plain = tda::load_target_csv(target_path);
            tda::TargetDataset target(tda::Matrix(plain.points()),
                                      tda::load_label_csv(labels_path));
            print_config(ckpt.config, std::cerr);
            double acc = tda::evaluate(ckpt, source, target, tda::eval_mode_from_name(mode_name));
            std::cout.precision(6);
            std::cout << "accuracy=" << acc << '\n';
            return 0;
        }

        if (cmd_inspect->parsed()) {
            tda::Checkpoint ckpt = tda::load_checkpoint(ckpt_path);
            print_config(ckpt.config, std::cerr);
            std::cout << "iteration=" << ckpt.iteration << '\n'
                      << "seed=" << ckpt.config.seed << '\n'
                      << "arch=" << tda::arch_name(ckpt.feature.arch) << '\n'
                      << "d_in=" << ckpt.feature.d_in << '\n'
                      << "d_hidden=" << ckpt.feature.d_hidden << '\n'
                      << "d_out=" << ckpt.feature.d_out << '\n'
                      << "theta_size=" << ckpt.feature.theta.size() << '\n';
            return 0;
        }
    } catch (const tda::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const tda::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::runtime_error& e) {  // parse/format/shape/domain
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
