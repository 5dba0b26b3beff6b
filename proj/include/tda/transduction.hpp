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
#include <limits>
#include <utility>
#include <vector>

#include "tda/errors.hpp"
#include "tda/features.hpp"
#include "tda/graph.hpp"
#include "tda/matrix.hpp"
#include "tda/maxflow.hpp"
#include "tda/metric.hpp"

namespace tda {

/// Discrete labeling energy over a target batch: per-node unary costs
/// (negated best source similarity per class) plus Potts pairwise terms
/// lambda * w_ij on the k-NN graph. Only classes present in the source
/// batch are admissible.
struct EnergyModel {
    std::vector<int> classes;  // admissible class ids, ascending
    Matrix unary;              // node x class-slot
    KnnGraph graph;
    double lambda = 0.0;

    int slot_of(int label) const {
        auto it = std::lower_bound(classes.begin(), classes.end(), label);
        if (it == classes.end() || *it != label) return -1;
        return static_cast<int>(it - classes.begin());
    }
};

/// Transduced labels with the energy they attain under the owning model.
struct LabelAssignment {
    std::vector<int> labels;
    double energy = 0.0;
};

inline EnergyModel build_energy_model(const Matrix& W, const Matrix& source_features,
                                      const std::vector<int>& source_labels,
                                      const Matrix& target_features, int k, double lambda) {
    if (source_features.rows() == 0 || target_features.rows() == 0)
        throw ConfigError("energy model: empty batch");
    if (lambda < 0.0) throw ConfigError("energy model: negative consistency weight");

    EnergyModel m;
    m.lambda = lambda;
    m.classes = source_labels;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());

    const std::size_t n = target_features.rows();
    m.unary = Matrix(n, m.classes.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        auto phi_t = target_features.row(i);
        for (std::size_t j = 0; j < source_features.rows(); ++j) {
            double s = similarity(W, source_features.row(j), phi_t);
            int slot = m.slot_of(source_labels[j]);
            double cost = -s;
            if (cost < m.unary(i, slot)) m.unary(i, slot) = cost;
        }
    }
    m.graph = build_knn(target_features, k);
    return m;
}

/// Exact energy of a labeling; each undirected edge counted once.
inline double energy(const EnergyModel& m, const std::vector<int>& labels) {
    if (labels.size() != m.unary.rows()) throw ShapeError("energy: label count mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int slot = m.slot_of(labels[i]);
        if (slot < 0) throw DomainError("energy: inadmissible label");
        e += m.unary(i, slot);
    }
    for (const auto& edge : m.graph.edges)
        if (labels[edge.a] != labels[edge.b]) e += m.lambda * edge.weight;
    return e;
}

inline LabelAssignment assign(const EnergyModel& m, std::vector<int> labels) {
    double e = energy(m, labels);
    return {std::move(labels), e};
}

/// Each target takes the label of its most similar source point under
/// s_W; ties resolve to the lowest source index.
inline std::vector<int> nn_rule(const Matrix& W, const Matrix& source_features,
                                const std::vector<int>& source_labels,
                                const Matrix& target_features) {
    if (source_features.rows() == 0 || target_features.rows() == 0)
        throw ConfigError("nn_rule: empty batch");
    std::vector<int> labels(target_features.rows());
    for (std::size_t i = 0; i < target_features.rows(); ++i) {
        auto phi_t = target_features.row(i);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < source_features.rows(); ++j) {
            double s = similarity(W, source_features.row(j), phi_t);
            if (s > best) {
                best = s;
                best_j = j;
            }
        }
        labels[i] = source_labels[best_j];
    }
    return labels;
}

namespace detail {

/// One alpha-beta swap move: nodes currently labeled alpha or beta are
/// optimally reassigned between the two classes by a min cut. Returns the
/// candidate labeling (energy not yet compared).
inline std::vector<int> swap_move(const EnergyModel& m, const std::vector<int>& labels,
                                  int alpha, int beta) {
    const std::size_t n = labels.size();
    std::vector<int> node_of(n, -1);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == alpha || labels[i] == beta) {
            node_of[i] = static_cast<int>(members.size());
            members.push_back(i);
        }
    if (members.empty()) return labels;

    const int slot_a = m.slot_of(alpha);
    const int slot_b = m.slot_of(beta);
    const std::size_t src = members.size();
    const std::size_t snk = members.size() + 1;
    FlowNetwork net(members.size() + 2);

    std::vector<double> t_alpha(members.size()), t_beta(members.size());
    for (std::size_t p = 0; p < members.size(); ++p) {
        std::size_t i = members[p];
        t_alpha[p] = m.unary(i, slot_a);
        t_beta[p] = m.unary(i, slot_b);
        for (std::uint32_t eid : m.graph.incident[i]) {
            const auto& e = m.graph.edges[eid];
            std::size_t j = e.a == i ? e.b : e.a;
            if (node_of[j] >= 0) continue;  // handled as an n-link
            double c = m.lambda * e.weight;
            if (labels[j] != alpha) t_alpha[p] += c;
            if (labels[j] != beta) t_beta[p] += c;
        }
        // shift both terminal costs so capacities are nonnegative;
        // a per-node constant does not change the argmin
        double shift = std::min(t_alpha[p], t_beta[p]);
        net.add_edge(src, p, t_beta[p] - shift);  // cut s->p  => p labeled beta
        net.add_edge(p, snk, t_alpha[p] - shift);  // cut p->t  => p labeled alpha
    }
    for (const auto& e : m.graph.edges) {
        int pa = node_of[e.a], pb = node_of[e.b];
        if (pa < 0 || pb < 0) continue;
        double c = m.lambda * e.weight;
        if (c < 0.0) throw ConfigError("alpha_beta_swap: negative pairwise weight");
        net.add_edge(pa, pb, c);
        net.add_edge(pb, pa, c);
    }

    net.max_flow(src, snk);
    std::vector<int> out = labels;
    for (std::size_t p = 0; p < members.size(); ++p)
        out[members[p]] = net.reachable_from_source(p) ? alpha : beta;
    return out;
}

}  // namespace detail

/// Move-making minimization of the labeling energy: sweep all unordered
/// class pairs in ascending order, solving each two-class subproblem
/// exactly by min-cut, and accept only strictly improving moves. Repeats
/// sweeps until none improves, so the result is a swap-local optimum.
inline LabelAssignment alpha_beta_swap(const EnergyModel& m, const LabelAssignment& init) {
    if (m.lambda < 0.0) throw ConfigError("alpha_beta_swap: negative consistency weight");
    LabelAssignment cur = init;
    cur.energy = energy(m, cur.labels);  // trust nothing

    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t a = 0; a < m.classes.size(); ++a) {
            for (std::size_t b = a + 1; b < m.classes.size(); ++b) {
                auto cand = detail::swap_move(m, cur.labels, m.classes[a], m.classes[b]);
                double e = energy(m, cand);
                if (e < cur.energy - 1e-12) {
                    cur.labels = std::move(cand);
                    cur.energy = e;
                    improved = true;
                }
            }
        }
    }
    return cur;
}

/// Label one target batch: NN-rule initialization, then (when enabled)
/// swap-move label propagation on the batch k-NN graph.
inline LabelAssignment transduce_batch(const Matrix& W, const FeatureFunction& f,
                                       const Matrix& source_points,
                                       const std::vector<int>& source_labels,
                                       const Matrix& target_points, int k, double lambda,
                                       bool propagation_enabled) {
    Matrix sf = f.forward_batch(source_points);
    Matrix tf = f.forward_batch(target_points);
    EnergyModel m = build_energy_model(W, sf, source_labels, tf, k, lambda);
    LabelAssignment init = assign(m, nn_rule(W, sf, source_labels, tf));
    if (!propagation_enabled) return init;
    return alpha_beta_swap(m, init);
}

}  // namespace tda
