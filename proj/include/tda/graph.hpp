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
#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "tda/errors.hpp"
#include "tda/matrix.hpp"
#include "tda/metric.hpp"

namespace tda {

/// k-NN graph over a target batch with cosine edge weights. Directed
/// neighbor lists hold each node's top-k matches; the undirected edge set
/// is their symmetric closure with every edge stored once. Negative
/// cosine values are clamped to 0 so all pairwise energies stay
/// nonnegative (swap moves require it).
struct KnnGraph {
    struct Edge {
        std::uint32_t a, b;  // a < b
        double weight;       // in [0, 1]
    };

    std::size_t node_count = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> neighbors;  // sorted by desc weight
    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> incident;  // edge ids per node

    const std::vector<std::pair<std::uint32_t, double>>& neighbor_list(std::size_t i) const {
        return neighbors[i];
    }
};

/// Build the k-NN graph by brute-force pairwise cosine scan. k is
/// truncated to n-1; ties resolve to the lowest index. A graph over
/// fewer than two nodes has no edges.
inline KnnGraph build_knn(const Matrix& features, int k) {
    if (k < 1) throw ConfigError("build_knn: k must be >= 1");
    const std::size_t n = features.rows();
    KnnGraph g;
    g.node_count = n;
    g.neighbors.resize(n);
    g.incident.resize(n);
    if (n < 2) return g;

    const std::size_t kk = std::min<std::size_t>(k, n - 1);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> edge_set;

    std::vector<std::pair<double, std::uint32_t>> cand;
    for (std::size_t i = 0; i < n; ++i) {
        cand.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(cosine(features.row(i), features.row(j)),
                              static_cast<std::uint32_t>(j));
        }
        // descending weight, ties to the lowest index
        std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        });
        cand.resize(kk);
        for (auto& [w, j] : cand) {
            double cw = std::clamp(w, 0.0, 1.0);
            g.neighbors[i].emplace_back(j, cw);
            auto ii = static_cast<std::uint32_t>(i);
            edge_set[{std::min(ii, j), std::max(ii, j)}] = cw;
        }
    }

    for (auto& [key, w] : edge_set) {
        auto id = static_cast<std::uint32_t>(g.edges.size());
        g.edges.push_back({key.first, key.second, w});
        g.incident[key.first].push_back(id);
        g.incident[key.second].push_back(id);
    }
    return g;
}

/// Debug dump: one "node_i,node_j,weight" line per undirected edge.
inline void dump_edges(const KnnGraph& g, std::ostream& out) {
    out.precision(17);
    for (const auto& e : g.edges) out << e.a << ',' << e.b << ',' << e.weight << '\n';
}

}  // namespace tda
