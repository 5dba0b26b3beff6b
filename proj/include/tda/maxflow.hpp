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

#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "tda/errors.hpp"

namespace tda {

/// Two-terminal flow network solved by shortest augmenting paths
/// (Edmonds-Karp). Exact on the small per-move graphs this library
/// builds; capacities are real-valued and must be nonnegative.
class FlowNetwork {
public:
    explicit FlowNetwork(std::size_t node_count) : head_(node_count) {}

    std::size_t node_count() const { return head_.size(); }

    /// Adds a directed edge and its zero-capacity reverse.
    void add_edge(std::size_t from, std::size_t to, double capacity) {
        if (capacity < 0.0) throw ConfigError("flow network: negative capacity");
        head_[from].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({static_cast<int>(to), capacity});
        head_[to].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({static_cast<int>(from), 0.0});
    }

    double max_flow(std::size_t source, std::size_t sink) {
        double total = 0.0;
        std::vector<int> parent_edge(node_count());
        for (;;) {
            std::fill(parent_edge.begin(), parent_edge.end(), -1);
            parent_edge[source] = -2;
            std::queue<std::size_t> q;
            q.push(source);
            while (!q.empty() && parent_edge[sink] == -1) {
                std::size_t u = q.front();
                q.pop();
                for (int eid : head_[u]) {
                    const auto& e = edges_[eid];
                    if (e.residual > kEps && parent_edge[e.to] == -1) {
                        parent_edge[e.to] = eid;
                        q.push(static_cast<std::size_t>(e.to));
                    }
                }
            }
            if (parent_edge[sink] == -1) break;

            double bottleneck = std::numeric_limits<double>::infinity();
            for (std::size_t v = sink; v != source;) {
                int eid = parent_edge[v];
                bottleneck = std::min(bottleneck, edges_[eid].residual);
                v = static_cast<std::size_t>(edges_[eid ^ 1].to);
            }
            for (std::size_t v = sink; v != source;) {
                int eid = parent_edge[v];
                edges_[eid].residual -= bottleneck;
                edges_[eid ^ 1].residual += bottleneck;
                v = static_cast<std::size_t>(edges_[eid ^ 1].to);
            }
            total += bottleneck;
        }
        mark_reachable(source);
        return total;
    }

    /// Source side of the minimum cut; valid after max_flow.
    bool reachable_from_source(std::size_t node) const { return reachable_[node]; }

private:
    struct Edge {
        int to;
        double residual;
    };

    static constexpr double kEps = 1e-12;

    void mark_reachable(std::size_t source) {
        reachable_.assign(node_count(), false);
        reachable_[source] = true;
        std::queue<std::size_t> q;
        q.push(source);
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (int eid : head_[u]) {
                const auto& e = edges_[eid];
                if (e.residual > kEps && !reachable_[e.to]) {
                    reachable_[e.to] = true;
                    q.push(static_cast<std::size_t>(e.to));
                }
            }
        }
    }

    std::vector<std::vector<int>> head_;
    std::vector<Edge> edges_;
    std::vector<bool> reachable_;
};

}  // namespace tda
