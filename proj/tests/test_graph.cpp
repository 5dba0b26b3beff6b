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
#include <set>
#include <sstream>

#include "tda/graph.hpp"
#include "tda/rng.hpp"

namespace {

tda::Matrix random_features(std::size_t n, std::size_t d, tda::Rng& rng) {
    tda::Matrix m(n, d);
    for (double& v : m.data()) v = rng.gaussian();
    return m;
}

}  // namespace

TEST_CASE("three identical points at k=1 form a triangle-free symmetric closure") {
    tda::Matrix pts(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        pts(i, 0) = 1.0;
        pts(i, 1) = 2.0;
    }
    tda::KnnGraph g = tda::build_knn(pts, 1);
    REQUIRE(g.node_count == 3);
    // everyone's nearest neighbor ties resolve to the lowest index:
    // 0 -> 1, 1 -> 0, 2 -> 0; symmetric closure = {(0,1), (0,2)}
    REQUIRE(g.neighbors[0].size() == 1);
    CHECK(g.neighbors[0][0].first == 1);
    CHECK(g.neighbors[1][0].first == 0);
    CHECK(g.neighbors[2][0].first == 0);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].a == 0);
    CHECK(g.edges[0].b == 1);
    CHECK(g.edges[1].a == 0);
    CHECK(g.edges[1].b == 2);
    for (const auto& e : g.edges) CHECK(e.weight == Catch::Approx(1.0));
}

TEST_CASE("hand case: e1, e2, e1+e2 at k=1") {
    tda::Matrix pts(3, 2);
    pts(0, 0) = 1.0;                  // e1
    pts(1, 1) = 1.0;                  // e2
    pts(2, 0) = pts(2, 1) = 1.0;      // e1 + e2
    tda::KnnGraph g = tda::build_knn(pts, 1);
    const double invsqrt2 = 1.0 / std::sqrt(2.0);
    // node 0: cos(e1,e2)=0, cos(e1,e1+e2)=1/sqrt(2) -> picks node 2
    CHECK(g.neighbors[0][0].first == 2);
    CHECK(g.neighbors[0][0].second == Catch::Approx(invsqrt2));
    CHECK(g.neighbors[1][0].first == 2);
    // node 2 ties between 0 and 1 at 1/sqrt(2) -> lowest index wins
    CHECK(g.neighbors[2][0].first == 0);
    REQUIRE(g.edges.size() == 2);  // (0,2) and (1,2)
    CHECK(g.edges[0].a == 0);
    CHECK(g.edges[0].b == 2);
    CHECK(g.edges[1].a == 1);
    CHECK(g.edges[1].b == 2);
}

TEST_CASE("k is truncated to n-1 and tiny graphs have no edges") {
    tda::Rng rng(1);
    tda::Matrix pts = random_features(3, 2, rng);
    tda::KnnGraph g = tda::build_knn(pts, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(g.neighbors[i].size() == 2);
    CHECK(g.edges.size() == 3);  // complete graph on 3 nodes

    tda::KnnGraph single = tda::build_knn(tda::Matrix(1, 2), 4);
    CHECK(single.node_count == 1);
    CHECK(single.edges.empty());
    tda::KnnGraph empty = tda::build_knn(tda::Matrix(0, 2), 4);
    CHECK(empty.node_count == 0);

    CHECK_THROWS_AS(tda::build_knn(pts, 0), tda::ConfigError);
}

TEST_CASE("negative cosine weights are clamped to zero") {
    tda::Matrix pts(2, 2);
    pts(0, 0) = 1.0;
    pts(1, 0) = -1.0;  // cosine exactly -1
    tda::KnnGraph g = tda::build_knn(pts, 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == 0.0);
    CHECK(g.neighbors[0][0].second == 0.0);
}

TEST_CASE("random graphs satisfy structural invariants and match a scan oracle") {
    tda::Rng rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 2 + rng.below(15);
        std::size_t d = 2 + rng.below(4);
        int k = 1 + static_cast<int>(rng.below(5));
        tda::Matrix pts = random_features(n, d, rng);
        tda::KnnGraph g = tda::build_knn(pts, k);

        std::size_t kk = std::min<std::size_t>(k, n - 1);
        std::set<std::pair<std::uint32_t, std::uint32_t>> expected;
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(g.neighbors[i].size() == kk);
            // oracle: the k-th best cosine by full scan bounds every
            // excluded candidate from above
            double kth = g.neighbors[i].back().second;
            std::set<std::uint32_t> chosen;
            for (auto& [j, w] : g.neighbors[i]) chosen.insert(j);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || chosen.count(static_cast<std::uint32_t>(j))) continue;
                double w = std::clamp(tda::cosine(pts.row(i), pts.row(j)), 0.0, 1.0);
                CHECK(w <= kth + 1e-12);
            }
            // neighbor weights sorted descending and in [0,1]
            for (std::size_t q = 0; q < kk; ++q) {
                double w = g.neighbors[i][q].second;
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                if (q > 0) CHECK(g.neighbors[i][q - 1].second >= w);
                CHECK(g.neighbors[i][q].first != i);  // no self loops
                auto ii = static_cast<std::uint32_t>(i);
                auto jj = g.neighbors[i][q].first;
                expected.insert({std::min(ii, jj), std::max(ii, jj)});
            }
        }
        // edge list is exactly the symmetric closure, each edge once
        REQUIRE(g.edges.size() == expected.size());
        std::set<std::pair<std::uint32_t, std::uint32_t>> got;
        for (const auto& e : g.edges) {
            CHECK(e.a < e.b);
            got.insert({e.a, e.b});
            double w = std::clamp(tda::cosine(pts.row(e.a), pts.row(e.b)), 0.0, 1.0);
            CHECK(e.weight == Catch::Approx(w).margin(1e-15));
        }
        CHECK(got == expected);

        // incident lists are a consistent inverse of the edge list
        std::size_t incident_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::uint32_t id : g.incident[i]) {
                CHECK((g.edges[id].a == i || g.edges[id].b == i));
            }
            incident_total += g.incident[i].size();
        }
        CHECK(incident_total == 2 * g.edges.size());
    }
}

TEST_CASE("dump_edges emits one csv line per edge") {
    tda::Matrix pts(3, 2);
    pts(0, 0) = 1.0;
    pts(1, 1) = 1.0;
    pts(2, 0) = pts(2, 1) = 1.0;
    tda::KnnGraph g = tda::build_knn(pts, 1);
    std::ostringstream out;
    tda::dump_edges(g, out);
    std::string s = out.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 2);
    CHECK(s.substr(0, 4) == "0,2,");
}
