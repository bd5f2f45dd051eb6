// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "gmot/cluster.hpp"
#include "gmot/rng.hpp"
#include "test_support.hpp"

using namespace gmot;

namespace {

// Naive replay of the clustering sweep, written against the rules directly:
// linked lists of nodes, no shared code with the library implementation.
struct NaiveClusters {
    std::vector<std::vector<int>> lists;
    std::map<int, int> where;
};

NaiveClusters naive_agglomerate(std::vector<ScoredEdge> edges,
                                const std::map<int, ClusterNodeInfo>& nodes, double theta_min,
                                double theta_join) {
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [&](const ScoredEdge& e) { return e.score < theta_min; }),
                edges.end());
    std::stable_sort(edges.begin(), edges.end(), [](const ScoredEdge& a, const ScoredEdge& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.j != b.j) return a.j < b.j;
        return a.i < b.i;
    });
    NaiveClusters c;
    for (const ScoredEdge& e : edges) {
        if (nodes.at(e.j).frame >= nodes.at(e.i).frame) continue;
        const bool jv = c.where.count(e.j);
        const bool iv = c.where.count(e.i);
        if (!jv && !iv) {
            c.lists.push_back({e.j, e.i});
            c.where[e.j] = c.where[e.i] = static_cast<int>(c.lists.size()) - 1;
        } else if (!jv) {
            auto& list = c.lists[c.where.at(e.i)];
            if (list.front() == e.i) {
                list.insert(list.begin(), e.j);
                c.where[e.j] = c.where.at(e.i);
            }
        } else if (!iv) {
            auto& list = c.lists[c.where.at(e.j)];
            if (list.back() == e.j) {
                list.push_back(e.i);
                c.where[e.i] = c.where.at(e.j);
            }
        } else {
            const int cj = c.where.at(e.j);
            const int ci = c.where.at(e.i);
            if (cj == ci) continue;
            if (c.lists[cj].back() == e.j && c.lists[ci].front() == e.i && e.score >= theta_join) {
                for (int node : c.lists[ci]) {
                    c.lists[cj].push_back(node);
                    c.where[node] = cj;
                }
                c.lists[ci].clear();
            }
        }
    }
    NaiveClusters out;
    for (const auto& list : c.lists) {
        if (list.empty()) continue;
        for (int node : list) out.where[node] = static_cast<int>(out.lists.size());
        out.lists.push_back(list);
    }
    return out;
}

std::map<int, ClusterNodeInfo> frame_map(const std::vector<std::pair<int, int>>& node_frames) {
    std::map<int, ClusterNodeInfo> m;
    for (const auto& [id, frame] : node_frames) m[id] = {frame};
    return m;
}

}  // namespace

TEST_CASE("average_overlapping_scores") {
    SUBCASE("single window passes through") {
        const ScoredEdgeSet s = average_overlapping_scores({{{1, 2, 0.7, 1}}});
        REQUIRE(s.edges.size() == 1);
        CHECK(s.edges[0].score == doctest::Approx(0.7));
        CHECK(s.edges[0].windows == 1);
    }
    SUBCASE("three windows average") {
        const ScoredEdgeSet s = average_overlapping_scores(
            {{{1, 2, 0.6, 1}}, {{1, 2, 0.8, 1}}, {{1, 2, 1.0, 1}}});
        REQUIRE(s.edges.size() == 1);
        CHECK(s.edges[0].score == doctest::Approx(0.8));
        CHECK(s.edges[0].windows == 3);
    }
    SUBCASE("disjoint edges form a union") {
        const ScoredEdgeSet s =
            average_overlapping_scores({{{1, 2, 0.6, 1}}, {{3, 4, 0.9, 1}}});
        REQUIRE(s.edges.size() == 2);
        CHECK(s.edges[0].score == doctest::Approx(0.6));
        CHECK(s.edges[1].score == doctest::Approx(0.9));
    }
}

TEST_CASE("agglomerate traced examples") {
    SUBCASE("chain with a rejected shortcut") {
        ScoredEdgeSet s;
        s.edges = {{0, 1, 0.9, 1}, {1, 2, 0.8, 1}, {0, 2, 0.3, 1}};
        const auto nodes = frame_map({{0, 0}, {1, 1}, {2, 2}});
        const ClusterSet c = agglomerate(s, nodes, 0.1, 0.5);
        REQUIRE(c.clusters.size() == 1);
        CHECK(c.clusters[0] == std::vector<int>{0, 1, 2});
    }
    SUBCASE("conflicting parents: non-leading attachment rejected") {
        ScoredEdgeSet s;
        s.edges = {{0, 2, 0.9, 1}, {1, 2, 0.8, 1}};
        const auto nodes = frame_map({{0, 0}, {1, 0}, {2, 1}});
        const ClusterSet c = agglomerate(s, nodes, 0.1, 0.5);
        REQUIRE(c.clusters.size() == 1);
        CHECK(c.clusters[0] == std::vector<int>{0, 2});
        CHECK(!c.visited.count(1));
    }
    SUBCASE("join passes the score threshold") {
        ScoredEdgeSet s;
        s.edges = {{0, 1, 0.95, 1}, {2, 3, 0.9, 1}, {1, 2, 0.7, 1}};
        const auto nodes = frame_map({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
        const ClusterSet c = agglomerate(s, nodes, 0.1, 0.5);
        REQUIRE(c.clusters.size() == 1);
        CHECK(c.clusters[0] == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("join blocked below the threshold") {
        ScoredEdgeSet s;
        s.edges = {{0, 1, 0.95, 1}, {2, 3, 0.9, 1}, {1, 2, 0.4, 1}};
        const auto nodes = frame_map({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
        const ClusterSet c = agglomerate(s, nodes, 0.1, 0.5);
        CHECK(c.clusters.size() == 2);
    }
    SUBCASE("theta_min discards edges entirely") {
        ScoredEdgeSet s;
        s.edges = {{0, 1, 0.05, 1}};
        const auto nodes = frame_map({{0, 0}, {1, 1}});
        const ClusterSet c = agglomerate(s, nodes, 0.1, 0.5);
        CHECK(c.clusters.empty());
    }
}

TEST_CASE("agglomerate equals the naive replay on random graphs") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_int(0, 8));  // <= 12 nodes
        std::vector<std::pair<int, int>> node_frames;
        std::map<int, ClusterNodeInfo> nodes;
        for (int v = 0; v < n; ++v) {
            const int frame = static_cast<int>(rng.uniform_int(0, 4));
            node_frames.push_back({v, frame});
            nodes[v] = {frame};
        }
        const int e = static_cast<int>(rng.uniform_int(0, 30));
        ScoredEdgeSet s;
        std::set<std::pair<int, int>> used;
        for (int k = 0; k < e; ++k) {
            int a = static_cast<int>(rng.uniform_int(0, n - 1));
            int b = static_cast<int>(rng.uniform_int(0, n - 1));
            if (nodes[a].frame == nodes[b].frame) continue;
            if (nodes[a].frame > nodes[b].frame) std::swap(a, b);
            if (!used.insert({a, b}).second) continue;
            // Quantized scores force ties through the tie rule.
            s.edges.push_back({a, b, rng.uniform_int(0, 10) / 10.0, 1});
        }
        const double theta_min = rng.uniform(0.0, 0.3);
        const double theta_join = rng.uniform(0.3, 0.8);
        const ClusterSet got = agglomerate(s, nodes, theta_min, theta_join);
        const NaiveClusters want = naive_agglomerate(s.edges, nodes, theta_min, theta_join);

        REQUIRE(got.clusters.size() == want.lists.size());
        for (size_t c = 0; c < got.clusters.size(); ++c) CHECK(got.clusters[c] == want.lists[c]);

        // Structural invariants: node-disjoint, time-monotone, non-branching.
        std::set<int> seen;
        for (const auto& cluster : got.clusters) {
            for (size_t q = 0; q < cluster.size(); ++q) {
                CHECK(seen.insert(cluster[q]).second);
                if (q > 0) CHECK(nodes[cluster[q - 1]].frame < nodes[cluster[q]].frame);
            }
        }
    }
}

TEST_CASE("raising theta_min only shrinks the accepted edge set") {
    Rng rng(211);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 10;
        std::map<int, ClusterNodeInfo> nodes;
        for (int v = 0; v < n; ++v) nodes[v] = {static_cast<int>(rng.uniform_int(0, 4))};
        ScoredEdgeSet s;
        std::set<std::pair<int, int>> used;
        for (int k = 0; k < 20; ++k) {
            int a = static_cast<int>(rng.uniform_int(0, n - 1));
            int b = static_cast<int>(rng.uniform_int(0, n - 1));
            if (nodes[a].frame == nodes[b].frame) continue;
            if (nodes[a].frame > nodes[b].frame) std::swap(a, b);
            if (!used.insert({a, b}).second) continue;
            s.edges.push_back({a, b, rng.uniform(0, 1), 1});
        }
        const ClusterSet low = agglomerate(s, nodes, 0.1, 0.5);
        const ClusterSet high = agglomerate(s, nodes, 0.4, 0.5);
        // The high-threshold sweep is a prefix of the low-threshold sweep,
        // so every high cluster must be a contiguous slice of a low cluster
        // and visited sets can only grow as the threshold drops.
        CHECK(high.visited.size() <= low.visited.size());
        for (const auto& hc : high.clusters) {
            bool found = false;
            for (const auto& lc : low.clusters) {
                for (size_t start = 0; start + hc.size() <= lc.size() && !found; ++start) {
                    found = std::equal(hc.begin(), hc.end(), lc.begin() + start);
                }
                if (found) break;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("finalize_trajectories ordering and singleton gate") {
    std::map<int, NodeState> states;
    auto add = [&](int id, int frame, double score, int cls = 0) {
        NodeState s;
        s.frame = frame;
        s.t = frame * 0.5;
        s.box = test::box(id, 0, 1.9, 4.6, 0);
        s.score = score;
        s.class_id = cls;
        states[id] = s;
    };
    add(0, 0, 0.9);
    add(1, 1, 0.8);
    add(2, 0, 0.7, 1);
    add(3, 2, 0.2);

    SUBCASE("no clusters: singletons above the gate survive") {
        ClusterSet empty;
        const TrajectorySet ts = finalize_trajectories(empty, states, 0.5);
        REQUIRE(ts.tracks.size() == 3);  // node 3 fails the gate
        CHECK(ts.tracks[0].track_id == 0);
        CHECK(ts.tracks[1].track_id == 1);
        CHECK(ts.tracks[2].track_id == 2);
        for (const Trajectory& t : ts.tracks) CHECK(t.states.size() == 1);
    }
    SUBCASE("clusters first, then surviving singletons") {
        ClusterSet c;
        c.clusters.push_back({0, 1});
        c.visited[0] = 0;
        c.visited[1] = 0;
        const TrajectorySet ts = finalize_trajectories(c, states, 0.5);
        REQUIRE(ts.tracks.size() == 2);
        CHECK(ts.tracks[0].states.size() == 2);
        CHECK(ts.tracks[0].track_id == 0);
        CHECK(ts.tracks[0].class_id == 0);
        CHECK(ts.tracks[1].states.size() == 1);
        CHECK(ts.tracks[1].class_id == 1);
    }
    SUBCASE("below-gate singleton is dropped") {
        ClusterSet empty;
        const TrajectorySet ts = finalize_trajectories(empty, states, 0.95);
        CHECK(ts.tracks.empty());
    }
}
