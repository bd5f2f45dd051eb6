// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/cluster.hpp"

#include <algorithm>
#include <stdexcept>

namespace gmot {

ScoredEdgeSet average_overlapping_scores(
    const std::vector<std::vector<ScoredEdge>>& window_predictions) {
    std::map<std::pair<int, int>, std::pair<double, int>> acc;  // (j,i) -> (sum, count)
    for (const auto& window : window_predictions) {
        for (const ScoredEdge& e : window) {
            auto& slot = acc[{e.j, e.i}];
            slot.first += e.score;
            slot.second += 1;
        }
    }
    ScoredEdgeSet out;
    out.edges.reserve(acc.size());
    for (const auto& [key, sum_count] : acc) {
        out.edges.push_back({key.first, key.second, sum_count.first / sum_count.second,
                             sum_count.second});
    }
    return out;
}

ClusterSet agglomerate(const ScoredEdgeSet& scored, const std::map<int, ClusterNodeInfo>& nodes,
                       double theta_min, double theta_join) {
    std::vector<ScoredEdge> edges;
    edges.reserve(scored.edges.size());
    for (const ScoredEdge& e : scored.edges) {
        if (e.score >= theta_min) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end(), [](const ScoredEdge& a, const ScoredEdge& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.j != b.j) return a.j < b.j;
        return a.i < b.i;
    });

    ClusterSet cs;
    auto frame_of = [&nodes](int id) {
        auto it = nodes.find(id);
        if (it == nodes.end()) throw std::invalid_argument("agglomerate: unknown node id");
        return it->second.frame;
    };

    for (const ScoredEdge& e : edges) {
        if (frame_of(e.j) >= frame_of(e.i)) continue;  // defends against malformed input
        auto jt = cs.visited.find(e.j);
        auto it = cs.visited.find(e.i);
        const bool jv = jt != cs.visited.end();
        const bool iv = it != cs.visited.end();
        if (!jv && !iv) {
            cs.clusters.push_back({e.j, e.i});
            cs.visited[e.j] = static_cast<int>(cs.clusters.size()) - 1;
            cs.visited[e.i] = static_cast<int>(cs.clusters.size()) - 1;
        } else if (!jv && iv) {
            auto& cluster = cs.clusters[it->second];
            if (cluster.front() == e.i) {
                cluster.insert(cluster.begin(), e.j);
                cs.visited[e.j] = it->second;
            }
        } else if (jv && !iv) {
            auto& cluster = cs.clusters[jt->second];
            if (cluster.back() == e.j) {
                cluster.push_back(e.i);
                cs.visited[e.i] = jt->second;
            }
        } else {
            const int cj = jt->second;
            const int ci = it->second;
            if (cj != ci && cs.clusters[cj].back() == e.j && cs.clusters[ci].front() == e.i &&
                e.score >= theta_join) {
                for (int node : cs.clusters[ci]) {
                    cs.clusters[cj].push_back(node);
                    cs.visited[node] = cj;
                }
                cs.clusters[ci].clear();
            }
        }
    }
    // Drop clusters emptied by joins, keeping creation order.
    std::vector<std::vector<int>> kept;
    std::map<int, int> remap;
    for (size_t c = 0; c < cs.clusters.size(); ++c) {
        if (cs.clusters[c].empty()) continue;
        remap[static_cast<int>(c)] = static_cast<int>(kept.size());
        kept.push_back(std::move(cs.clusters[c]));
    }
    for (auto& [node, c] : cs.visited) c = remap.at(c);
    cs.clusters = std::move(kept);
    return cs;
}

TrajectorySet finalize_trajectories(const ClusterSet& clusters,
                                    const std::map<int, NodeState>& all_nodes,
                                    double singleton_min_score) {
    TrajectorySet out;
    int next_id = 0;
    auto state_of = [&all_nodes](int id) -> const NodeState& {
        auto it = all_nodes.find(id);
        if (it == all_nodes.end()) {
            throw std::invalid_argument("finalize_trajectories: unknown node id");
        }
        return it->second;
    };

    for (const auto& cluster : clusters.clusters) {
        Trajectory t;
        t.track_id = next_id++;
        t.class_id = state_of(cluster.front()).class_id;
        for (int id : cluster) {
            const NodeState& s = state_of(id);
            t.states.push_back({s.frame, s.t, s.box, s.vx, s.vy, s.score});
        }
        out.tracks.push_back(std::move(t));
    }
    // Surviving singletons, in node-id order.
    for (const auto& [id, s] : all_nodes) {
        if (clusters.visited.count(id)) continue;
        if (s.score < singleton_min_score) continue;
        Trajectory t;
        t.track_id = next_id++;
        t.class_id = s.class_id;
        t.states.push_back({s.frame, s.t, s.box, s.vx, s.vy, s.score});
        out.tracks.push_back(std::move(t));
    }
    return out;
}

}  // namespace gmot
