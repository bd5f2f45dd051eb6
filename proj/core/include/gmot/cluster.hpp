// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <map>
#include <vector>

#include "gmot/detection.hpp"
#include "gmot/track.hpp"

namespace gmot {

// One predicted edge between scene-global detection ids.
struct ScoredEdge {
    int j = 0;  // earlier detection
    int i = 0;  // later detection
    double score = 0.0;
    int windows = 1;  // contributing window count
};

struct ScoredEdgeSet {
    std::vector<ScoredEdge> edges;
};

// Per-edge arithmetic mean over all windows that predicted it.
ScoredEdgeSet average_overlapping_scores(
    const std::vector<std::vector<ScoredEdge>>& window_predictions);

// Node metadata the clustering needs: frame per global detection id.
struct ClusterNodeInfo {
    int frame = 0;
};

struct ClusterSet {
    // Time-ordered node lists, keyed by creation order.
    std::vector<std::vector<int>> clusters;
    // Global node id -> cluster index; absent means unvisited.
    std::map<int, int> visited;
};

// Score-ordered greedy clustering: descending-score edge sweep with
// leading/trailing attachment rules and a join threshold for fusing two
// existing clusters.
ClusterSet agglomerate(const ScoredEdgeSet& scored, const std::map<int, ClusterNodeInfo>& nodes,
                       double theta_min = 0.1, double theta_join = 0.5);

// Everything the finalization needs to materialize track states.
struct NodeState {
    int frame = 0;
    double t = 0.0;
    Box3D box;
    double vx = 0.0, vy = 0.0;
    double score = 1.0;
    int class_id = 0;
};

// Clusters become tracks with fresh ids (creation order); unvisited nodes
// become singleton tracks when their detection score passes the gate.
TrajectorySet finalize_trajectories(const ClusterSet& clusters,
                                    const std::map<int, NodeState>& all_nodes,
                                    double singleton_min_score);

}  // namespace gmot
