// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmot/detection.hpp"
#include "gmot/nn/tensor.hpp"
#include "gmot/track.hpp"

namespace gmot {

struct WindowSpec {
    int first_frame = 0;
    int length = 0;
};

// Window starts [s, s+length) for s = 0, stride, 2*stride, ... while the
// window fits; a trailing partial window is appended only when requested.
std::vector<WindowSpec> sliding_windows(int frame_count, int length = 5, int stride = 1,
                                        bool include_partial = false);

struct GraphNode {
    int frame = 0;
    int index_in_frame = 0;
    int class_id = 0;
    int global_id = 0;  // scene-wide detection id
};

// Directed time-forward edge between window-local node indices.
struct GraphEdge {
    int src = 0;  // earlier node (j)
    int dst = 0;  // later node (i)
};

// One sliding window turned into an attributed DAG. Edges connect equal
// classes only and always point forward in time.
struct TrackingGraph {
    WindowSpec window;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    nn::Tensor node_features;  // N x (11 + C)
    nn::Tensor edge_features;  // E x 5
    std::vector<int8_t> edge_labels;  // 1/0 after labeling, -1 unknown
    // Per configured modality tag: N x dim matrix and a presence mask.
    std::vector<nn::Tensor> modality_features;
    std::vector<std::vector<uint8_t>> modality_present;
    // Detection timestamps/scores kept for clustering and trajectory export.
    std::vector<double> node_scores;
};

// Per-node same-frame neighbor lists for the frame-wise attention layer.
struct FrameKnn {
    std::vector<std::vector<int>> neighbors;
};

struct GraphBuildConfig {
    int class_count = 3;
    int k_past = 40;
    int k_frame = 20;
    std::vector<std::string> modality_tags;
    std::vector<int> modality_dims;
};

// Normalized kinematic edge-selection score per candidate, in [0, 1];
// smaller means more similar. Components (dist, |yaw diff|, velocity diff)
// are min-max normalized over the candidate set, combined with weights
// (1/2, 1/4, 1/4) and divided by the candidate maximum.
std::vector<double> kinematic_similarity(const Detection3D& target,
                                         const std::vector<const Detection3D*>& candidates);

// Builds nodes, kinematic k-NN edges, features and modality matrices for
// one window over a scene's detections (frame-major, globally indexed).
TrackingGraph build_window_graph(const std::vector<std::vector<Detection3D>>& det_frames,
                                 const WindowSpec& window, const GraphBuildConfig& cfg);

// Greedy per-frame one-to-one matching of detections to GT boxes in
// ascending center-distance order, gated by radius, BEV IoU and class.
// Matched detections inherit the GT instance id; others are cleared.
void match_detections_to_gt(std::vector<std::vector<Detection3D>>& det_frames,
                            const std::vector<GtTrack>& annotations, double radius = 2.0,
                            double iou_min = 0.1);

// Edge label 1 iff both endpoints carry the same instance and no node with
// that instance sits strictly between them in time (within the window).
void label_edges(TrackingGraph& graph,
                 const std::vector<std::vector<Detection3D>>& det_frames);

// Per node: its k nearest same-frame nodes by BEV center distance,
// category-agnostic, no self-loops.
FrameKnn build_frame_knn(const TrackingGraph& graph,
                         const std::vector<std::vector<Detection3D>>& det_frames, int k_frame = 20);

}  // namespace gmot
