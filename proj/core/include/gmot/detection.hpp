// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmot/geometry.hpp"

namespace gmot {

// Fixed-length sensor embedding attached to a detection. Embeddings arrive
// precomputed; present=false keeps a zero placeholder so shapes stay static.
struct ModalityEmbedding {
    bool present = false;
    std::vector<double> vec;
};

// One 3D box observation in a frame.
struct Detection3D {
    Box3D box;
    double vx = 0.0, vy = 0.0;  // ego-relative planar velocity
    int class_id = 0;
    double score = 1.0;
    double t = 0.0;  // relative timestamp, seconds
    int frame = 0;
    std::map<std::string, ModalityEmbedding> modalities;
    // Instance identity: provenance from a generator or the result of GT
    // matching. Empty optional = unmatched (potential false positive).
    std::optional<std::string> gt_instance;
};

// Pose-and-motion node vector:
// [x, y, z, w, l, h, yaw, vx, vy, one-hot(class_id), score, t], length 11 + C.
std::vector<double> encode_node_3dpm(const Detection3D& det, int class_count);

inline constexpr int kEdgeFeatureWidth = 5;

// Raw edge vector for a time-forward pair (j earlier than i):
// [dist3d, |v_j - v_i|, signed_yaw_diff(yaw_j, yaw_i), log volume ratio, t_i - t_j].
std::vector<double> encode_edge_raw(const Detection3D& det_j, const Detection3D& det_i);

}  // namespace gmot
