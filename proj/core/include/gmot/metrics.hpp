// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gmot/track.hpp"

namespace gmot {

// Pairs disallowed by a gate should carry a large sentinel cost.
inline constexpr double kDisallowedCost = 1e9;

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
    double total_cost = 0.0;
};

// Minimum-cost one-to-one assignment over min(rows, cols) pairs via
// shortest augmenting paths (O(n^3)). Deterministic scan order.
Assignment hungarian_assign(const std::vector<std::vector<double>>& cost);

struct MatchGate {
    double max_dist = 2.0;  // BEV center distance, meters
    bool require_class = true;
};

struct FrameObject {
    int id = 0;  // track id (prediction) or dense GT index
    int class_id = 0;
    double x = 0.0, y = 0.0;
};

struct FrameMatchResult {
    std::vector<std::pair<int, int>> matches;  // (pred index, gt index)
    std::vector<int> unmatched_pred;
    std::vector<int> unmatched_gt;
};

// Hungarian over gate-passing center distances; pairs carried over from the
// previous frame are kept first when they still pass the gate.
FrameMatchResult match_frame(const std::vector<FrameObject>& preds,
                             const std::vector<FrameObject>& gts, const MatchGate& gate,
                             const std::map<int, int>& prev_match);

struct ClearMotCounts {
    long fp = 0;
    long fn = 0;
    long ids = 0;
    long frag = 0;
    long matches = 0;
    long gt_total = 0;
    double dist_sum = 0.0;
    int fp_tracks = 0;  // predicted tracks that never matched any GT state

    double mota() const;
    double motp() const { return matches ? dist_sum / static_cast<double>(matches) : 0.0; }
    double recall() const {
        return gt_total ? static_cast<double>(matches) / static_cast<double>(gt_total) : 0.0;
    }
};

// One scene's predictions and ground truth.
struct ScenePair {
    const TrajectorySet* pred;
    const std::vector<GtTrack>* gt;
};

// CLEAR-MOT accounting pooled over scenes. Throws std::invalid_argument
// when the GT is empty (MOTA undefined).
ClearMotCounts clear_mot(const std::vector<ScenePair>& scenes, const MatchGate& gate);
ClearMotCounts clear_mot(const TrajectorySet& pred, const std::vector<GtTrack>& gt,
                         const MatchGate& gate);

struct SweepPoint {
    double target_recall = 0.0;
    bool achievable = false;
    double threshold = 0.0;
    double achieved_recall = 0.0;
    double motar = 0.0;
    double motp = 0.0;
    long fp = 0, fn = 0, ids = 0;
};

struct AmotaResult {
    double amota = 0.0;
    double amotp = 0.0;
    std::vector<SweepPoint> sweep;
};

// Recall-sweep accuracy: for each target r in {k/n}, track confidences are
// thresholded to the smallest set reaching recall >= r; at that operating
// point with achieved recall r*, FN - (1 - r*) P vanishes identically and
// MOTAR = max(0, 1 - (IDS + FP) / (r* P)). AMOTA averages MOTAR over all
// points (unreachable ones contribute 0); AMOTP averages MOTP over the
// achievable points.
AmotaResult amota(const std::vector<ScenePair>& scenes, const MatchGate& gate,
                  int sweep_points = 40);

// Ranked-retrieval average precision of binary edge classification.
double binary_average_precision(const std::vector<double>& scores,
                                const std::vector<int8_t>& labels);

struct ClassMetrics {
    double mota = 0.0, motp = 0.0, recall = 0.0;
    long fp = 0, fn = 0, ids = 0, frag = 0, gt_total = 0;
    double amota = 0.0, amotp = 0.0;
};

struct MetricsReport {
    ClassMetrics overall;
    std::map<int, ClassMetrics> per_class;  // classes with GT present
    std::vector<SweepPoint> sweep;          // overall sweep
};

// Full evaluation: overall metrics on pooled classes (matching is still
// class-gated) plus per-class breakdowns.
MetricsReport evaluate_tracking(const std::vector<ScenePair>& scenes, const MatchGate& gate,
                                int sweep_points = 40);

}  // namespace gmot
