// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <vector>

#include "gmot/track.hpp"

namespace gmot {

// Fills every integer frame between first and last state by linear
// interpolation (yaw via shortest arc).
Trajectory interpolate_gaps(const Trajectory& t);

// Product of footprint IoUs over all unordered state pairs; 1 for a
// single-state track. Near 1 indicates a still-standing object.
// consecutive_only switches to adjacent pairs.
double intra_track_bev_iou(const Trajectory& t, bool consecutive_only = false);

// Circular mean of angles; result in [-pi, pi).
double circular_mean(const std::vector<double>& angles);

// For still tracks (intra-track IoU above the gate), 2-means on the circle
// (seeded at the first yaw and its pi-offset) splits yaws into two regimes;
// all yaws are overwritten with the majority regime's circular mean.
Trajectory correct_yaw_flips(const Trajectory& t, double still_iou_min = 0.7);

// Merges time-disjoint fragments of still objects whose mean-pose boxes
// overlap; merged states keep the earlier track's id. Candidate pairs are
// evaluated on the original tracks and applied in ascending id order; a
// merge is skipped if the current groups overlap in time.
TrajectorySet join_still_tracks(const TrajectorySet& ts, double still_iou_min = 0.7,
                                double join_iou_min = 0.6);

// Weighted running average over centers and velocities; sizes, yaws and
// scores are untouched. Boundaries renormalize over the available taps.
Trajectory smooth_track(const Trajectory& t, int window = 3,
                        const std::vector<double>& weights = {0.25, 0.5, 0.25});

struct PostprocessOptions {
    bool interpolate = true;
    bool fix_yaw_flips = true;
    bool join_still = true;
    bool smooth = true;
    double still_iou_min = 0.7;
    double join_iou_min = 0.6;
    int smooth_window = 3;
    std::vector<double> smooth_weights = {0.25, 0.5, 0.25};
};

TrajectorySet postprocess(const TrajectorySet& ts, const PostprocessOptions& opts);

}  // namespace gmot
