// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <string>
#include <vector>

#include "gmot/geometry.hpp"

namespace gmot {

struct TrackState {
    int frame = 0;
    double t = 0.0;
    Box3D box;
    double vx = 0.0, vy = 0.0;
    double score = 1.0;
};

// Predicted trajectory: strictly increasing frames, single class.
struct Trajectory {
    int track_id = 0;
    int class_id = 0;
    std::vector<TrackState> states;

    int first_frame() const { return states.front().frame; }
    int last_frame() const { return states.back().frame; }
    // Track confidence for recall sweeps: mean member detection score.
    double confidence() const {
        if (states.empty()) return 0.0;
        double s = 0.0;
        for (const TrackState& st : states) s += st.score;
        return s / static_cast<double>(states.size());
    }
};

struct TrajectorySet {
    std::vector<Trajectory> tracks;
};

// Ground-truth trajectory; identity is the instance string.
struct GtTrack {
    std::string instance;
    int class_id = 0;
    std::vector<TrackState> states;
};

}  // namespace gmot
