// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <string>
#include <vector>

#include "gmot/detection.hpp"
#include "gmot/track.hpp"

namespace gmot {

struct ClassSpec {
    int class_id = 0;
    double spawn_weight = 1.0;
    double size_mean[3] = {1.9, 4.6, 1.7};  // w, l, h
    double size_sigma = 0.1;
    double speed_min = 0.0;
    double speed_max = 8.0;
};

struct ModalityConfig {
    std::string tag;
    int dim = 16;
    double p_near = 0.95;  // presence probability at range 0
    double p_far = 0.3;    // presence probability at the scene extent
    double noise_sigma = 0.1;

    // Intermittence profile used by the CLI and the acceptance suite.
    static ModalityConfig standard(const std::string& tag, int dim) {
        return {tag, dim, 0.95, 0.35, 0.15};
    }
};

struct SceneConfig {
    uint64_t seed = 1;
    int frames = 40;
    double frame_period = 0.5;  // seconds, 2 Hz-like
    std::vector<ClassSpec> classes;
    int objects_min = 4;
    int objects_max = 8;
    double extent = 50.0;  // scene half-width, meters
    double turn_rate_max = 0.03;  // rad per frame
    // Fraction of objects aimed roughly at the scene center; raises the
    // rate of trajectory crossings, the hard case for data association.
    double p_converge = 0.0;

    double center_sigma = 0.25;
    double yaw_sigma = 0.05;
    double vel_sigma = 0.2;
    double tp_score_mean = 0.85, tp_score_sigma = 0.08;
    double fp_score_mean = 0.35, fp_score_sigma = 0.12;

    double p_fn = 0.1;        // per-state miss probability
    double fp_rate = 1.0;     // expected clutter detections per frame
    double p_yaw_flip = 0.05; // probability of a +-pi yaw flip

    std::vector<ModalityConfig> modalities;
    int clutter_prototypes = 8;
    double prototype_scale = 1.0;

    void validate() const;  // throws std::invalid_argument
    static SceneConfig defaults_3class();
};

// Generator output: exact GT plus corrupted detections with per-detection
// provenance (the GT instance string, or empty for clutter).
struct Scene {
    std::string id;
    int frame_count = 0;
    std::vector<std::vector<Detection3D>> det_frames;
    std::vector<GtTrack> gt_tracks;
    std::vector<std::vector<std::string>> provenance;
};

// Fully determined by cfg (including the seed).
Scene generate_scene(const SceneConfig& cfg, const std::string& scene_id);

// Seeds per scene are derived as cfg.seed + index.
std::vector<Scene> generate_scenes(const SceneConfig& cfg, int count,
                                   const std::string& id_prefix);

// Frame-to-frame greedy baseline: matches detections to the previous
// frame's active tracks by footprint IoU (same class, IoU >= iou_min),
// highest IoU first; unmatched detections start fresh tracks. No motion
// model and no gap bridging.
TrajectorySet oracle_greedy_baseline(const std::vector<std::vector<Detection3D>>& det_frames,
                                     double iou_min = 0.1);

}  // namespace gmot
