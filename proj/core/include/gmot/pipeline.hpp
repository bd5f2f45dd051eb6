// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmot/cluster.hpp"
#include "gmot/config.hpp"
#include "gmot/io.hpp"
#include "gmot/metrics.hpp"
#include "gmot/model.hpp"
#include "gmot/synth.hpp"

namespace gmot {

// Per-scene detection-id lookup used when turning clusters into tracks.
std::map<int, NodeState> scene_node_states(const Scene& scene);

// Windows + graphs + frame-knn for one scene (no labels).
struct SceneGraphs {
    std::vector<TrackingGraph> graphs;
    std::vector<FrameKnn> knns;
};
SceneGraphs build_scene_graphs(const Scene& scene, const PipelineConfig& cfg);

// Forward every window of one scene; per-window scored edges carry
// scene-global detection ids.
std::vector<io::WindowScores> infer_scene(const Scene& scene, const SceneGraphs& graphs,
                                          const Model& model, const std::string& scene_id);

// Scored edges -> averaged -> clustered -> finalized tracks for one scene.
TrajectorySet cluster_scene(const Scene& scene, const std::vector<io::WindowScores>& windows,
                            const PipelineConfig& cfg);

struct PipelineResult {
    std::map<std::string, TrajectorySet> tracks;     // post-processed
    std::vector<io::WindowScores> window_scores;     // raw per-window scores
    io::EntropyReport entropy;
    std::optional<MetricsReport> metrics;            // present when GT exists
};

// Full pipeline over already-loaded scenes: build windows, forward, average
// scores, agglomerate, finalize, post-process, evaluate (when GT present)
// and compute per-scene entropies. Scene-level work runs on cfg.threads
// threads with deterministic ordered collection.
PipelineResult run_pipeline(const std::vector<Scene>& scenes, const Model& model,
                            const PipelineConfig& cfg);

// Training-side helpers shared by the CLI and tests.
struct LabeledDataset {
    std::vector<TrainWindow> windows;
    std::map<int, double> class_counts;  // GT states per class
};
LabeledDataset build_labeled_dataset(std::vector<Scene>& scenes, const PipelineConfig& cfg);

// Pooled edge scores/labels over a labeled scene set with a given model.
struct EdgeEvaluation {
    std::vector<double> scores;
    std::vector<int8_t> labels;
};
EdgeEvaluation score_labeled_windows(const LabeledDataset& dataset, const Model& model);

}  // namespace gmot
