// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/pipeline.hpp"

#include <algorithm>

#include "gmot/confidence.hpp"
#include "gmot/parallel.hpp"
#include "gmot/postprocess.hpp"

namespace gmot {

std::map<int, NodeState> scene_node_states(const Scene& scene) {
    std::map<int, NodeState> out;
    int id = 0;
    for (int f = 0; f < scene.frame_count; ++f) {
        for (const Detection3D& d : scene.det_frames[f]) {
            out[id++] = {d.frame, d.t, d.box, d.vx, d.vy, d.score, d.class_id};
        }
    }
    return out;
}

SceneGraphs build_scene_graphs(const Scene& scene, const PipelineConfig& cfg) {
    SceneGraphs out;
    const GraphBuildConfig gcfg = cfg.graph_config();
    for (const WindowSpec& w :
         sliding_windows(scene.frame_count, cfg.window_len, cfg.stride, false)) {
        TrackingGraph g = build_window_graph(scene.det_frames, w, gcfg);
        FrameKnn knn = build_frame_knn(g, scene.det_frames, cfg.k_frame);
        out.graphs.push_back(std::move(g));
        out.knns.push_back(std::move(knn));
    }
    return out;
}

std::vector<io::WindowScores> infer_scene(const Scene& scene, const SceneGraphs& graphs,
                                          const Model& model, const std::string& scene_id) {
    std::vector<io::WindowScores> out(graphs.graphs.size());
    for (size_t w = 0; w < graphs.graphs.size(); ++w) {
        const TrackingGraph& g = graphs.graphs[w];
        const std::vector<double> scores = forward(g, graphs.knns[w], model);
        io::WindowScores ws;
        ws.scene = scene_id;
        ws.window_start = g.window.first_frame;
        ws.edges.reserve(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e) {
            ws.edges.push_back({g.nodes[g.edges[e].src].global_id,
                                g.nodes[g.edges[e].dst].global_id, scores[e], 1});
        }
        out[w] = std::move(ws);
    }
    return out;
}

TrajectorySet cluster_scene(const Scene& scene, const std::vector<io::WindowScores>& windows,
                            const PipelineConfig& cfg) {
    std::vector<std::vector<ScoredEdge>> preds;
    preds.reserve(windows.size());
    for (const io::WindowScores& w : windows) preds.push_back(w.edges);
    const ScoredEdgeSet averaged = average_overlapping_scores(preds);

    const std::map<int, NodeState> states = scene_node_states(scene);
    std::map<int, ClusterNodeInfo> info;
    for (const auto& [id, s] : states) info[id] = {s.frame};
    const ClusterSet clusters = agglomerate(averaged, info, cfg.theta_min, cfg.theta_join);
    return finalize_trajectories(clusters, states, cfg.singleton_min_score);
}

PipelineResult run_pipeline(const std::vector<Scene>& scenes, const Model& model,
                            const PipelineConfig& cfg) {
    PipelineResult result;
    const int n = static_cast<int>(scenes.size());

    struct SceneOutput {
        std::vector<io::WindowScores> windows;
        TrajectorySet tracks;
        double entropy = 0.0;
    };
    std::vector<SceneOutput> outputs(n);

    parallel_for(n, cfg.threads, [&](int s) {
        const Scene& scene = scenes[s];
        const SceneGraphs graphs = build_scene_graphs(scene, cfg);
        SceneOutput& out = outputs[s];
        out.windows = infer_scene(scene, graphs, model, scene.id);
        out.tracks = postprocess(cluster_scene(scene, out.windows, cfg), cfg.postproc);
        std::vector<double> batch_entropies;
        batch_entropies.reserve(out.windows.size());
        for (const io::WindowScores& w : out.windows) {
            std::vector<double> scores;
            scores.reserve(w.edges.size());
            for (const ScoredEdge& e : w.edges) scores.push_back(e.score);
            batch_entropies.push_back(batch_entropy(scores));
        }
        out.entropy = scene_entropy(batch_entropies);
    });

    // Deterministic ordered collection.
    for (int s = 0; s < n; ++s) {
        result.tracks[scenes[s].id] = std::move(outputs[s].tracks);
        for (io::WindowScores& w : outputs[s].windows) {
            result.window_scores.push_back(std::move(w));
        }
        result.entropy.scene_entropy[scenes[s].id] = outputs[s].entropy;
    }

    double mean = 0.0;
    for (const auto& [id, h] : result.entropy.scene_entropy) mean += h;
    result.entropy.mean =
        result.entropy.scene_entropy.empty() ? 0.0 : mean / result.entropy.scene_entropy.size();
    result.entropy.direction = cfg.entropy_direction;
    if (!result.entropy.scene_entropy.empty()) {
        const EntropyFilter dir = cfg.entropy_direction == "below-mean" ? EntropyFilter::BelowMean
                                                                        : EntropyFilter::AboveMean;
        for (const std::string& id : filter_scenes(result.entropy.scene_entropy, dir)) {
            result.entropy.kept.push_back(id);
        }
    }

    // Evaluate when any scene carries ground truth.
    bool any_gt = false;
    for (const Scene& s : scenes) any_gt = any_gt || !s.gt_tracks.empty();
    if (any_gt && n > 0) {
        std::vector<ScenePair> pairs;
        for (const Scene& s : scenes) {
            pairs.push_back({&result.tracks.at(s.id), &s.gt_tracks});
        }
        MatchGate gate;
        gate.max_dist = cfg.metric_gate;
        result.metrics = evaluate_tracking(pairs, gate, cfg.sweep_points);
    }
    return result;
}

LabeledDataset build_labeled_dataset(std::vector<Scene>& scenes, const PipelineConfig& cfg) {
    LabeledDataset out;
    for (Scene& scene : scenes) {
        match_detections_to_gt(scene.det_frames, scene.gt_tracks, cfg.gt_radius, cfg.gt_iou_min);
        for (const GtTrack& t : scene.gt_tracks) {
            out.class_counts[t.class_id] += static_cast<double>(t.states.size());
        }
        const GraphBuildConfig gcfg = cfg.graph_config();
        for (const WindowSpec& w :
             sliding_windows(scene.frame_count, cfg.window_len, cfg.stride, false)) {
            TrainWindow tw;
            tw.graph = build_window_graph(scene.det_frames, w, gcfg);
            label_edges(tw.graph, scene.det_frames);
            tw.knn = build_frame_knn(tw.graph, scene.det_frames, cfg.k_frame);
            out.windows.push_back(std::move(tw));
        }
    }
    return out;
}

EdgeEvaluation score_labeled_windows(const LabeledDataset& dataset, const Model& model) {
    EdgeEvaluation out;
    for (const TrainWindow& w : dataset.windows) {
        if (w.graph.edges.empty()) continue;
        const std::vector<double> scores = forward(w.graph, w.knn, model);
        out.scores.insert(out.scores.end(), scores.begin(), scores.end());
        out.labels.insert(out.labels.end(), w.graph.edge_labels.begin(),
                          w.graph.edge_labels.end());
    }
    return out;
}

}  // namespace gmot
