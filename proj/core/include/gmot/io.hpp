// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gmot/cluster.hpp"
#include "gmot/metrics.hpp"
#include "gmot/model.hpp"
#include "gmot/synth.hpp"

namespace gmot::io {

inline constexpr int kSceneFormatVersion = 1;
inline constexpr int kWeightsFormatVersion = 1;

// Scene files are JSON lines, one record per detection or GT state.
void save_scenes(const std::filesystem::path& path, const std::vector<Scene>& scenes);
std::vector<Scene> load_scenes(const std::filesystem::path& path);
void write_scenes(std::ostream& os, const std::vector<Scene>& scenes);
std::vector<Scene> read_scenes(std::istream& is, const std::string& name);

// Trajectory files are JSON lines, one record per track state, keyed by
// scene id.
void save_trajectories(const std::filesystem::path& path,
                       const std::map<std::string, TrajectorySet>& per_scene);
std::map<std::string, TrajectorySet> load_trajectories(const std::filesystem::path& path);
void write_trajectories(std::ostream& os, const std::map<std::string, TrajectorySet>& per_scene);
std::map<std::string, TrajectorySet> read_trajectories(std::istream& is, const std::string& name);

// Per-window scored edges (global detection ids), JSON lines.
struct WindowScores {
    std::string scene;
    int window_start = 0;
    std::vector<ScoredEdge> edges;
};
void save_scored_edges(const std::filesystem::path& path, const std::vector<WindowScores>& rows);
std::vector<WindowScores> load_scored_edges(const std::filesystem::path& path);
void write_scored_edges(std::ostream& os, const std::vector<WindowScores>& rows);

// Weights container: JSON header with hyperparameters followed by named
// little-endian float64 tensors.
void save_model(const std::filesystem::path& path, Model& model);
Model load_model(const std::filesystem::path& path);

// Machine-readable evaluation report.
std::string metrics_report_to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const std::string& text);
void save_metrics_report(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport load_metrics_report(const std::filesystem::path& path);

// Human-readable table.
std::string metrics_report_table(const MetricsReport& report);

// Entropy report: per-scene entropies, the mean, and the kept set for the
// configured filter direction.
struct EntropyReport {
    std::map<std::string, double> scene_entropy;
    double mean = 0.0;
    std::string direction;  // "above-mean" or "below-mean"
    std::vector<std::string> kept;
};
std::string entropy_report_to_json(const EntropyReport& report);
EntropyReport entropy_report_from_json(const std::string& text);
void save_entropy_report(const std::filesystem::path& path, const EntropyReport& report);
EntropyReport load_entropy_report(const std::filesystem::path& path);

}  // namespace gmot::io
