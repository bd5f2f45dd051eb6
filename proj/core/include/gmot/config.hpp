// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gmot/model.hpp"
#include "gmot/postprocess.hpp"

namespace gmot {

// All pipeline knobs. Precedence: CLI flag > config file > these defaults.
struct PipelineConfig {
    // Graph construction.
    int window_len = 5;
    int stride = 1;
    int k_past = 40;
    int k_frame = 20;
    // Model.
    int class_count = 3;
    int hidden_width = 64;
    int mp_steps = 6;
    int attn_heads = 2;
    bool cross_attention = true;
    std::vector<ModalitySpec> modalities;
    // Loss.
    double beta = 0.8;
    // GT matching.
    double gt_radius = 2.0;
    double gt_iou_min = 0.1;
    // Clustering.
    double theta_min = 0.1;
    double theta_join = 0.5;
    double singleton_min_score = 0.3;
    // Post-processing.
    PostprocessOptions postproc;
    // Evaluation.
    double metric_gate = 2.0;
    int sweep_points = 40;
    // Confidence.
    std::string entropy_direction = "above-mean";
    // Execution.
    uint64_t seed = 1;
    int threads = 1;

    void validate() const;  // throws ConfigError
    ModelHyper model_hyper() const;
    GraphBuildConfig graph_config() const;

    static PipelineConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Environment variable naming a default config file.
inline constexpr const char* kConfigEnvVar = "GMOT_CONFIG";

}  // namespace gmot
