// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gmot/graph_build.hpp"
#include "gmot/nn/layers.hpp"

namespace gmot {

struct ModalitySpec {
    std::string tag;
    int dim = 0;
};

struct ModelHyper {
    int class_count = 3;
    int hidden_width = 64;  // D_h
    int mp_steps = 6;       // L
    int attn_heads = 2;
    std::vector<ModalitySpec> modalities;
    // When false, modality vectors are stacked into the node feature
    // (zeros when absent) and the attended edge feature sees only the raw
    // edge vector. Used by the no-attention ablation.
    bool cross_attention = true;
    double gat_leaky_slope = 0.2;
    uint64_t init_seed = 1;

    int modality_dim_sum() const {
        int s = 0;
        for (const ModalitySpec& m : modalities) s += m.dim;
        return s;
    }
    int node_input_width() const {
        return 11 + class_count + (cross_attention ? 0 : modality_dim_sum());
    }
    int attended_input_width() const {
        return cross_attention ? 2 * modality_dim_sum() + kEdgeFeatureWidth : kEdgeFeatureWidth;
    }
};

// All learnable weights of the network.
struct Model {
    ModelHyper hyper;
    nn::Mlp node_enc;    // node input -> D
    nn::Mlp edge_enc;    // 5 -> D
    nn::Mlp att_enc;     // attended concat -> D
    nn::Mlp edge_mlp;    // 4D -> D
    nn::Mlp past_mlp;    // 3D -> D
    nn::Mlp fut_mlp;     // 3D -> D
    nn::Mlp node_mlp;    // 2D -> D
    nn::Mlp classifier;  // D -> 1, sigmoid
    std::vector<nn::MhaParams> mha;     // per modality
    std::vector<nn::Tensor> absent_token;  // per modality, 1 x dim
    nn::Tensor gat_w;      // D x D
    nn::Tensor gat_a;      // 2D x 1
    nn::Tensor gat_theta;  // D x D

    static Model init(const ModelHyper& hyper);
    nn::ParamRefs param_refs();
};

// Message-passing state for one window.
struct MpState {
    nn::Tensor h_v;      // current node embeddings, N x D
    nn::Tensor h_e;      // current edge embeddings, E x D
    nn::Tensor h_v0;     // initial node embeddings (time-aware prior)
    nn::Tensor h_e_att;  // attention-weighted modality edge features, E x D
};

// Node-feature matrix as the model consumes it: fixed per-column scaling
// (positions, sizes, yaw, velocities, time brought to unit order) plus the
// stacked modality block when cross attention is disabled.
nn::Tensor model_node_input(const TrackingGraph& graph, const ModelHyper& hyper);

// Edge-feature matrix with the same fixed scaling applied.
nn::Tensor model_edge_input(const TrackingGraph& graph);

// Single-step operations (plain tensor path).
MpState encode_initial(const TrackingGraph& graph, const Model& model);
nn::Tensor cross_edge_modality_attention(const TrackingGraph& graph, const Model& model);
void edge_update(MpState& state, const TrackingGraph& graph, const Model& model);
void node_update_time_aware(MpState& state, const TrackingGraph& graph, const Model& model);
void framewise_gat(MpState& state, const FrameKnn& knn, const Model& model);
std::vector<double> classify_edges(const MpState& state, const Model& model);

// Full forward pass: encode, attend once, L x {edge, node, frame-wise
// attention}, classify. Deterministic for fixed weights and inputs.
std::vector<double> forward(const TrackingGraph& graph, const FrameKnn& knn, const Model& model);

// Taped forward returning the E x 1 score column for training.
nn::Var forward_taped(nn::Tape& tape, const TrackingGraph& graph, const FrameKnn& knn,
                      const Model& model);

// (1 - beta) / (1 - beta^n); n below 1 is clamped to 1.
double class_balanced_weight(double beta, double n);

// Per-edge object count of the edge's (single) category.
std::vector<double> edge_category_counts(const TrackingGraph& graph,
                                         const std::map<int, double>& class_counts);

// Mean over edges of w * BCE(score, label); empty edge set yields 0.
double class_balanced_loss(const std::vector<double>& scores, const std::vector<int8_t>& labels,
                           const std::vector<double>& counts, double beta = 0.8);
nn::Var class_balanced_loss(nn::Tape& tape, nn::Var scores, const std::vector<int8_t>& labels,
                            const std::vector<double>& counts, double beta = 0.8);

struct TrainWindow {
    TrackingGraph graph;
    FrameKnn knn;
};

struct TrainOptions {
    int epochs = 10;
    double lr = 1e-4;
    double momentum = 0.9;
    double beta = 0.8;
    bool shuffle = true;
    uint64_t shuffle_seed = 99;
    // Global L2 gradient-norm clip; deep sum-aggregation graphs produce
    // occasional steep steps that otherwise kill the network early.
    double max_grad_norm = 5.0;  // <= 0 disables
};

struct TrainTrace {
    std::vector<double> epoch_mean_loss;
};

// Plain per-window SGD over labeled windows. Throws TrainError on a
// non-finite loss, reporting the epoch.
TrainTrace train_toy(Model& model, const std::vector<TrainWindow>& windows,
                     const std::map<int, double>& class_counts, const TrainOptions& opts);

}  // namespace gmot
