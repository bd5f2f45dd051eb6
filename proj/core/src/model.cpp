// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/model.hpp"

#include <algorithm>
#include <cmath>

#include "gmot/errors.hpp"

namespace gmot {

using nn::Act;
using nn::Tensor;
using nn::Var;

Model Model::init(const ModelHyper& hyper) {
    for (const ModalitySpec& m : hyper.modalities) {
        if (m.dim <= 0 || m.dim % hyper.attn_heads != 0) {
            throw ConfigError("Model::init: modality '" + m.tag +
                              "' dimension must be positive and divisible by the head count");
        }
    }
    if (hyper.hidden_width < 2 || hyper.mp_steps < 0) {
        throw ConfigError("Model::init: invalid hidden width or message-passing depth");
    }
    Rng rng(hyper.init_seed);
    const int d = hyper.hidden_width;
    Model m;
    m.hyper = hyper;
    m.node_enc = nn::Mlp::make({hyper.node_input_width(), d, d}, {Act::Relu, Act::Identity}, rng);
    m.edge_enc = nn::Mlp::make({kEdgeFeatureWidth, d, d}, {Act::Relu, Act::Identity}, rng);
    m.att_enc = nn::Mlp::make({hyper.attended_input_width(), d, d}, {Act::Relu, Act::Identity}, rng);
    m.edge_mlp = nn::Mlp::make({4 * d, d, d}, {Act::Relu, Act::Identity}, rng);
    m.past_mlp = nn::Mlp::make({3 * d, d, d}, {Act::Relu, Act::Identity}, rng);
    m.fut_mlp = nn::Mlp::make({3 * d, d, d}, {Act::Relu, Act::Identity}, rng);
    // Messages are sum-aggregated over every past/future neighbor, which
    // multiplies the embedding scale by the typical in/out degree at every
    // step and blows up deep stacks. Damping the message heads at init
    // keeps h_v near unit scale at any depth; training re-grows them.
    constexpr double kMessageInitScale = 0.1;
    for (nn::Mlp* mlp : {&m.past_mlp, &m.fut_mlp}) {
        for (double& v : mlp->layers.back().w.data) v *= kMessageInitScale;
        for (double& v : mlp->layers.back().b.data) v *= kMessageInitScale;
    }
    m.node_mlp = nn::Mlp::make({2 * d, d, d}, {Act::Relu, Act::Identity}, rng);
    m.classifier = nn::Mlp::make({d, std::max(2, d / 2), 1}, {Act::Relu, Act::Sigmoid}, rng);
    for (const ModalitySpec& spec : hyper.modalities) {
        m.mha.push_back(nn::MhaParams::make(spec.dim, hyper.attn_heads, spec.dim, rng));
        m.absent_token.push_back(nn::glorot_uniform(1, spec.dim, rng));
    }
    m.gat_w = nn::glorot_uniform(d, d, rng);
    m.gat_a = nn::glorot_uniform(2 * d, 1, rng);
    m.gat_theta = nn::glorot_uniform(d, d, rng);
    return m;
}

nn::ParamRefs Model::param_refs() {
    nn::ParamRefs refs;
    auto add_mlp = [&refs](const std::string& prefix, nn::Mlp& mlp) {
        for (size_t i = 0; i < mlp.layers.size(); ++i) {
            refs.emplace_back(prefix + ".w" + std::to_string(i), &mlp.layers[i].w);
            refs.emplace_back(prefix + ".b" + std::to_string(i), &mlp.layers[i].b);
        }
    };
    add_mlp("node_enc", node_enc);
    add_mlp("edge_enc", edge_enc);
    add_mlp("att_enc", att_enc);
    add_mlp("edge_mlp", edge_mlp);
    add_mlp("past_mlp", past_mlp);
    add_mlp("fut_mlp", fut_mlp);
    add_mlp("node_mlp", node_mlp);
    add_mlp("classifier", classifier);
    for (size_t m = 0; m < mha.size(); ++m) {
        const std::string prefix = "mha." + hyper.modalities[m].tag;
        for (int u = 0; u < mha[m].heads; ++u) {
            const std::string h = prefix + ".h" + std::to_string(u);
            refs.emplace_back(h + ".wq", &mha[m].wq[u]);
            refs.emplace_back(h + ".wk", &mha[m].wk[u]);
            refs.emplace_back(h + ".wv", &mha[m].wv[u]);
        }
        refs.emplace_back(prefix + ".wo", &mha[m].wo);
        refs.emplace_back("absent." + hyper.modalities[m].tag, &absent_token[m]);
    }
    refs.emplace_back("gat.w", &gat_w);
    refs.emplace_back("gat.a", &gat_a);
    refs.emplace_back("gat.theta", &gat_theta);
    return refs;
}

namespace {

// Fixed input scaling: raw pose-and-motion entries span wildly different
// ranges (meters in +-50, scores in [0, 1]), which wrecks the conditioning
// of the first encoder layer. Constants, not data statistics, so the
// pipeline stays a pure function of its inputs.
constexpr double kPosScale = 50.0;
constexpr double kSizeScale = 5.0;
constexpr double kVelScale = 10.0;
constexpr double kTimeScale = 10.0;
constexpr double kEdgeDistScale = 10.0;
constexpr double kEdgeVelScale = 5.0;
constexpr double kEdgeDtScale = 2.5;

}  // namespace

nn::Tensor model_node_input(const TrackingGraph& graph, const ModelHyper& hyper) {
    if (graph.node_features.cols != 11 + hyper.class_count) {
        throw ShapeError("model_node_input: graph built for a different class count");
    }
    Tensor scaled = graph.node_features;
    const int c = hyper.class_count;
    for (int r = 0; r < scaled.rows; ++r) {
        double* row = scaled.row_ptr(r);
        row[0] /= kPosScale;
        row[1] /= kPosScale;
        row[2] /= kPosScale;
        row[3] /= kSizeScale;
        row[4] /= kSizeScale;
        row[5] /= kSizeScale;
        row[6] /= M_PI;
        row[7] /= kVelScale;
        row[8] /= kVelScale;
        row[10 + c] /= kTimeScale;
    }
    if (hyper.cross_attention) return scaled;
    if (graph.modality_features.size() != hyper.modalities.size()) {
        throw ShapeError("model_node_input: graph modalities do not match the model");
    }
    std::vector<const Tensor*> parts{&scaled};
    for (const Tensor& m : graph.modality_features) parts.push_back(&m);
    return nn::kern::hstack(parts);
}

nn::Tensor model_edge_input(const TrackingGraph& graph) {
    Tensor scaled = graph.edge_features;
    for (int r = 0; r < scaled.rows; ++r) {
        double* row = scaled.row_ptr(r);
        row[0] /= kEdgeDistScale;
        row[1] /= kEdgeVelScale;
        row[2] /= M_PI;
        row[4] /= kEdgeDtScale;
    }
    return scaled;
}

namespace {

struct EdgeIndex {
    std::vector<int> src, dst;
};

EdgeIndex edge_index(const TrackingGraph& graph) {
    EdgeIndex ix;
    ix.src.reserve(graph.edges.size());
    ix.dst.reserve(graph.edges.size());
    for (const GraphEdge& e : graph.edges) {
        ix.src.push_back(e.src);
        ix.dst.push_back(e.dst);
    }
    return ix;
}

// Endpoint rows per edge, pointing absent nodes at the learned token row
// (appended below the N real rows).
std::vector<int> endpoint_rows(const TrackingGraph& graph, const std::vector<int>& nodes,
                               size_t modality) {
    const int token_row = static_cast<int>(graph.nodes.size());
    std::vector<int> rows(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k) {
        rows[k] = graph.modality_present[modality][nodes[k]] ? nodes[k] : token_row;
    }
    return rows;
}

// GAT pair lists: per center node, the member set {self} + neighbors with
// contiguous segment offsets.
struct GatIndex {
    std::vector<int> members, centers, offsets;
};

GatIndex gat_index(const FrameKnn& knn) {
    GatIndex g;
    g.offsets.push_back(0);
    for (size_t j = 0; j < knn.neighbors.size(); ++j) {
        g.members.push_back(static_cast<int>(j));
        g.centers.push_back(static_cast<int>(j));
        for (int u : knn.neighbors[j]) {
            g.members.push_back(u);
            g.centers.push_back(static_cast<int>(j));
        }
        g.offsets.push_back(static_cast<int>(g.members.size()));
    }
    return g;
}

}  // namespace

MpState encode_initial(const TrackingGraph& graph, const Model& model) {
    MpState s;
    s.h_v = nn::mlp_forward(model.node_enc, model_node_input(graph, model.hyper));
    s.h_e = nn::mlp_forward(model.edge_enc, model_edge_input(graph));
    s.h_v0 = s.h_v;
    return s;
}

nn::Tensor cross_edge_modality_attention(const TrackingGraph& graph, const Model& model) {
    const EdgeIndex ix = edge_index(graph);
    const Tensor edge_input = model_edge_input(graph);
    if (!model.hyper.cross_attention) {
        return nn::mlp_forward(model.att_enc, edge_input);
    }
    // Each per-edge attention direction has a single key/value row, so the
    // softmax weight is identically 1 and the attended feature reduces to
    // the value projection of the source endpoint (or its absent token).
    // Batched over edges this is two matmuls per (endpoint, modality).
    std::vector<Tensor> parts;
    for (const std::vector<int>* nodes : {&ix.dst, &ix.src}) {
        for (size_t m = 0; m < model.mha.size(); ++m) {
            const Tensor stacked =
                nn::kern::vstack({&graph.modality_features[m], &model.absent_token[m]});
            const Tensor source =
                nn::kern::gather_rows(stacked, endpoint_rows(graph, *nodes, m));
            std::vector<Tensor> heads;
            for (int u = 0; u < model.mha[m].heads; ++u) {
                heads.push_back(nn::kern::matmul(source, model.mha[m].wv[u]));
            }
            std::vector<const Tensor*> ptrs;
            for (const Tensor& h : heads) ptrs.push_back(&h);
            parts.push_back(nn::kern::matmul(nn::kern::hstack(ptrs), model.mha[m].wo));
        }
    }
    std::vector<const Tensor*> ptrs;
    for (const Tensor& p : parts) ptrs.push_back(&p);
    ptrs.push_back(&edge_input);
    return nn::mlp_forward(model.att_enc, nn::kern::hstack(ptrs));
}

void edge_update(MpState& state, const TrackingGraph& graph, const Model& model) {
    if (state.h_e_att.rows != static_cast<int>(graph.edges.size())) {
        throw StateError("edge_update: attended edge features not computed for this graph");
    }
    const EdgeIndex ix = edge_index(graph);
    const Tensor hi = nn::kern::gather_rows(state.h_v, ix.dst);
    const Tensor hj = nn::kern::gather_rows(state.h_v, ix.src);
    state.h_e = nn::mlp_forward(model.edge_mlp,
                                nn::kern::hstack({&hi, &hj, &state.h_e, &state.h_e_att}));
}

void node_update_time_aware(MpState& state, const TrackingGraph& graph, const Model& model) {
    const int n = static_cast<int>(graph.nodes.size());
    const EdgeIndex ix = edge_index(graph);
    const Tensor hsrc = nn::kern::gather_rows(state.h_v, ix.src);
    const Tensor hsrc0 = nn::kern::gather_rows(state.h_v0, ix.src);
    const Tensor hdst = nn::kern::gather_rows(state.h_v, ix.dst);
    const Tensor hdst0 = nn::kern::gather_rows(state.h_v0, ix.dst);
    const Tensor past_in = nn::kern::hstack({&hsrc, &state.h_e, &hsrc0});
    const Tensor fut_in = nn::kern::hstack({&hdst, &state.h_e, &hdst0});
    const Tensor agg_past =
        nn::kern::scatter_sum_rows(nn::mlp_forward(model.past_mlp, past_in), ix.dst, n);
    const Tensor agg_fut =
        nn::kern::scatter_sum_rows(nn::mlp_forward(model.fut_mlp, fut_in), ix.src, n);
    state.h_v = nn::mlp_forward(model.node_mlp, nn::kern::hstack({&agg_past, &agg_fut}));
}

void framewise_gat(MpState& state, const FrameKnn& knn, const Model& model) {
    if (knn.neighbors.size() != static_cast<size_t>(state.h_v.rows)) {
        throw ShapeError("framewise_gat: neighbor lists do not match node count");
    }
    const GatIndex gi = gat_index(knn);
    const Tensor wh = nn::kern::matmul(state.h_v, model.gat_w);
    const Tensor pair_members = nn::kern::gather_rows(wh, gi.members);
    const Tensor pair_centers = nn::kern::gather_rows(wh, gi.centers);
    Tensor logits = nn::kern::matmul(nn::kern::hstack({&pair_members, &pair_centers}), model.gat_a);
    const double slope = model.hyper.gat_leaky_slope;
    for (double& v : logits.data) v = v > 0.0 ? v : slope * v;
    const Tensor alpha = nn::kern::segment_softmax(logits, gi.offsets);
    const Tensor th = nn::kern::matmul(state.h_v, model.gat_theta);
    const Tensor contrib = nn::kern::scale_rows(nn::kern::gather_rows(th, gi.members), alpha);
    state.h_v = nn::kern::scatter_sum_rows(contrib, gi.centers, state.h_v.rows);
}

std::vector<double> classify_edges(const MpState& state, const Model& model) {
    const Tensor out = nn::mlp_forward(model.classifier, state.h_e);
    return out.data;
}

std::vector<double> forward(const TrackingGraph& graph, const FrameKnn& knn, const Model& model) {
    nn::Tape tape(false);
    const Var scores = forward_taped(tape, graph, knn, model);
    return tape.val(scores).data;
}

namespace {

Var cross_attention_taped(nn::Tape& t, const TrackingGraph& graph, const Model& model,
                          Var edge_feat) {
    if (!model.hyper.cross_attention) {
        return nn::mlp_forward(t, "att_enc", model.att_enc, edge_feat);
    }
    const EdgeIndex ix = edge_index(graph);
    std::vector<Var> parts;
    for (const std::vector<int>* nodes : {&ix.dst, &ix.src}) {
        for (size_t m = 0; m < model.mha.size(); ++m) {
            const std::string tag = model.hyper.modalities[m].tag;
            Var stacked = nn::concat_rows(
                t, {t.constant(graph.modality_features[m]), t.param("absent." + tag, model.absent_token[m])});
            Var source = nn::gather_rows(t, stacked, endpoint_rows(graph, *nodes, m));
            std::vector<Var> heads;
            for (int u = 0; u < model.mha[m].heads; ++u) {
                Var wv = t.param("mha." + tag + ".h" + std::to_string(u) + ".wv",
                                 model.mha[m].wv[u]);
                heads.push_back(nn::matmul(t, source, wv));
            }
            Var wo = t.param("mha." + tag + ".wo", model.mha[m].wo);
            parts.push_back(nn::matmul(t, nn::concat_cols(t, heads), wo));
        }
    }
    parts.push_back(edge_feat);
    return nn::mlp_forward(t, "att_enc", model.att_enc, nn::concat_cols(t, parts));
}

Var gat_taped(nn::Tape& t, Var hv, const FrameKnn& knn, const Model& model) {
    const GatIndex gi = gat_index(knn);
    const int n = t.val(hv).rows;
    Var w = t.param("gat.w", model.gat_w);
    Var a = t.param("gat.a", model.gat_a);
    Var theta = t.param("gat.theta", model.gat_theta);
    Var wh = nn::matmul(t, hv, w);
    Var pair = nn::concat_cols(t, {nn::gather_rows(t, wh, gi.members),
                                   nn::gather_rows(t, wh, gi.centers)});
    Var logits = nn::leaky_relu(t, nn::matmul(t, pair, a), model.hyper.gat_leaky_slope);
    Var alpha = nn::segment_softmax(t, logits, gi.offsets);
    Var th = nn::matmul(t, hv, theta);
    Var contrib = nn::scale_rows(t, nn::gather_rows(t, th, gi.members), alpha);
    return nn::scatter_sum_rows(t, contrib, gi.centers, n);
}

}  // namespace

Var forward_taped(nn::Tape& t, const TrackingGraph& graph, const FrameKnn& knn,
                  const Model& model) {
    const int n = static_cast<int>(graph.nodes.size());
    const EdgeIndex ix = edge_index(graph);
    Var x = t.constant(model_node_input(graph, model.hyper));
    Var edge_feat = t.constant(model_edge_input(graph));
    Var hv0 = nn::mlp_forward(t, "node_enc", model.node_enc, x);
    Var he = nn::mlp_forward(t, "edge_enc", model.edge_enc, edge_feat);
    Var he_att = cross_attention_taped(t, graph, model, edge_feat);
    Var hv = hv0;
    for (int l = 1; l <= model.hyper.mp_steps; ++l) {
        // Edge update on the previous node embeddings.
        Var hi = nn::gather_rows(t, hv, ix.dst);
        Var hj = nn::gather_rows(t, hv, ix.src);
        he = nn::mlp_forward(t, "edge_mlp", model.edge_mlp,
                             nn::concat_cols(t, {hi, hj, he, he_att}));
        // Time-aware node update: separate past/future messages, summed.
        Var past_in = nn::concat_cols(
            t, {nn::gather_rows(t, hv, ix.src), he, nn::gather_rows(t, hv0, ix.src)});
        Var fut_in = nn::concat_cols(
            t, {nn::gather_rows(t, hv, ix.dst), he, nn::gather_rows(t, hv0, ix.dst)});
        Var agg_past = nn::scatter_sum_rows(
            t, nn::mlp_forward(t, "past_mlp", model.past_mlp, past_in), ix.dst, n);
        Var agg_fut = nn::scatter_sum_rows(
            t, nn::mlp_forward(t, "fut_mlp", model.fut_mlp, fut_in), ix.src, n);
        hv = nn::mlp_forward(t, "node_mlp", model.node_mlp, nn::concat_cols(t, {agg_past, agg_fut}));
        // Inter-category exchange over the frame-wise k-NN graph.
        hv = gat_taped(t, hv, knn, model);
    }
    return nn::mlp_forward(t, "classifier", model.classifier, he);
}

double class_balanced_weight(double beta, double n) {
    const double nn_ = std::max(1.0, n);
    return (1.0 - beta) / (1.0 - std::pow(beta, nn_));
}

std::vector<double> edge_category_counts(const TrackingGraph& graph,
                                         const std::map<int, double>& class_counts) {
    std::vector<double> counts(graph.edges.size(), 1.0);
    for (size_t k = 0; k < graph.edges.size(); ++k) {
        const int cls = graph.nodes[graph.edges[k].src].class_id;
        auto it = class_counts.find(cls);
        counts[k] = it != class_counts.end() ? it->second : 1.0;
    }
    return counts;
}

namespace {
std::vector<double> cb_weights(const std::vector<int8_t>& labels,
                               const std::vector<double>& counts, double beta) {
    if (labels.size() != counts.size()) {
        throw ShapeError("class_balanced_loss: labels/counts misaligned");
    }
    std::vector<double> w(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) w[i] = class_balanced_weight(beta, counts[i]);
    return w;
}
}  // namespace

double class_balanced_loss(const std::vector<double>& scores, const std::vector<int8_t>& labels,
                           const std::vector<double>& counts, double beta) {
    if (scores.size() != labels.size()) {
        throw ShapeError("class_balanced_loss: scores/labels misaligned");
    }
    const std::vector<double> w = cb_weights(labels, counts, beta);
    double loss = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        const double p = scores[i];
        const double y = static_cast<double>(labels[i]);
        loss -= w[i] * (y * std::log(std::max(p, 1e-12)) +
                        (1.0 - y) * std::log(std::max(1.0 - p, 1e-12)));
    }
    return scores.empty() ? 0.0 : loss / static_cast<double>(scores.size());
}

Var class_balanced_loss(nn::Tape& tape, Var scores, const std::vector<int8_t>& labels,
                        const std::vector<double>& counts, double beta) {
    std::vector<double> y(labels.begin(), labels.end());
    return nn::weighted_bce_mean(tape, scores, std::move(y), cb_weights(labels, counts, beta));
}

TrainTrace train_toy(Model& model, const std::vector<TrainWindow>& windows,
                     const std::map<int, double>& class_counts, const TrainOptions& opts) {
    if (windows.empty()) throw std::invalid_argument("train_toy: empty dataset");
    for (const TrainWindow& w : windows) {
        if (!w.graph.edges.empty() && w.graph.edge_labels.size() != w.graph.edges.size()) {
            throw StateError("train_toy: windows must be labeled");
        }
    }
    nn::SgdMomentum opt;
    opt.lr = opts.lr;
    opt.momentum = opts.momentum;
    nn::ParamRefs refs = model.param_refs();

    TrainTrace trace;
    std::vector<size_t> order(windows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        if (opts.shuffle) {
            Rng rng(opts.shuffle_seed + static_cast<uint64_t>(epoch));
            for (size_t i = order.size(); i > 1; --i) {
                const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
                std::swap(order[i - 1], order[j]);
            }
        }
        double loss_sum = 0.0;
        int counted = 0;
        for (size_t wi : order) {
            const TrainWindow& w = windows[wi];
            if (w.graph.edges.empty()) continue;
            nn::Tape tape;
            Var scores = forward_taped(tape, w.graph, w.knn, model);
            Var loss = class_balanced_loss(tape, scores, w.graph.edge_labels,
                                           edge_category_counts(w.graph, class_counts), opts.beta);
            const double lv = tape.val(loss)(0, 0);
            if (!std::isfinite(lv)) throw TrainError("train_toy: non-finite loss", epoch);
            tape.backward(loss);
            std::map<std::string, nn::Tensor> grads = tape.param_grads();
            if (opts.max_grad_norm > 0.0) {
                double sq = 0.0;
                for (const auto& [name, g] : grads) {
                    for (double v : g.data) sq += v * v;
                }
                const double norm = std::sqrt(sq);
                if (norm > opts.max_grad_norm) {
                    const double scale = opts.max_grad_norm / norm;
                    for (auto& [name, g] : grads) {
                        for (double& v : g.data) v *= scale;
                    }
                }
            }
            opt.step(refs, grads);
            loss_sum += lv;
            ++counted;
        }
        trace.epoch_mean_loss.push_back(counted ? loss_sum / counted : 0.0);
    }
    return trace;
}

}  // namespace gmot
