// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gmot/errors.hpp"

namespace gmot {

std::vector<WindowSpec> sliding_windows(int frame_count, int length, int stride,
                                        bool include_partial) {
    if (length < 2) throw std::invalid_argument("sliding_windows: length must be >= 2");
    if (stride < 1) throw std::invalid_argument("sliding_windows: stride must be >= 1");
    std::vector<WindowSpec> out;
    if (frame_count <= 0) return out;
    int s = 0;
    for (; s + length <= frame_count; s += stride) out.push_back({s, length});
    if (include_partial && s < frame_count && (out.empty() || out.back().first_frame != s)) {
        if (frame_count - s >= 2) out.push_back({s, frame_count - s});
    }
    return out;
}

namespace {

struct KinComponents {
    double dist = 0.0;
    double yaw = 0.0;
    double vel = 0.0;
};

KinComponents raw_components(const Detection3D& target, const Detection3D& cand) {
    KinComponents k;
    const double dx = cand.box.x - target.box.x;
    const double dy = cand.box.y - target.box.y;
    const double dz = cand.box.z - target.box.z;
    k.dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    k.yaw = std::abs(signed_yaw_diff(cand.box.yaw, target.box.yaw));
    k.vel = std::hypot(cand.vx - target.vx, cand.vy - target.vy);
    return k;
}

double minmax(double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

}  // namespace

std::vector<double> kinematic_similarity(const Detection3D& target,
                                         const std::vector<const Detection3D*>& candidates) {
    if (candidates.empty()) {
        throw std::invalid_argument("kinematic_similarity: empty candidate set");
    }
    if (!(candidates[0]->t < target.t)) {
        throw std::invalid_argument("kinematic_similarity: candidate not in the past");
    }
    // A lone candidate trivially has numerator == denominator.
    if (candidates.size() == 1) return {1.0};
    std::vector<KinComponents> raw;
    raw.reserve(candidates.size());
    for (const Detection3D* c : candidates) {
        if (!(c->t < target.t)) {
            throw std::invalid_argument("kinematic_similarity: candidate not in the past");
        }
        raw.push_back(raw_components(target, *c));
    }
    KinComponents lo = raw[0], hi = raw[0];
    for (const KinComponents& k : raw) {
        lo.dist = std::min(lo.dist, k.dist);
        lo.yaw = std::min(lo.yaw, k.yaw);
        lo.vel = std::min(lo.vel, k.vel);
        hi.dist = std::max(hi.dist, k.dist);
        hi.yaw = std::max(hi.yaw, k.yaw);
        hi.vel = std::max(hi.vel, k.vel);
    }
    std::vector<double> weighted(raw.size());
    double mx = 0.0;
    for (size_t q = 0; q < raw.size(); ++q) {
        weighted[q] = 0.5 * minmax(raw[q].dist, lo.dist, hi.dist) +
                      0.25 * minmax(raw[q].yaw, lo.yaw, hi.yaw) +
                      0.25 * minmax(raw[q].vel, lo.vel, hi.vel);
        mx = std::max(mx, weighted[q]);
    }
    std::vector<double> scores(raw.size(), 0.0);
    if (mx > 0.0) {
        for (size_t q = 0; q < raw.size(); ++q) scores[q] = weighted[q] / mx;
    }
    return scores;
}

TrackingGraph build_window_graph(const std::vector<std::vector<Detection3D>>& det_frames,
                                 const WindowSpec& window, const GraphBuildConfig& cfg) {
    TrackingGraph g;
    g.window = window;

    // Scene-wide detection ids are cumulative over frames.
    std::vector<int> frame_offset(det_frames.size() + 1, 0);
    for (size_t f = 0; f < det_frames.size(); ++f) {
        frame_offset[f + 1] = frame_offset[f] + static_cast<int>(det_frames[f].size());
    }

    const int last = std::min<int>(window.first_frame + window.length,
                                   static_cast<int>(det_frames.size()));
    std::vector<const Detection3D*> dets;
    for (int f = window.first_frame; f < last; ++f) {
        for (size_t i = 0; i < det_frames[f].size(); ++i) {
            const Detection3D& d = det_frames[f][i];
            g.nodes.push_back({f, static_cast<int>(i), d.class_id,
                               frame_offset[f] + static_cast<int>(i)});
            dets.push_back(&d);
        }
    }
    const int n = static_cast<int>(g.nodes.size());

    g.node_features = nn::Tensor(n, 11 + cfg.class_count);
    g.node_scores.resize(n);
    for (int v = 0; v < n; ++v) {
        const std::vector<double> f = encode_node_3dpm(*dets[v], cfg.class_count);
        std::copy(f.begin(), f.end(), g.node_features.row_ptr(v));
        g.node_scores[v] = dets[v]->score;
    }

    g.modality_features.clear();
    g.modality_present.clear();
    for (size_t m = 0; m < cfg.modality_tags.size(); ++m) {
        nn::Tensor mat(n, cfg.modality_dims[m]);
        std::vector<uint8_t> present(n, 0);
        for (int v = 0; v < n; ++v) {
            auto it = dets[v]->modalities.find(cfg.modality_tags[m]);
            if (it != dets[v]->modalities.end() && it->second.present) {
                if (static_cast<int>(it->second.vec.size()) != cfg.modality_dims[m]) {
                    throw ShapeError("build_window_graph: modality '" + cfg.modality_tags[m] +
                                     "' has unexpected dimension");
                }
                present[v] = 1;
                std::copy(it->second.vec.begin(), it->second.vec.end(), mat.row_ptr(v));
            }
        }
        g.modality_features.push_back(std::move(mat));
        g.modality_present.push_back(std::move(present));
    }

    // Kinematic k-NN over past same-category candidates.
    struct Ranked {
        double score;
        int frame;
        int node;
    };
    for (int v = 0; v < n; ++v) {
        std::vector<const Detection3D*> cand_dets;
        std::vector<int> cand_nodes;
        for (int u = 0; u < n; ++u) {
            if (g.nodes[u].frame < g.nodes[v].frame && g.nodes[u].class_id == g.nodes[v].class_id) {
                cand_dets.push_back(dets[u]);
                cand_nodes.push_back(u);
            }
        }
        if (cand_dets.empty()) continue;
        const std::vector<double> scores = kinematic_similarity(*dets[v], cand_dets);
        std::vector<Ranked> ranked(cand_nodes.size());
        for (size_t q = 0; q < cand_nodes.size(); ++q) {
            ranked[q] = {scores[q], g.nodes[cand_nodes[q]].frame, cand_nodes[q]};
        }
        std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
            if (a.score != b.score) return a.score < b.score;
            if (a.frame != b.frame) return a.frame < b.frame;
            return a.node < b.node;
        });
        const size_t keep = std::min<size_t>(cfg.k_past, ranked.size());
        for (size_t q = 0; q < keep; ++q) g.edges.push_back({ranked[q].node, v});
    }
    // Deterministic edge order: by (src, dst).
    std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });

    const int e = static_cast<int>(g.edges.size());
    g.edge_features = nn::Tensor(e, kEdgeFeatureWidth);
    for (int k = 0; k < e; ++k) {
        const std::vector<double> f = encode_edge_raw(*dets[g.edges[k].src], *dets[g.edges[k].dst]);
        std::copy(f.begin(), f.end(), g.edge_features.row_ptr(k));
    }
    g.edge_labels.assign(e, -1);
    return g;
}

void match_detections_to_gt(std::vector<std::vector<Detection3D>>& det_frames,
                            const std::vector<GtTrack>& annotations, double radius,
                            double iou_min) {
    // Per-frame GT states.
    struct GtRef {
        const GtTrack* track;
        const TrackState* state;
    };
    std::map<int, std::vector<GtRef>> gt_by_frame;
    for (const GtTrack& t : annotations) {
        for (const TrackState& s : t.states) gt_by_frame[s.frame].push_back({&t, &s});
    }

    for (size_t f = 0; f < det_frames.size(); ++f) {
        auto& dets = det_frames[f];
        for (Detection3D& d : dets) d.gt_instance.reset();
        auto it = gt_by_frame.find(static_cast<int>(f));
        if (it == gt_by_frame.end()) continue;
        const auto& gts = it->second;

        struct Pair {
            double dist;
            int det;
            int gt;
        };
        std::vector<Pair> pairs;
        for (size_t di = 0; di < dets.size(); ++di) {
            for (size_t gi = 0; gi < gts.size(); ++gi) {
                if (dets[di].class_id != gts[gi].track->class_id) continue;
                const double dist = center_distance_xy(dets[di].box, gts[gi].state->box);
                if (dist > radius) continue;
                if (bev_iou(dets[di].box, gts[gi].state->box) < iou_min) continue;
                pairs.push_back({dist, static_cast<int>(di), static_cast<int>(gi)});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.dist != b.dist) return a.dist < b.dist;
            if (a.det != b.det) return a.det < b.det;
            return a.gt < b.gt;
        });
        std::vector<uint8_t> det_used(dets.size(), 0), gt_used(gts.size(), 0);
        for (const Pair& p : pairs) {
            if (det_used[p.det] || gt_used[p.gt]) continue;
            det_used[p.det] = 1;
            gt_used[p.gt] = 1;
            dets[p.det].gt_instance = gts[p.gt].track->instance;
        }
    }
}

void label_edges(TrackingGraph& graph,
                 const std::vector<std::vector<Detection3D>>& det_frames) {
    const int n = static_cast<int>(graph.nodes.size());
    std::vector<const std::string*> inst(n, nullptr);
    std::map<std::string, std::vector<int>> frames_of;  // instance -> sorted frames in window
    for (int v = 0; v < n; ++v) {
        const Detection3D& d = det_frames[graph.nodes[v].frame][graph.nodes[v].index_in_frame];
        if (d.gt_instance) {
            inst[v] = &*d.gt_instance;
            frames_of[*d.gt_instance].push_back(graph.nodes[v].frame);
        }
    }
    for (auto& [key, fr] : frames_of) std::sort(fr.begin(), fr.end());

    graph.edge_labels.assign(graph.edges.size(), 0);
    for (size_t k = 0; k < graph.edges.size(); ++k) {
        const int j = graph.edges[k].src;
        const int i = graph.edges[k].dst;
        if (!inst[j] || !inst[i] || *inst[j] != *inst[i]) continue;
        const int fj = graph.nodes[j].frame;
        const int fi = graph.nodes[i].frame;
        const auto& fr = frames_of[*inst[j]];
        const bool skipped = std::any_of(fr.begin(), fr.end(),
                                         [&](int f) { return f > fj && f < fi; });
        graph.edge_labels[k] = skipped ? 0 : 1;
    }
}

FrameKnn build_frame_knn(const TrackingGraph& graph,
                         const std::vector<std::vector<Detection3D>>& det_frames, int k_frame) {
    const int n = static_cast<int>(graph.nodes.size());
    FrameKnn knn;
    knn.neighbors.resize(n);

    std::map<int, std::vector<int>> nodes_by_frame;
    for (int v = 0; v < n; ++v) nodes_by_frame[graph.nodes[v].frame].push_back(v);

    auto center = [&](int v) {
        const Detection3D& d = det_frames[graph.nodes[v].frame][graph.nodes[v].index_in_frame];
        return std::pair<double, double>{d.box.x, d.box.y};
    };

    for (const auto& [frame, members] : nodes_by_frame) {
        for (int v : members) {
            const auto [vx, vy] = center(v);
            struct Ranked {
                double dist;
                int node;
            };
            std::vector<Ranked> ranked;
            for (int u : members) {
                if (u == v) continue;
                const auto [ux, uy] = center(u);
                ranked.push_back({std::hypot(ux - vx, uy - vy), u});
            }
            std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
                return a.dist != b.dist ? a.dist < b.dist : a.node < b.node;
            });
            const size_t keep = std::min<size_t>(k_frame, ranked.size());
            for (size_t q = 0; q < keep; ++q) knn.neighbors[v].push_back(ranked[q].node);
        }
    }
    return knn;
}

}  // namespace gmot
