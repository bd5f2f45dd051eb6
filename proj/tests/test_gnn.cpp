// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gmot/errors.hpp"
#include "gmot/model.hpp"
#include "gmot/rng.hpp"
#include "test_support.hpp"

using namespace gmot;
using nn::Tensor;

namespace {

ModelHyper tiny_hyper(int mp_steps = 2, bool cross_attention = true) {
    ModelHyper h;
    h.class_count = 2;
    h.hidden_width = 8;
    h.mp_steps = mp_steps;
    h.attn_heads = 2;
    h.modalities = {{"camera", 4}, {"lidar", 4}};
    h.cross_attention = cross_attention;
    h.init_seed = 42;
    return h;
}

GraphBuildConfig tiny_graph_cfg() {
    GraphBuildConfig c;
    c.class_count = 2;
    c.k_past = 8;
    c.k_frame = 8;
    c.modality_tags = {"camera", "lidar"};
    c.modality_dims = {4, 4};
    return c;
}

// Random window with intermittent modalities.
std::vector<std::vector<Detection3D>> random_frames(Rng& rng, int frames, int per_frame,
                                                    double p_present = 0.7) {
    std::vector<std::vector<Detection3D>> out(frames);
    for (int f = 0; f < frames; ++f) {
        for (int d = 0; d < per_frame; ++d) {
            Detection3D det = test::det(rng.uniform(-15, 15), rng.uniform(-15, 15), f, f * 0.5,
                                        static_cast<int>(rng.uniform_int(0, 1)),
                                        rng.uniform(0.2, 1.0), rng.normal(), rng.normal());
            det.box.yaw = rng.uniform(-M_PI, M_PI);
            for (const char* tag : {"camera", "lidar"}) {
                ModalityEmbedding emb;
                emb.vec.resize(4);
                if (rng.bernoulli(p_present)) {
                    emb.present = true;
                    for (double& v : emb.vec) v = rng.normal();
                }
                det.modalities[tag] = emb;
            }
            out[f].push_back(det);
        }
    }
    return out;
}

struct Built {
    std::vector<std::vector<Detection3D>> frames;
    TrackingGraph graph;
    FrameKnn knn;
};

Built build_random(Rng& rng, int frames, int per_frame, double p_present = 0.7) {
    Built b;
    b.frames = random_frames(rng, frames, per_frame, p_present);
    b.graph = build_window_graph(b.frames, {0, frames}, tiny_graph_cfg());
    b.knn = build_frame_knn(b.graph, b.frames, 8);
    return b;
}

std::vector<int8_t> random_labels(const TrackingGraph& g, Rng& rng) {
    std::vector<int8_t> labels(g.edges.size());
    for (auto& l : labels) l = rng.bernoulli(0.3) ? 1 : 0;
    return labels;
}

}  // namespace

TEST_CASE("encode_initial shapes and determinism") {
    Rng rng(1);
    Built b = build_random(rng, 3, 3);
    Model m = Model::init(tiny_hyper());
    const MpState s1 = encode_initial(b.graph, m);
    CHECK(s1.h_v.rows == static_cast<int>(b.graph.nodes.size()));
    CHECK(s1.h_v.cols == 8);
    CHECK(s1.h_e.rows == static_cast<int>(b.graph.edges.size()));
    const MpState s2 = encode_initial(b.graph, m);
    CHECK(nn::approx_equal(s1.h_v, s2.h_v, 0.0));
    CHECK(nn::approx_equal(s1.h_e, s2.h_e, 0.0));
}

TEST_CASE("encode_initial on degenerate graphs") {
    Model m = Model::init(tiny_hyper());
    std::vector<std::vector<Detection3D>> empty_frames(2);
    TrackingGraph empty = build_window_graph(empty_frames, {0, 2}, tiny_graph_cfg());
    const MpState s = encode_initial(empty, m);
    CHECK(s.h_v.rows == 0);
    CHECK(s.h_e.rows == 0);

    std::vector<std::vector<Detection3D>> one(2);
    Detection3D d = test::det(0, 0, 0, 0.0);
    one[0].push_back(d);
    TrackingGraph g1 = build_window_graph(one, {0, 2}, tiny_graph_cfg());
    const MpState s1 = encode_initial(g1, m);
    CHECK(s1.h_v.rows == 1);
    CHECK(s1.h_e.rows == 0);
}

TEST_CASE("cross-edge attention equals the per-edge multihead route") {
    // Oracle: run the full attention of the equations edge by edge with the
    // generic multi-head implementation and 1-row Q/K/V.
    Rng rng(7);
    Built b = build_random(rng, 3, 3, 0.6);
    Model m = Model::init(tiny_hyper());
    const Tensor fast = cross_edge_modality_attention(b.graph, m);
    REQUIRE(fast.rows == static_cast<int>(b.graph.edges.size()));

    auto node_embedding = [&](size_t mod, int node) {
        Tensor row(1, 4);
        if (b.graph.modality_present[mod][node]) {
            for (int k = 0; k < 4; ++k) row(0, k) = b.graph.modality_features[mod](node, k);
        } else {
            for (int k = 0; k < 4; ++k) row(0, k) = m.absent_token[mod](0, k);
        }
        return row;
    };
    const Tensor edge_input = model_edge_input(b.graph);
    for (size_t e = 0; e < b.graph.edges.size(); ++e) {
        const int j = b.graph.edges[e].src;
        const int i = b.graph.edges[e].dst;
        std::vector<const Tensor*> parts;
        std::vector<Tensor> keep;
        // Endpoint i attended (queried by j), per modality; then endpoint j.
        for (int endpoint : {i, j}) {
            const int other = endpoint == i ? j : i;
            for (size_t mod = 0; mod < 2; ++mod) {
                const Tensor q = node_embedding(mod, other);
                const Tensor kv = node_embedding(mod, endpoint);
                keep.push_back(nn::multihead_attention(m.mha[mod], q, kv, kv));
            }
        }
        Tensor raw(1, 5);
        for (int k = 0; k < 5; ++k) raw(0, k) = edge_input(static_cast<int>(e), k);
        for (const Tensor& t : keep) parts.push_back(&t);
        parts.push_back(&raw);
        const Tensor want = nn::mlp_forward(m.att_enc, nn::kern::hstack(parts));
        for (int k = 0; k < fast.cols; ++k) {
            CHECK(fast(static_cast<int>(e), k) == doctest::Approx(want(0, k)).epsilon(1e-10));
        }
    }
}

TEST_CASE("attention handles fully absent endpoints") {
    Rng rng(11);
    Built b = build_random(rng, 2, 2, 0.0);  // nothing present
    Model m = Model::init(tiny_hyper());
    const Tensor att = cross_edge_modality_attention(b.graph, m);
    CHECK(att.all_finite());
    // Determinism through the token path.
    const Tensor again = cross_edge_modality_attention(b.graph, m);
    CHECK(nn::approx_equal(att, again, 0.0));
}

TEST_CASE("edge_update and node_update toy properties") {
    Rng rng(13);
    Built b = build_random(rng, 3, 3);
    Model m = Model::init(tiny_hyper());
    MpState s = encode_initial(b.graph, m);
    s.h_e_att = cross_edge_modality_attention(b.graph, m);

    SUBCASE("no-edge graph is a no-op for edge_update") {
        std::vector<std::vector<Detection3D>> lone(2);
        lone[0].push_back(test::det(0, 0, 0, 0.0));
        lone[1].push_back(test::det(30, 30, 1, 0.5, 1));
        TrackingGraph g = build_window_graph(lone, {0, 2}, tiny_graph_cfg());
        REQUIRE(g.edges.size() <= 2);  // different classes: no edges
        Model m2 = Model::init(tiny_hyper());
        MpState st = encode_initial(g, m2);
        st.h_e_att = cross_edge_modality_attention(g, m2);
        edge_update(st, g, m2);
        CHECK(st.h_e.rows == static_cast<int>(g.edges.size()));
    }

    SUBCASE("identical twin edges get identical embeddings") {
        edge_update(s, b.graph, m);
        // Find any two edges sharing src/dst embeddings by construction:
        // duplicate a detection so two nodes are bitwise equal.
        std::vector<std::vector<Detection3D>> frames(2);
        frames[0].push_back(test::det(1, 1, 0, 0.0));
        frames[0].push_back(test::det(1, 1, 0, 0.0));
        frames[1].push_back(test::det(2, 1, 1, 0.5));
        TrackingGraph g = build_window_graph(frames, {0, 2}, tiny_graph_cfg());
        REQUIRE(g.edges.size() == 2);
        Model m2 = Model::init(tiny_hyper());
        MpState st = encode_initial(g, m2);
        st.h_e_att = cross_edge_modality_attention(g, m2);
        edge_update(st, g, m2);
        for (int k = 0; k < st.h_e.cols; ++k) CHECK(st.h_e(0, k) == st.h_e(1, k));
    }

    SUBCASE("isolated node aggregates empty sums") {
        std::vector<std::vector<Detection3D>> frames(2);
        frames[0].push_back(test::det(0, 0, 0, 0.0));
        TrackingGraph g = build_window_graph(frames, {0, 2}, tiny_graph_cfg());
        Model m2 = Model::init(tiny_hyper());
        MpState st = encode_initial(g, m2);
        st.h_e_att = cross_edge_modality_attention(g, m2);
        edge_update(st, g, m2);
        node_update_time_aware(st, g, m2);
        // f_v([0, 0]) is a pure bias-driven value.
        const Tensor zero_in(1, 2 * 8);
        const Tensor want = nn::mlp_forward(m2.node_mlp, zero_in);
        for (int k = 0; k < st.h_v.cols; ++k) CHECK(st.h_v(0, k) == doctest::Approx(want(0, k)));
    }

    SUBCASE("message aggregation is storage-order invariant") {
        edge_update(s, b.graph, m);
        MpState before = s;
        node_update_time_aware(before, b.graph, m);

        // Permute edge storage and recompute the aggregation on a graph copy.
        TrackingGraph permuted = b.graph;
        std::vector<size_t> order(permuted.edges.size());
        for (size_t k = 0; k < order.size(); ++k) order[k] = order.size() - 1 - k;
        TrackingGraph shuffled = permuted;
        for (size_t k = 0; k < order.size(); ++k) {
            shuffled.edges[k] = permuted.edges[order[k]];
            for (int c = 0; c < 5; ++c) {
                shuffled.edge_features(static_cast<int>(k), c) =
                    permuted.edge_features(static_cast<int>(order[k]), c);
            }
        }
        MpState st = encode_initial(shuffled, m);
        st.h_e_att = cross_edge_modality_attention(shuffled, m);
        edge_update(st, shuffled, m);
        node_update_time_aware(st, shuffled, m);
        CHECK(nn::approx_equal(st.h_v, before.h_v, 1e-9));
    }
}

TEST_CASE("framewise gat degenerate and uniform cases") {
    Model m = Model::init(tiny_hyper());

    SUBCASE("node alone in its frame maps to theta * h") {
        std::vector<std::vector<Detection3D>> frames(2);
        frames[0].push_back(test::det(0, 0, 0, 0.0));
        frames[1].push_back(test::det(1, 0, 1, 0.5));
        TrackingGraph g = build_window_graph(frames, {0, 2}, tiny_graph_cfg());
        FrameKnn knn = build_frame_knn(g, frames, 8);
        MpState st = encode_initial(g, m);
        const Tensor before = st.h_v;
        framewise_gat(st, knn, m);
        const Tensor want = nn::kern::matmul(before, m.gat_theta);
        CHECK(nn::approx_equal(st.h_v, want, 1e-12));
    }

    SUBCASE("zero attention vector yields the neighborhood mean of theta * h") {
        Rng rng(17);
        std::vector<std::vector<Detection3D>> frames(1);
        for (int d = 0; d < 4; ++d) {
            frames[0].push_back(test::det(rng.uniform(-5, 5), rng.uniform(-5, 5), 0, 0.0));
        }
        TrackingGraph g = build_window_graph(frames, {0, 1}, tiny_graph_cfg());
        FrameKnn knn = build_frame_knn(g, frames, 8);
        Model m2 = Model::init(tiny_hyper());
        m2.gat_a = Tensor(2 * 8, 1);  // all-zero logits
        MpState st = encode_initial(g, m2);
        const Tensor th = nn::kern::matmul(st.h_v, m2.gat_theta);
        framewise_gat(st, knn, m2);
        for (int j = 0; j < 4; ++j) {
            for (int c = 0; c < 8; ++c) {
                double mean = 0.0;
                for (int u = 0; u < 4; ++u) mean += th(u, c);
                mean /= 4.0;
                CHECK(st.h_v(j, c) == doctest::Approx(mean).epsilon(1e-12));
            }
        }
    }

    SUBCASE("random frame matches a scalar-loop reimplementation") {
        Rng rng(19);
        std::vector<std::vector<Detection3D>> frames(1);
        for (int d = 0; d < 5; ++d) {
            frames[0].push_back(test::det(rng.uniform(-5, 5), rng.uniform(-5, 5), 0, 0.0,
                                          static_cast<int>(rng.uniform_int(0, 1))));
        }
        TrackingGraph g = build_window_graph(frames, {0, 1}, tiny_graph_cfg());
        FrameKnn knn = build_frame_knn(g, frames, 3);
        MpState st = encode_initial(g, m);
        const Tensor h = st.h_v;
        framewise_gat(st, knn, m);

        const int dh = 8;
        for (int j = 0; j < 5; ++j) {
            std::vector<int> members{j};
            for (int u : knn.neighbors[j]) members.push_back(u);
            auto logit = [&](int member) {
                double s = 0.0;
                for (int c = 0; c < dh; ++c) {
                    double wm = 0.0, wc = 0.0;
                    for (int x = 0; x < dh; ++x) {
                        wm += h(member, x) * m.gat_w(x, c);
                        wc += h(j, x) * m.gat_w(x, c);
                    }
                    s += m.gat_a(c, 0) * wm + m.gat_a(dh + c, 0) * wc;
                }
                return s > 0 ? s : 0.2 * s;
            };
            std::vector<double> alpha;
            double mx = -1e300, z = 0.0;
            for (int member : members) mx = std::max(mx, logit(member));
            for (int member : members) {
                alpha.push_back(std::exp(logit(member) - mx));
                z += alpha.back();
            }
            for (double& a : alpha) a /= z;
            for (int c = 0; c < dh; ++c) {
                double want = 0.0;
                for (size_t q = 0; q < members.size(); ++q) {
                    double th = 0.0;
                    for (int x = 0; x < dh; ++x) th += h(members[q], x) * m.gat_theta(x, c);
                    want += alpha[q] * th;
                }
                CHECK(st.h_v(j, c) == doctest::Approx(want).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("classifier outputs and degenerate weights") {
    Rng rng(23);
    Built b = build_random(rng, 3, 3);
    Model m = Model::init(tiny_hyper(0));
    SUBCASE("zero final layer gives 0.5 everywhere") {
        auto& last = m.classifier.layers.back();
        last.w = Tensor(last.w.rows, last.w.cols);
        last.b = Tensor(1, last.w.cols);
        const std::vector<double> scores = forward(b.graph, b.knn, m);
        for (double s : scores) CHECK(s == doctest::Approx(0.5));
    }
    SUBCASE("empty edge set yields empty scores") {
        std::vector<std::vector<Detection3D>> frames(2);
        frames[0].push_back(test::det(0, 0, 0, 0.0));
        TrackingGraph g = build_window_graph(frames, {0, 2}, tiny_graph_cfg());
        FrameKnn knn = build_frame_knn(g, frames, 8);
        CHECK(forward(g, knn, m).empty());
    }
    SUBCASE("scores lie strictly inside (0, 1)") {
        const std::vector<double> scores = forward(b.graph, b.knn, m);
        for (double s : scores) {
            CHECK(s > 0.0);
            CHECK(s < 1.0);
        }
    }
}

TEST_CASE("forward equals composed single-step calls") {
    Rng rng(29);
    Built b = build_random(rng, 4, 3);  // ~12 nodes
    for (int steps : {0, 1, 3}) {
        Model m = Model::init(tiny_hyper(steps));
        const std::vector<double> fast = forward(b.graph, b.knn, m);

        MpState st = encode_initial(b.graph, m);
        st.h_e_att = cross_edge_modality_attention(b.graph, m);
        for (int l = 1; l <= steps; ++l) {
            edge_update(st, b.graph, m);
            node_update_time_aware(st, b.graph, m);
            framewise_gat(st, b.knn, m);
        }
        const std::vector<double> composed = classify_edges(st, m);
        REQUIRE(fast.size() == composed.size());
        for (size_t e = 0; e < fast.size(); ++e) {
            CHECK(fast[e] == doctest::Approx(composed[e]).epsilon(1e-12));
        }
    }
}

TEST_CASE("L=0 forward is encode + classify") {
    Rng rng(31);
    Built b = build_random(rng, 3, 3);
    Model m = Model::init(tiny_hyper(0));
    const std::vector<double> got = forward(b.graph, b.knn, m);
    MpState st = encode_initial(b.graph, m);
    const std::vector<double> want = classify_edges(st, m);
    REQUIRE(got.size() == want.size());
    for (size_t e = 0; e < got.size(); ++e) CHECK(got[e] == doctest::Approx(want[e]));
}

TEST_CASE("forward is permutation invariant as an edge-score map") {
    Rng rng(37);
    Built b = build_random(rng, 4, 3);
    Model m = Model::init(tiny_hyper(3));
    const std::vector<double> base = forward(b.graph, b.knn, m);
    std::map<std::pair<int, int>, double> base_map;
    for (size_t e = 0; e < b.graph.edges.size(); ++e) {
        base_map[{b.graph.nodes[b.graph.edges[e].src].global_id,
                  b.graph.nodes[b.graph.edges[e].dst].global_id}] = base[e];
    }

    // Reverse node storage order and remap everything.
    const int n = static_cast<int>(b.graph.nodes.size());
    std::vector<int> perm(n);
    for (int v = 0; v < n; ++v) perm[v] = n - 1 - v;
    TrackingGraph g2 = b.graph;
    for (int v = 0; v < n; ++v) {
        g2.nodes[perm[v]] = b.graph.nodes[v];
        for (int c = 0; c < b.graph.node_features.cols; ++c) {
            g2.node_features(perm[v], c) = b.graph.node_features(v, c);
        }
        for (size_t mod = 0; mod < b.graph.modality_features.size(); ++mod) {
            for (int c = 0; c < b.graph.modality_features[mod].cols; ++c) {
                g2.modality_features[mod](perm[v], c) = b.graph.modality_features[mod](v, c);
            }
            g2.modality_present[mod][perm[v]] = b.graph.modality_present[mod][v];
        }
        g2.node_scores[perm[v]] = b.graph.node_scores[v];
    }
    for (size_t e = 0; e < g2.edges.size(); ++e) {
        g2.edges[e].src = perm[b.graph.edges[e].src];
        g2.edges[e].dst = perm[b.graph.edges[e].dst];
    }
    FrameKnn knn2;
    knn2.neighbors.resize(n);
    for (int v = 0; v < n; ++v) {
        for (int u : b.knn.neighbors[v]) knn2.neighbors[perm[v]].push_back(perm[u]);
    }
    const std::vector<double> permuted = forward(g2, knn2, m);
    for (size_t e = 0; e < g2.edges.size(); ++e) {
        const auto key = std::make_pair(g2.nodes[g2.edges[e].src].global_id,
                                        g2.nodes[g2.edges[e].dst].global_id);
        CHECK(permuted[e] == doctest::Approx(base_map.at(key)).epsilon(1e-9));
    }
}

TEST_CASE("modality toggling: locality at one step, finiteness at depth") {
    Rng rng(41);
    Built b = build_random(rng, 3, 4, 1.0);  // all present
    // Toggle one node's camera embedding off.
    Built toggled = b;
    const int victim = 0;
    toggled.graph.modality_present[0][victim] = 0;

    Model m1 = Model::init(tiny_hyper(1));
    const std::vector<double> s_base = forward(b.graph, b.knn, m1);
    const std::vector<double> s_tog = forward(toggled.graph, toggled.knn, m1);
    for (size_t e = 0; e < b.graph.edges.size(); ++e) {
        const bool incident =
            b.graph.edges[e].src == victim || b.graph.edges[e].dst == victim;
        if (!incident) CHECK(s_base[e] == s_tog[e]);
    }

    // The attended features of non-incident edges are bitwise unchanged at
    // any depth; deep outputs stay finite.
    Model m6 = Model::init(tiny_hyper(6));
    const Tensor att_base = cross_edge_modality_attention(b.graph, m6);
    const Tensor att_tog = cross_edge_modality_attention(toggled.graph, m6);
    for (size_t e = 0; e < b.graph.edges.size(); ++e) {
        const bool incident =
            b.graph.edges[e].src == victim || b.graph.edges[e].dst == victim;
        if (incident) continue;
        for (int c = 0; c < att_base.cols; ++c) {
            CHECK(att_base(static_cast<int>(e), c) == att_tog(static_cast<int>(e), c));
        }
    }
    for (double s : forward(toggled.graph, toggled.knn, m6)) CHECK(std::isfinite(s));
}

TEST_CASE("class-balanced loss closed form") {
    CHECK(class_balanced_weight(0.8, 1.0) == doctest::Approx(1.0));
    CHECK(class_balanced_weight(0.5, 1.0) == doctest::Approx(1.0));
    CHECK(class_balanced_weight(0.8, 2.0) == doctest::Approx(0.2 / 0.36));

    // Empty edge set: defined as zero.
    CHECK(class_balanced_loss({}, {}, {}, 0.8) == 0.0);

    // Perfect scores: clamped logs keep the loss near zero.
    const double loss = class_balanced_loss({1.0, 0.0}, {1, 0}, {1.0, 1.0}, 0.8);
    CHECK(loss == doctest::Approx(0.0));

    // Direct evaluation of one weighted BCE term.
    const double p = 0.7;
    const double expect = -(0.2 / 0.36) * std::log(p);
    CHECK(class_balanced_loss({p}, {1}, {2.0}, 0.8) == doctest::Approx(expect));
}

TEST_CASE("full forward + loss gradient matches finite differences") {
    // Randomized small graphs, every parameter tensor spot-checked.
    int graphs_checked = 0;
    for (uint64_t seed = 100; seed < 108; ++seed) {
        Rng rng(seed);
        Built b = build_random(rng, 3, 3, 0.6);  // <= 9 nodes
        if (b.graph.edges.empty()) continue;
        ModelHyper hyper = tiny_hyper(2);
        hyper.init_seed = seed;
        Model m = Model::init(hyper);
        const std::vector<int8_t> labels = random_labels(b.graph, rng);
        std::vector<double> counts(b.graph.edges.size());
        for (size_t e = 0; e < counts.size(); ++e) counts[e] = 2.0 + (e % 3);

        nn::Tape tape;
        nn::Var scores = forward_taped(tape, b.graph, b.knn, m);
        nn::Var loss = class_balanced_loss(tape, scores, labels, counts, 0.8);
        tape.backward(loss);
        auto grads = tape.param_grads();
        auto f = [&]() {
            nn::Tape t(false);
            nn::Var s = forward_taped(t, b.graph, b.knn, m);
            nn::Var l = class_balanced_loss(t, s, labels, counts, 0.8);
            return t.val(l)(0, 0);
        };
        // Step 1e-6 keeps near-zero ReLU preactivations out of the probed
        // neighborhood; the sub-atol skip absorbs the extra roundoff.
        const nn::FdReport rep =
            nn::finite_difference_check(f, m.param_refs(), grads, 1e-6, 10, seed);
        CAPTURE(seed);
        CAPTURE(rep.worst_param);
        CHECK(rep.max_rel_err < 1e-4);
        ++graphs_checked;
    }
    CHECK(graphs_checked >= 6);
}

TEST_CASE("train_toy basic contracts") {
    Rng rng(51);
    std::vector<TrainWindow> windows;
    for (int w = 0; w < 3; ++w) {
        Built b = build_random(rng, 3, 3);
        TrainWindow tw;
        tw.graph = b.graph;
        tw.knn = b.knn;
        tw.graph.edge_labels = random_labels(tw.graph, rng);
        windows.push_back(std::move(tw));
    }
    std::map<int, double> counts{{0, 10.0}, {1, 6.0}};

    SUBCASE("lr = 0 leaves parameters unchanged with a flat trace") {
        Model m = Model::init(tiny_hyper(1));
        Model m0 = Model::init(tiny_hyper(1));
        TrainOptions opts;
        opts.epochs = 3;
        opts.lr = 0.0;
        const TrainTrace trace = train_toy(m, windows, counts, opts);
        REQUIRE(trace.epoch_mean_loss.size() == 3);
        CHECK(trace.epoch_mean_loss[0] == doctest::Approx(trace.epoch_mean_loss[2]));
        auto refs = m.param_refs();
        auto refs0 = m0.param_refs();
        for (size_t k = 0; k < refs.size(); ++k) {
            CHECK(nn::approx_equal(*refs[k].second, *refs0[k].second, 0.0));
        }
    }
    SUBCASE("same seed twice gives identical traces") {
        Model a = Model::init(tiny_hyper(1));
        Model b2 = Model::init(tiny_hyper(1));
        TrainOptions opts;
        opts.epochs = 3;
        opts.lr = 1e-3;
        const TrainTrace ta = train_toy(a, windows, counts, opts);
        const TrainTrace tb = train_toy(b2, windows, counts, opts);
        CHECK(ta.epoch_mean_loss == tb.epoch_mean_loss);
    }
    SUBCASE("separable toy problem reduces the loss over 200+ steps") {
        Model m = Model::init(tiny_hyper(2));
        TrainOptions opts;
        opts.epochs = 70;  // 3 windows per epoch
        opts.lr = 5e-3;
        const TrainTrace trace = train_toy(m, windows, counts, opts);
        CHECK(trace.epoch_mean_loss.back() < trace.epoch_mean_loss.front());
    }
    SUBCASE("empty dataset is rejected") {
        Model m = Model::init(tiny_hyper(1));
        CHECK_THROWS_AS(train_toy(m, {}, counts, TrainOptions{}), std::invalid_argument);
    }
}

TEST_CASE("stacked-modality ablation model runs end to end") {
    Rng rng(61);
    Built b = build_random(rng, 3, 3);
    Model m = Model::init(tiny_hyper(2, false));
    const std::vector<double> scores = forward(b.graph, b.knn, m);
    CHECK(scores.size() == b.graph.edges.size());
    for (double s : scores) {
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}
