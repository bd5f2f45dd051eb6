// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include <benchmark/benchmark.h>

#include <cmath>

#include "gmot/cluster.hpp"
#include "gmot/geometry.hpp"
#include "gmot/graph_build.hpp"
#include "gmot/metrics.hpp"
#include "gmot/model.hpp"
#include "gmot/rng.hpp"
#include "gmot/synth.hpp"

using namespace gmot;

namespace {

Box3D random_box(Rng& rng) {
    Box3D b;
    b.x = rng.uniform(-5, 5);
    b.y = rng.uniform(-5, 5);
    b.w = rng.uniform(0.5, 4);
    b.l = rng.uniform(0.5, 6);
    b.h = 1.5;
    b.yaw = rng.uniform(-M_PI, M_PI);
    return b;
}

void BM_BevIou(benchmark::State& state) {
    Rng rng(1);
    std::vector<std::pair<Box3D, Box3D>> pairs;
    for (int i = 0; i < 1024; ++i) pairs.emplace_back(random_box(rng), random_box(rng));
    size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bev_iou(pairs[k & 1023].first, pairs[k & 1023].second));
        ++k;
    }
}
BENCHMARK(BM_BevIou);

void BM_MatMul(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(2);
    nn::Tensor a(n, n), b(n, n);
    for (double& v : a.data) v = rng.normal();
    for (double& v : b.data) v = rng.normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(nn::kern::matmul(a, b));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * n * n);
}
BENCHMARK(BM_MatMul)->Arg(32)->Arg(64)->Arg(128);

void BM_Hungarian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(3);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
        for (double& c : row) c = rng.uniform(0, 100);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hungarian_assign(cost));
    }
}
BENCHMARK(BM_Hungarian)->Arg(10)->Arg(30);

struct WindowFixture {
    Scene scene;
    TrackingGraph graph;
    FrameKnn knn;
    Model model;

    WindowFixture() : model(Model::init(hyper())) {
        SceneConfig cfg = SceneConfig::defaults_3class();
        cfg.seed = 4;
        cfg.frames = 5;
        cfg.objects_min = cfg.objects_max = 8;
        cfg.fp_rate = 2.0;
        cfg.modalities = {{"camera", 8, 0.9, 0.4, 0.1}, {"lidar", 8, 0.9, 0.4, 0.1}};
        scene = generate_scene(cfg, "bench");
        GraphBuildConfig gc;
        gc.class_count = 3;
        gc.k_past = 12;
        gc.k_frame = 8;
        gc.modality_tags = {"camera", "lidar"};
        gc.modality_dims = {8, 8};
        graph = build_window_graph(scene.det_frames, {0, 5}, gc);
        knn = build_frame_knn(graph, scene.det_frames, 8);
    }
    static ModelHyper hyper() {
        ModelHyper h;
        h.class_count = 3;
        h.hidden_width = 32;
        h.mp_steps = 6;
        h.attn_heads = 2;
        h.modalities = {{"camera", 8}, {"lidar", 8}};
        return h;
    }
};

void BM_WindowForward(benchmark::State& state) {
    static WindowFixture fx;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(fx.graph, fx.knn, fx.model));
    }
    state.counters["nodes"] = static_cast<double>(fx.graph.nodes.size());
    state.counters["edges"] = static_cast<double>(fx.graph.edges.size());
}
BENCHMARK(BM_WindowForward);

void BM_WindowTrainStep(benchmark::State& state) {
    static WindowFixture fx;
    std::vector<int8_t> labels(fx.graph.edges.size(), 0);
    for (size_t e = 0; e < labels.size(); e += 7) labels[e] = 1;
    std::vector<double> counts(fx.graph.edges.size(), 50.0);
    for (auto _ : state) {
        nn::Tape tape;
        nn::Var loss =
            class_balanced_loss(tape, forward_taped(tape, fx.graph, fx.knn, fx.model), labels,
                                counts, 0.8);
        tape.backward(loss);
        benchmark::DoNotOptimize(tape.param_grads());
    }
}
BENCHMARK(BM_WindowTrainStep);

void BM_Agglomerate(benchmark::State& state) {
    Rng rng(5);
    const int n = 2000;
    std::map<int, ClusterNodeInfo> nodes;
    for (int v = 0; v < n; ++v) nodes[v] = {static_cast<int>(rng.uniform_int(0, 39))};
    ScoredEdgeSet s;
    for (int e = 0; e < 10000; ++e) {
        int a = static_cast<int>(rng.uniform_int(0, n - 1));
        int b = static_cast<int>(rng.uniform_int(0, n - 1));
        if (nodes[a].frame == nodes[b].frame) continue;
        if (nodes[a].frame > nodes[b].frame) std::swap(a, b);
        s.edges.push_back({a, b, rng.uniform(0, 1), 1});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(agglomerate(s, nodes, 0.1, 0.5));
    }
    state.counters["edges"] = static_cast<double>(s.edges.size());
}
BENCHMARK(BM_Agglomerate);

}  // namespace

BENCHMARK_MAIN();
