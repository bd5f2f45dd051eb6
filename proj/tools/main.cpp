// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
//
// gmot: offline 3D multi-object tracking over graph windows.
//   synth        generate synthetic scenes
//   build-graphs summarize window graphs for a scene file
//   train-toy    train the edge classifier on labeled scenes
//   infer        score window edges with trained weights
//   cluster      turn scored edges into trajectories
//   postprocess  refine trajectories
//   eval         CLEAR-MOT / AMOTA evaluation against GT records
//   entropy      per-scene confidence report from scored edges
//   pipeline     end-to-end: scenes + weights -> tracks, metrics, entropy

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmot/confidence.hpp"
#include "gmot/config.hpp"
#include "gmot/errors.hpp"
#include "gmot/io.hpp"
#include "gmot/metrics.hpp"
#include "gmot/model.hpp"
#include "gmot/pipeline.hpp"
#include "gmot/postprocess.hpp"
#include "gmot/synth.hpp"

namespace fs = std::filesystem;
using namespace gmot;

namespace {

// Config-key overrides shared by most subcommands. Precedence:
// CLI flag > --config file (or GMOT_CONFIG) > built-in default.
struct ConfigCli {
    std::string config_path;
    std::optional<int> window_len, stride, k_past, k_frame, class_count, hidden_width, mp_steps,
        attn_heads, sweep_points, threads;
    std::optional<double> beta, gt_radius, gt_iou_min, theta_min, theta_join, singleton_min_score,
        metric_gate;
    std::optional<uint64_t> seed;
    std::optional<bool> cross_attention;
    std::optional<std::string> entropy_direction;
    std::vector<std::string> modalities;  // tag:dim

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file (default: $GMOT_CONFIG)");
        app->add_option("--window-len", window_len, "sliding window length in frames");
        app->add_option("--stride", stride, "sliding window stride");
        app->add_option("--k-past", k_past, "past neighbors per node");
        app->add_option("--k-frame", k_frame, "same-frame neighbors per node");
        app->add_option("--class-count", class_count, "number of object classes");
        app->add_option("--hidden-width", hidden_width, "embedding width");
        app->add_option("--mp-steps", mp_steps, "message passing depth");
        app->add_option("--heads", attn_heads, "attention heads per modality");
        app->add_option("--beta", beta, "class-balanced loss beta");
        app->add_option("--gt-radius", gt_radius, "GT matching radius, meters");
        app->add_option("--gt-iou-min", gt_iou_min, "GT matching minimum footprint IoU");
        app->add_option("--theta-min", theta_min, "clustering score floor");
        app->add_option("--theta-join", theta_join, "cluster join threshold");
        app->add_option("--singleton-min-score", singleton_min_score,
                        "detection score gate for singleton tracks");
        app->add_option("--metric-gate", metric_gate, "evaluation match gate, meters");
        app->add_option("--sweep-points", sweep_points, "recall sweep resolution");
        app->add_option("--threads", threads, "scene-level worker threads");
        app->add_option("--seed", seed, "seed for weight init and generators");
        app->add_option("--cross-attention", cross_attention,
                        "enable cross-edge modality attention (false stacks modalities)");
        app->add_option("--entropy-direction", entropy_direction,
                        "scene filter side: above-mean or below-mean");
        app->add_option("--modality", modalities,
                        "modality spec tag:dim (repeatable, overrides config)");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnvVar)) path = env;
        }
        if (!path.empty()) cfg = PipelineConfig::load(path);
        auto set = [](auto& dst, const auto& src) {
            if (src) dst = *src;
        };
        set(cfg.window_len, window_len);
        set(cfg.stride, stride);
        set(cfg.k_past, k_past);
        set(cfg.k_frame, k_frame);
        set(cfg.class_count, class_count);
        set(cfg.hidden_width, hidden_width);
        set(cfg.mp_steps, mp_steps);
        set(cfg.attn_heads, attn_heads);
        set(cfg.beta, beta);
        set(cfg.gt_radius, gt_radius);
        set(cfg.gt_iou_min, gt_iou_min);
        set(cfg.theta_min, theta_min);
        set(cfg.theta_join, theta_join);
        set(cfg.singleton_min_score, singleton_min_score);
        set(cfg.metric_gate, metric_gate);
        set(cfg.sweep_points, sweep_points);
        set(cfg.threads, threads);
        set(cfg.seed, seed);
        set(cfg.cross_attention, cross_attention);
        set(cfg.entropy_direction, entropy_direction);
        if (!modalities.empty()) {
            cfg.modalities.clear();
            for (const std::string& spec : modalities) {
                const auto colon = spec.find(':');
                if (colon != std::string::npos) {
                    cfg.modalities.push_back(
                        {spec.substr(0, colon), std::stoi(spec.substr(colon + 1))});
                    continue;
                }
                // Bare tags use the conventional embedding widths.
                if (spec == "lidar") cfg.modalities.push_back({spec, 128});
                else if (spec == "camera" || spec == "radar") cfg.modalities.push_back({spec, 64});
                else throw ConfigError("--modality expects tag:dim, got '" + spec + "'");
            }
        }
        cfg.validate();
        return cfg;
    }
};

void check_model_matches_config(const Model& model, const PipelineConfig& cfg) {
    const ModelHyper& h = model.hyper;
    auto fail = [](const std::string& what) {
        throw ConfigError("weights/config mismatch: " + what);
    };
    if (h.class_count != cfg.class_count) fail("class_count");
    if (h.mp_steps != cfg.mp_steps) fail("mp_steps");
    if (h.hidden_width != cfg.hidden_width) fail("hidden_width");
    if (h.attn_heads != cfg.attn_heads) fail("attn_heads");
    if (h.cross_attention != cfg.cross_attention) fail("cross_attention");
    if (h.modalities.size() != cfg.modalities.size()) fail("modality set");
    for (size_t m = 0; m < h.modalities.size(); ++m) {
        if (h.modalities[m].tag != cfg.modalities[m].tag ||
            h.modalities[m].dim != cfg.modalities[m].dim) {
            fail("modality '" + h.modalities[m].tag + "'");
        }
    }
}

struct SynthCli {
    int scenes = 5, frames = 40, objects_min = 4, objects_max = 8;
    double fp_rate = 1.0, p_fn = 0.1;
    double extent = 50.0, center_sigma = 0.25, yaw_sigma = 0.05, vel_sigma = 0.2;
    double p_yaw_flip = 0.05, p_converge = 0.0;
    std::string prefix = "scene";

    void attach(CLI::App* app) {
        app->add_option("--scenes", scenes, "number of scenes");
        app->add_option("--frames", frames, "frames per scene");
        app->add_option("--fp-rate", fp_rate, "clutter detections per frame");
        app->add_option("--p-fn", p_fn, "miss probability");
        app->add_option("--objects-min", objects_min, "minimum objects per scene");
        app->add_option("--objects-max", objects_max, "maximum objects per scene");
        app->add_option("--extent", extent, "scene half-width, meters");
        app->add_option("--center-sigma", center_sigma, "center noise sigma, meters");
        app->add_option("--yaw-sigma", yaw_sigma, "yaw noise sigma, radians");
        app->add_option("--vel-sigma", vel_sigma, "velocity noise sigma, m/s");
        app->add_option("--p-yaw-flip", p_yaw_flip, "probability of a +-pi yaw flip");
        app->add_option("--p-converge", p_converge, "fraction of objects aimed at the center");
        app->add_option("--prefix", prefix, "scene id prefix");
    }

    SceneConfig resolve(const PipelineConfig& cfg) const {
        SceneConfig sc = SceneConfig::defaults_3class();
        sc.seed = cfg.seed;
        sc.frames = frames;
        sc.fp_rate = fp_rate;
        sc.p_fn = p_fn;
        sc.objects_min = objects_min;
        sc.objects_max = objects_max;
        sc.extent = extent;
        sc.center_sigma = center_sigma;
        sc.yaw_sigma = yaw_sigma;
        sc.vel_sigma = vel_sigma;
        sc.p_yaw_flip = p_yaw_flip;
        sc.p_converge = p_converge;
        sc.modalities.clear();
        for (const ModalitySpec& m : cfg.modalities) {
            sc.modalities.push_back(ModalityConfig::standard(m.tag, m.dim));
        }
        return sc;
    }
};

int run_synth(const ConfigCli& cc, const SynthCli& sc_cli, const std::string& out) {
    const PipelineConfig cfg = cc.resolve();
    const SceneConfig sc = sc_cli.resolve(cfg);
    io::save_scenes(out, generate_scenes(sc, sc_cli.scenes, sc_cli.prefix));
    std::cout << "wrote " << sc_cli.scenes << " scene(s) to " << out << "\n";
    return 0;
}

int run_build_graphs(const ConfigCli& cc, const std::string& scenes_path, const std::string& out,
                     bool with_labels) {
    const PipelineConfig cfg = cc.resolve();
    std::vector<Scene> scenes = io::load_scenes(scenes_path);
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write '" + out + "'");
    for (Scene& scene : scenes) {
        if (with_labels) {
            match_detections_to_gt(scene.det_frames, scene.gt_tracks, cfg.gt_radius,
                                   cfg.gt_iou_min);
        }
        for (const WindowSpec& w :
             sliding_windows(scene.frame_count, cfg.window_len, cfg.stride)) {
            TrackingGraph g = build_window_graph(scene.det_frames, w, cfg.graph_config());
            long positives = -1;
            if (with_labels) {
                label_edges(g, scene.det_frames);
                positives = 0;
                for (int8_t l : g.edge_labels) positives += (l == 1);
            }
            nlohmann::json j{{"scene", scene.id},
                             {"window_start", w.first_frame},
                             {"nodes", g.nodes.size()},
                             {"edges", g.edges.size()}};
            if (positives >= 0) j["positive_edges"] = positives;
            os << j.dump() << "\n";
        }
    }
    return 0;
}

int run_train_toy(const ConfigCli& cc, const std::string& train_path, const std::string& val_path,
                  const std::string& weights_out, const std::string& trace_out, int epochs,
                  double lr, double momentum) {
    const PipelineConfig cfg = cc.resolve();
    std::vector<Scene> train_scenes = io::load_scenes(train_path);
    if (train_scenes.empty()) throw ConfigError("train-toy: no scenes in '" + train_path + "'");
    const LabeledDataset dataset = build_labeled_dataset(train_scenes, cfg);

    Model model = Model::init(cfg.model_hyper());
    TrainOptions opts;
    opts.epochs = epochs;
    opts.lr = lr;
    opts.momentum = momentum;
    opts.beta = cfg.beta;
    opts.shuffle_seed = cfg.seed;
    const TrainTrace trace = train_toy(model, dataset.windows, dataset.class_counts, opts);
    io::save_model(weights_out, model);
    std::cout << "trained " << epochs << " epoch(s); final mean loss "
              << trace.epoch_mean_loss.back() << "\n";

    if (!trace_out.empty()) {
        std::ofstream os(trace_out);
        for (size_t e = 0; e < trace.epoch_mean_loss.size(); ++e) {
            os << nlohmann::json{{"epoch", e}, {"mean_loss", trace.epoch_mean_loss[e]}}.dump()
               << "\n";
        }
    }
    if (!val_path.empty()) {
        std::vector<Scene> val_scenes = io::load_scenes(val_path);
        const LabeledDataset val = build_labeled_dataset(val_scenes, cfg);
        const EdgeEvaluation ev = score_labeled_windows(val, model);
        std::cout << "validation edge AP " << binary_average_precision(ev.scores, ev.labels)
                  << " over " << ev.scores.size() << " edges\n";
    }
    return 0;
}

int run_infer(const ConfigCli& cc, const std::string& scenes_path, const std::string& weights,
              const std::string& out) {
    const PipelineConfig cfg = cc.resolve();
    Model model = io::load_model(weights);
    check_model_matches_config(model, cfg);
    const std::vector<Scene> scenes = io::load_scenes(scenes_path);
    std::vector<io::WindowScores> rows;
    for (const Scene& scene : scenes) {
        const SceneGraphs graphs = build_scene_graphs(scene, cfg);
        for (io::WindowScores& w : infer_scene(scene, graphs, model, scene.id)) {
            rows.push_back(std::move(w));
        }
    }
    io::save_scored_edges(out, rows);
    std::cout << "scored " << rows.size() << " window(s) to " << out << "\n";
    return 0;
}

int run_cluster(const ConfigCli& cc, const std::string& scenes_path, const std::string& scored,
                const std::string& out) {
    const PipelineConfig cfg = cc.resolve();
    const std::vector<Scene> scenes = io::load_scenes(scenes_path);
    const std::vector<io::WindowScores> rows = io::load_scored_edges(scored);
    std::map<std::string, TrajectorySet> tracks;
    for (const Scene& scene : scenes) {
        std::vector<io::WindowScores> mine;
        for (const io::WindowScores& w : rows) {
            if (w.scene == scene.id) mine.push_back(w);
        }
        tracks[scene.id] = cluster_scene(scene, mine, cfg);
    }
    io::save_trajectories(out, tracks);
    return 0;
}

int run_postprocess(const ConfigCli& cc, const std::string& tracks_path, const std::string& out) {
    const PipelineConfig cfg = cc.resolve();
    std::map<std::string, TrajectorySet> tracks = io::load_trajectories(tracks_path);
    for (auto& [scene, ts] : tracks) ts = postprocess(ts, cfg.postproc);
    io::save_trajectories(out, tracks);
    return 0;
}

int run_eval(const ConfigCli& cc, const std::string& tracks_path, const std::string& scenes_path,
             const std::string& report_out) {
    const PipelineConfig cfg = cc.resolve();
    const std::vector<Scene> scenes = io::load_scenes(scenes_path);
    const std::map<std::string, TrajectorySet> tracks = io::load_trajectories(tracks_path);
    static const TrajectorySet kEmpty;
    std::vector<ScenePair> pairs;
    for (const Scene& s : scenes) {
        auto it = tracks.find(s.id);
        pairs.push_back({it != tracks.end() ? &it->second : &kEmpty, &s.gt_tracks});
    }
    MatchGate gate;
    gate.max_dist = cfg.metric_gate;
    const MetricsReport report = evaluate_tracking(pairs, gate, cfg.sweep_points);
    std::cout << io::metrics_report_table(report);
    if (!report_out.empty()) io::save_metrics_report(report_out, report);
    return 0;
}

int run_entropy(const ConfigCli& cc, const std::string& scored, const std::string& out) {
    const PipelineConfig cfg = cc.resolve();
    const std::vector<io::WindowScores> rows = io::load_scored_edges(scored);
    std::map<std::string, std::vector<double>> batches;
    for (const io::WindowScores& w : rows) {
        std::vector<double> scores;
        scores.reserve(w.edges.size());
        for (const ScoredEdge& e : w.edges) scores.push_back(e.score);
        batches[w.scene].push_back(batch_entropy(scores));
    }
    io::EntropyReport report;
    for (const auto& [scene, hs] : batches) report.scene_entropy[scene] = scene_entropy(hs);
    double mean = 0.0;
    for (const auto& [scene, h] : report.scene_entropy) mean += h;
    report.mean = report.scene_entropy.empty() ? 0.0 : mean / report.scene_entropy.size();
    report.direction = cfg.entropy_direction;
    if (!report.scene_entropy.empty()) {
        const EntropyFilter dir = cfg.entropy_direction == "below-mean" ? EntropyFilter::BelowMean
                                                                        : EntropyFilter::AboveMean;
        for (const std::string& id : filter_scenes(report.scene_entropy, dir)) {
            report.kept.push_back(id);
        }
    }
    if (!out.empty()) {
        io::save_entropy_report(out, report);
    } else {
        std::cout << io::entropy_report_to_json(report) << "\n";
    }
    return 0;
}

int run_pipeline_cmd(const ConfigCli& cc, const std::string& scenes_path,
                     const std::string& weights, const std::string& out_dir) {
    const PipelineConfig cfg = cc.resolve();
    Model model = io::load_model(weights);
    check_model_matches_config(model, cfg);
    const std::vector<Scene> scenes = io::load_scenes(scenes_path);
    const PipelineResult result = run_pipeline(scenes, model, cfg);

    fs::create_directories(out_dir);
    io::save_trajectories(fs::path(out_dir) / "tracks.jsonl", result.tracks);
    io::save_scored_edges(fs::path(out_dir) / "scored_edges.jsonl", result.window_scores);
    io::save_entropy_report(fs::path(out_dir) / "entropy.json", result.entropy);
    if (result.metrics) {
        io::save_metrics_report(fs::path(out_dir) / "metrics.json", *result.metrics);
        std::cout << io::metrics_report_table(*result.metrics);
    }
    std::cout << "pipeline outputs in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graphmot: offline 3D multi-object tracking"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate synthetic scenes");
    ConfigCli synth_cc;
    synth_cc.attach(synth);
    SynthCli synth_cli;
    synth_cli.attach(synth);
    std::string synth_out = "scenes.jsonl";
    synth->add_option("--out", synth_out, "output scene file")->required();

    auto* bg = app.add_subcommand("build-graphs", "summarize window graphs");
    ConfigCli bg_cc;
    bg_cc.attach(bg);
    std::string bg_scenes, bg_out = "graphs.jsonl";
    bool bg_labels = false;
    bg->add_option("--scenes", bg_scenes, "scene file")->required();
    bg->add_option("--out", bg_out, "graph summary output");
    bg->add_flag("--with-labels", bg_labels, "run GT matching and edge labeling");

    auto* tt = app.add_subcommand("train-toy", "train the edge classifier");
    ConfigCli tt_cc;
    tt_cc.attach(tt);
    std::string tt_train, tt_val, tt_weights = "weights.gmw", tt_trace;
    int tt_epochs = 8;
    double tt_lr = 1e-4, tt_momentum = 0.9;
    tt->add_option("--train", tt_train, "training scene file")->required();
    tt->add_option("--val", tt_val, "validation scene file (reports edge AP)");
    tt->add_option("--weights-out", tt_weights, "weights output path");
    tt->add_option("--loss-out", tt_trace, "per-epoch loss trace (JSON lines)");
    tt->add_option("--epochs", tt_epochs, "training epochs");
    tt->add_option("--lr", tt_lr, "learning rate");
    tt->add_option("--momentum", tt_momentum, "SGD momentum");

    auto* inf = app.add_subcommand("infer", "score window edges");
    ConfigCli inf_cc;
    inf_cc.attach(inf);
    std::string inf_scenes, inf_weights, inf_out = "scored_edges.jsonl";
    inf->add_option("--scenes", inf_scenes, "scene file")->required();
    inf->add_option("--weights", inf_weights, "weights file")->required();
    inf->add_option("--out", inf_out, "scored edge output");

    auto* cl = app.add_subcommand("cluster", "cluster scored edges into tracks");
    ConfigCli cl_cc;
    cl_cc.attach(cl);
    std::string cl_scenes, cl_scored, cl_out = "tracks.jsonl";
    cl->add_option("--scenes", cl_scenes, "scene file")->required();
    cl->add_option("--scored", cl_scored, "scored edge file")->required();
    cl->add_option("--out", cl_out, "trajectory output");

    auto* pp = app.add_subcommand("postprocess", "refine trajectories");
    ConfigCli pp_cc;
    pp_cc.attach(pp);
    std::string pp_tracks, pp_out = "tracks_refined.jsonl";
    pp->add_option("--tracks", pp_tracks, "trajectory file")->required();
    pp->add_option("--out", pp_out, "refined trajectory output");

    auto* ev = app.add_subcommand("eval", "evaluate tracks against GT");
    ConfigCli ev_cc;
    ev_cc.attach(ev);
    std::string ev_tracks, ev_scenes, ev_report;
    ev->add_option("--tracks", ev_tracks, "trajectory file")->required();
    ev->add_option("--scenes", ev_scenes, "scene file with GT records")->required();
    ev->add_option("--report", ev_report, "metrics report output (JSON)");

    auto* en = app.add_subcommand("entropy", "per-scene confidence report");
    ConfigCli en_cc;
    en_cc.attach(en);
    std::string en_scored, en_out;
    en->add_option("--scored", en_scored, "scored edge file")->required();
    en->add_option("--out", en_out, "entropy report output (JSON)");

    auto* pl = app.add_subcommand("pipeline", "full pipeline: scenes + weights -> artifacts");
    ConfigCli pl_cc;
    pl_cc.attach(pl);
    std::string pl_scenes, pl_weights, pl_out = "out";
    pl->add_option("--scenes", pl_scenes, "scene file")->required();
    pl->add_option("--weights", pl_weights, "weights file")->required();
    pl->add_option("--out-dir", pl_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return run_synth(synth_cc, synth_cli, synth_out);
        if (*bg) return run_build_graphs(bg_cc, bg_scenes, bg_out, bg_labels);
        if (*tt) {
            return run_train_toy(tt_cc, tt_train, tt_val, tt_weights, tt_trace, tt_epochs, tt_lr,
                                 tt_momentum);
        }
        if (*inf) return run_infer(inf_cc, inf_scenes, inf_weights, inf_out);
        if (*cl) return run_cluster(cl_cc, cl_scenes, cl_scored, cl_out);
        if (*pp) return run_postprocess(pp_cc, pp_tracks, pp_out);
        if (*ev) return run_eval(ev_cc, ev_tracks, ev_scenes, ev_report);
        if (*en) return run_entropy(en_cc, en_scored, en_out);
        if (*pl) return run_pipeline_cmd(pl_cc, pl_scenes, pl_weights, pl_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
