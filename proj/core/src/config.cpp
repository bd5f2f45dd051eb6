// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/config.hpp"

#include <fstream>

#include <json.hpp>

#include "gmot/errors.hpp"

namespace gmot {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (window_len < 2) throw ConfigError("config: window_len must be >= 2");
    if (stride < 1) throw ConfigError("config: stride must be >= 1");
    if (k_past < 1 || k_frame < 0) throw ConfigError("config: invalid neighbor counts");
    if (class_count < 1) throw ConfigError("config: class_count must be >= 1");
    if (hidden_width < 2) throw ConfigError("config: hidden_width must be >= 2");
    if (mp_steps < 0) throw ConfigError("config: mp_steps must be >= 0");
    if (attn_heads < 1) throw ConfigError("config: attn_heads must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("config: beta must lie in (0, 1)");
    if (gt_radius <= 0.0 || metric_gate <= 0.0) {
        throw ConfigError("config: gates must be positive");
    }
    if (gt_iou_min < 0.0 || gt_iou_min > 1.0) throw ConfigError("config: gt_iou_min outside [0, 1]");
    if (theta_min < 0.0 || theta_min > 1.0 || theta_join < 0.0 || theta_join > 1.0) {
        throw ConfigError("config: clustering thresholds outside [0, 1]");
    }
    if (singleton_min_score < 0.0 || singleton_min_score > 1.0) {
        throw ConfigError("config: singleton_min_score outside [0, 1]");
    }
    if (sweep_points < 1) throw ConfigError("config: sweep_points must be >= 1");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (entropy_direction != "above-mean" && entropy_direction != "below-mean") {
        throw ConfigError("config: entropy_direction must be above-mean or below-mean");
    }
    for (const ModalitySpec& m : modalities) {
        if (m.dim < 1 || m.dim % attn_heads != 0) {
            throw ConfigError("config: modality '" + m.tag +
                              "' dim must be positive and divisible by attn_heads");
        }
    }
}

ModelHyper PipelineConfig::model_hyper() const {
    ModelHyper h;
    h.class_count = class_count;
    h.hidden_width = hidden_width;
    h.mp_steps = mp_steps;
    h.attn_heads = attn_heads;
    h.modalities = modalities;
    h.cross_attention = cross_attention;
    h.init_seed = seed;
    return h;
}

GraphBuildConfig PipelineConfig::graph_config() const {
    GraphBuildConfig g;
    g.class_count = class_count;
    g.k_past = k_past;
    g.k_frame = k_frame;
    for (const ModalitySpec& m : modalities) {
        g.modality_tags.push_back(m.tag);
        g.modality_dims.push_back(m.dim);
    }
    return g;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path.string() + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: bad JSON in '" + path.string() + "': " + e.what());
    }
    PipelineConfig c;
    auto get = [&j](const char* key, auto& out) {
        if (j.contains(key)) out = j.at(key).template get<std::decay_t<decltype(out)>>();
    };
    get("window_len", c.window_len);
    get("stride", c.stride);
    get("k_past", c.k_past);
    get("k_frame", c.k_frame);
    get("class_count", c.class_count);
    get("hidden_width", c.hidden_width);
    get("mp_steps", c.mp_steps);
    get("attn_heads", c.attn_heads);
    get("cross_attention", c.cross_attention);
    get("beta", c.beta);
    get("gt_radius", c.gt_radius);
    get("gt_iou_min", c.gt_iou_min);
    get("theta_min", c.theta_min);
    get("theta_join", c.theta_join);
    get("singleton_min_score", c.singleton_min_score);
    get("metric_gate", c.metric_gate);
    get("sweep_points", c.sweep_points);
    get("entropy_direction", c.entropy_direction);
    get("seed", c.seed);
    get("threads", c.threads);
    if (j.contains("modalities")) {
        c.modalities.clear();
        for (const auto& m : j.at("modalities")) {
            c.modalities.push_back({m.at("tag"), m.at("dim")});
        }
    }
    if (j.contains("postproc")) {
        const auto& p = j.at("postproc");
        auto getp = [&p](const char* key, auto& out) {
            if (p.contains(key)) out = p.at(key).template get<std::decay_t<decltype(out)>>();
        };
        getp("interpolate", c.postproc.interpolate);
        getp("fix_yaw_flips", c.postproc.fix_yaw_flips);
        getp("join_still", c.postproc.join_still);
        getp("smooth", c.postproc.smooth);
        getp("still_iou_min", c.postproc.still_iou_min);
        getp("join_iou_min", c.postproc.join_iou_min);
        getp("smooth_window", c.postproc.smooth_window);
        getp("smooth_weights", c.postproc.smooth_weights);
    }
    c.validate();
    return c;
}

void PipelineConfig::save(const std::filesystem::path& path) const {
    json mods = json::array();
    for (const ModalitySpec& m : modalities) mods.push_back({{"tag", m.tag}, {"dim", m.dim}});
    json j{{"window_len", window_len},
           {"stride", stride},
           {"k_past", k_past},
           {"k_frame", k_frame},
           {"class_count", class_count},
           {"hidden_width", hidden_width},
           {"mp_steps", mp_steps},
           {"attn_heads", attn_heads},
           {"cross_attention", cross_attention},
           {"beta", beta},
           {"gt_radius", gt_radius},
           {"gt_iou_min", gt_iou_min},
           {"theta_min", theta_min},
           {"theta_join", theta_join},
           {"singleton_min_score", singleton_min_score},
           {"metric_gate", metric_gate},
           {"sweep_points", sweep_points},
           {"entropy_direction", entropy_direction},
           {"seed", seed},
           {"threads", threads},
           {"modalities", mods},
           {"postproc",
            {{"interpolate", postproc.interpolate},
             {"fix_yaw_flips", postproc.fix_yaw_flips},
             {"join_still", postproc.join_still},
             {"smooth", postproc.smooth},
             {"still_iou_min", postproc.still_iou_min},
             {"join_iou_min", postproc.join_iou_min},
             {"smooth_window", postproc.smooth_window},
             {"smooth_weights", postproc.smooth_weights}}}};
    std::ofstream os(path);
    if (!os) throw ConfigError("config: cannot write '" + path.string() + "'");
    os << j.dump(2) << "\n";
}

}  // namespace gmot
