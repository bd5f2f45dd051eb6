// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmot/rng.hpp"

namespace gmot {

void SceneConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (frames < 1 || frame_period <= 0.0) {
        throw std::invalid_argument("SceneConfig: frames and frame_period must be positive");
    }
    if (classes.empty()) throw std::invalid_argument("SceneConfig: at least one class required");
    if (objects_min < 0 || objects_max < objects_min) {
        throw std::invalid_argument("SceneConfig: invalid object count range");
    }
    if (!prob(p_fn) || !prob(p_yaw_flip) || !prob(p_converge) || fp_rate < 0.0) {
        throw std::invalid_argument("SceneConfig: probabilities must lie in [0, 1]");
    }
    if (center_sigma < 0.0 || yaw_sigma < 0.0 || vel_sigma < 0.0 || extent <= 0.0) {
        throw std::invalid_argument("SceneConfig: sigmas must be nonnegative, extent positive");
    }
    for (const ModalityConfig& m : modalities) {
        if (m.dim < 1 || !prob(m.p_near) || !prob(m.p_far) || m.noise_sigma < 0.0) {
            throw std::invalid_argument("SceneConfig: invalid modality config for '" + m.tag + "'");
        }
    }
    for (const ClassSpec& c : classes) {
        if (c.spawn_weight < 0.0 || c.speed_min < 0.0 || c.speed_max < c.speed_min) {
            throw std::invalid_argument("SceneConfig: invalid class spec");
        }
        for (double s : c.size_mean) {
            if (s <= 0.0) throw std::invalid_argument("SceneConfig: size priors must be positive");
        }
    }
}

SceneConfig SceneConfig::defaults_3class() {
    SceneConfig cfg;
    ClassSpec car;
    car.class_id = 0;
    car.spawn_weight = 3.0;
    car.size_mean[0] = 1.9;
    car.size_mean[1] = 4.6;
    car.size_mean[2] = 1.7;
    car.speed_min = 0.0;
    car.speed_max = 8.0;
    ClassSpec pedestrian;
    pedestrian.class_id = 1;
    pedestrian.spawn_weight = 2.0;
    pedestrian.size_mean[0] = 0.7;
    pedestrian.size_mean[1] = 0.8;
    pedestrian.size_mean[2] = 1.8;
    pedestrian.size_sigma = 0.05;
    pedestrian.speed_min = 0.0;
    pedestrian.speed_max = 1.8;
    ClassSpec truck;
    truck.class_id = 2;
    truck.spawn_weight = 1.0;
    truck.size_mean[0] = 2.6;
    truck.size_mean[1] = 8.0;
    truck.size_mean[2] = 3.2;
    truck.size_sigma = 0.2;
    truck.speed_min = 0.0;
    truck.speed_max = 6.0;
    cfg.classes = {car, pedestrian, truck};
    return cfg;
}

namespace {

struct ObjectSpec {
    int class_id;
    Box3D box;        // size only; pose filled per frame
    double x0, y0;
    double heading;
    double speed;
    double turn_rate;
    std::vector<std::vector<double>> prototypes;  // per modality
};

std::vector<double> draw_prototype(Rng& rng, int dim, double scale) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal(0.0, scale);
    return v;
}

double presence_probability(const ModalityConfig& m, double range, double extent) {
    const double f = std::clamp(range / extent, 0.0, 1.0);
    return m.p_near + (m.p_far - m.p_near) * f;
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg, const std::string& scene_id) {
    cfg.validate();
    Rng rng(cfg.seed);
    Scene scene;
    scene.id = scene_id;
    scene.frame_count = cfg.frames;
    scene.det_frames.resize(cfg.frames);
    scene.provenance.resize(cfg.frames);

    std::vector<double> weights;
    for (const ClassSpec& c : cfg.classes) weights.push_back(c.spawn_weight);

    // Objects live for the whole scene with gently turning constant-speed
    // kinematics; spawn poses keep most of the motion inside the extent.
    const int count = static_cast<int>(rng.uniform_int(cfg.objects_min, cfg.objects_max));
    std::vector<ObjectSpec> objects;
    for (int o = 0; o < count; ++o) {
        const ClassSpec& cls = cfg.classes[rng.weighted_index(weights)];
        ObjectSpec obj;
        obj.class_id = cls.class_id;
        obj.box.w = std::max(0.2, cls.size_mean[0] + rng.normal(0.0, cls.size_sigma));
        obj.box.l = std::max(0.2, cls.size_mean[1] + rng.normal(0.0, cls.size_sigma));
        obj.box.h = std::max(0.2, cls.size_mean[2] + rng.normal(0.0, cls.size_sigma));
        obj.box.z = obj.box.h / 2.0;
        obj.x0 = rng.uniform(-0.8 * cfg.extent, 0.8 * cfg.extent);
        obj.y0 = rng.uniform(-0.8 * cfg.extent, 0.8 * cfg.extent);
        obj.heading = rng.uniform(-M_PI, M_PI);
        if (rng.bernoulli(cfg.p_converge)) {
            obj.heading = wrap_angle(std::atan2(-obj.y0, -obj.x0) + rng.normal(0.0, 0.2));
        }
        obj.speed = rng.uniform(cls.speed_min, cls.speed_max);
        obj.turn_rate = rng.uniform(-cfg.turn_rate_max, cfg.turn_rate_max);
        for (const ModalityConfig& m : cfg.modalities) {
            obj.prototypes.push_back(draw_prototype(rng, m.dim, cfg.prototype_scale));
        }
        objects.push_back(std::move(obj));
    }

    std::vector<std::vector<std::vector<double>>> clutter_protos;  // per modality
    for (const ModalityConfig& m : cfg.modalities) {
        std::vector<std::vector<double>> pool;
        for (int p = 0; p < cfg.clutter_prototypes; ++p) {
            pool.push_back(draw_prototype(rng, m.dim, cfg.prototype_scale));
        }
        clutter_protos.push_back(std::move(pool));
    }

    // Ground truth.
    scene.gt_tracks.resize(objects.size());
    for (size_t o = 0; o < objects.size(); ++o) {
        scene.gt_tracks[o].instance = "o" + std::to_string(o);
        scene.gt_tracks[o].class_id = objects[o].class_id;
    }
    for (int f = 0; f < cfg.frames; ++f) {
        const double t = f * cfg.frame_period;
        for (size_t o = 0; o < objects.size(); ++o) {
            const ObjectSpec& obj = objects[o];
            // Integrate the gentle turn analytically per frame count.
            double heading = obj.heading + obj.turn_rate * f;
            double x = obj.x0, y = obj.y0;
            if (std::abs(obj.turn_rate) < 1e-9) {
                x += obj.speed * t * std::cos(obj.heading);
                y += obj.speed * t * std::sin(obj.heading);
            } else {
                const double w = obj.turn_rate / cfg.frame_period;  // rad/s
                x += obj.speed / w * (std::sin(obj.heading + w * t) - std::sin(obj.heading));
                y += obj.speed / w * (std::cos(obj.heading) - std::cos(obj.heading + w * t));
            }
            TrackState s;
            s.frame = f;
            s.t = t;
            s.box = obj.box;
            s.box.x = x;
            s.box.y = y;
            s.box.yaw = wrap_angle(heading);
            s.vx = obj.speed * std::cos(heading);
            s.vy = obj.speed * std::sin(heading);
            s.score = 1.0;
            scene.gt_tracks[o].states.push_back(s);
        }
    }

    // Detections: corrupted GT plus clutter.
    for (int f = 0; f < cfg.frames; ++f) {
        auto& dets = scene.det_frames[f];
        auto& prov = scene.provenance[f];
        for (size_t o = 0; o < objects.size(); ++o) {
            const TrackState& s = scene.gt_tracks[o].states[f];
            const bool missed = rng.bernoulli(cfg.p_fn);
            // Draws below happen regardless of the miss so the stream
            // stays aligned across p_fn settings.
            Detection3D d;
            d.box = s.box;
            d.box.x += rng.normal(0.0, cfg.center_sigma);
            d.box.y += rng.normal(0.0, cfg.center_sigma);
            d.box.z += rng.normal(0.0, cfg.center_sigma * 0.5);
            d.box.yaw = wrap_angle(s.box.yaw + rng.normal(0.0, cfg.yaw_sigma));
            if (rng.bernoulli(cfg.p_yaw_flip)) d.box.yaw = wrap_angle(d.box.yaw + M_PI);
            d.vx = s.vx + rng.normal(0.0, cfg.vel_sigma);
            d.vy = s.vy + rng.normal(0.0, cfg.vel_sigma);
            d.class_id = objects[o].class_id;
            d.score = std::clamp(cfg.tp_score_mean + rng.normal(0.0, cfg.tp_score_sigma), 0.0, 1.0);
            d.t = s.t;
            d.frame = f;
            const double range = std::hypot(d.box.x, d.box.y);
            for (size_t m = 0; m < cfg.modalities.size(); ++m) {
                const ModalityConfig& mc = cfg.modalities[m];
                ModalityEmbedding emb;
                emb.vec.assign(mc.dim, 0.0);
                if (rng.bernoulli(presence_probability(mc, range, cfg.extent))) {
                    emb.present = true;
                    for (int k = 0; k < mc.dim; ++k) {
                        emb.vec[k] = objects[o].prototypes[m][k] + rng.normal(0.0, mc.noise_sigma);
                    }
                }
                d.modalities[mc.tag] = std::move(emb);
            }
            if (!missed) {
                dets.push_back(std::move(d));
                prov.push_back(scene.gt_tracks[o].instance);
            }
        }
        const int clutter = rng.poisson(cfg.fp_rate);
        for (int c = 0; c < clutter; ++c) {
            const int ci = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(cfg.classes.size()) - 1));
            const ClassSpec& cls = cfg.classes[ci];
            Detection3D d;
            d.box.w = std::max(0.2, cls.size_mean[0] + rng.normal(0.0, cls.size_sigma));
            d.box.l = std::max(0.2, cls.size_mean[1] + rng.normal(0.0, cls.size_sigma));
            d.box.h = std::max(0.2, cls.size_mean[2] + rng.normal(0.0, cls.size_sigma));
            d.box.x = rng.uniform(-cfg.extent, cfg.extent);
            d.box.y = rng.uniform(-cfg.extent, cfg.extent);
            d.box.z = d.box.h / 2.0;
            d.box.yaw = rng.uniform(-M_PI, M_PI);
            d.vx = rng.normal(0.0, 1.0);
            d.vy = rng.normal(0.0, 1.0);
            d.class_id = cls.class_id;
            d.score = std::clamp(cfg.fp_score_mean + rng.normal(0.0, cfg.fp_score_sigma), 0.0, 1.0);
            d.t = f * cfg.frame_period;
            d.frame = f;
            const double range = std::hypot(d.box.x, d.box.y);
            for (size_t m = 0; m < cfg.modalities.size(); ++m) {
                const ModalityConfig& mc = cfg.modalities[m];
                ModalityEmbedding emb;
                emb.vec.assign(mc.dim, 0.0);
                if (rng.bernoulli(presence_probability(mc, range, cfg.extent))) {
                    emb.present = true;
                    const auto& proto = clutter_protos[m][static_cast<size_t>(
                        rng.uniform_int(0, cfg.clutter_prototypes - 1))];
                    for (int k = 0; k < mc.dim; ++k) {
                        emb.vec[k] = proto[k] + rng.normal(0.0, mc.noise_sigma);
                    }
                }
                d.modalities[mc.tag] = std::move(emb);
            }
            dets.push_back(std::move(d));
            prov.push_back("");
        }
    }
    return scene;
}

std::vector<Scene> generate_scenes(const SceneConfig& cfg, int count,
                                   const std::string& id_prefix) {
    std::vector<Scene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i) {
        SceneConfig c = cfg;
        c.seed = cfg.seed + static_cast<uint64_t>(i);
        scenes.push_back(generate_scene(c, id_prefix + std::to_string(i)));
    }
    return scenes;
}

TrajectorySet oracle_greedy_baseline(const std::vector<std::vector<Detection3D>>& det_frames,
                                     double iou_min) {
    TrajectorySet out;
    int next_id = 0;
    // Active tracks: extended (or born) in the previous frame.
    std::vector<int> active;  // indices into out.tracks
    for (size_t f = 0; f < det_frames.size(); ++f) {
        const auto& dets = det_frames[f];
        struct Cand {
            double iou;
            int track;  // index into active
            int det;
        };
        std::vector<Cand> cands;
        for (size_t a = 0; a < active.size(); ++a) {
            const Trajectory& trk = out.tracks[active[a]];
            for (size_t d = 0; d < dets.size(); ++d) {
                if (dets[d].class_id != trk.class_id) continue;
                const double iou = bev_iou(trk.states.back().box, dets[d].box);
                if (iou >= iou_min) cands.push_back({iou, static_cast<int>(a), static_cast<int>(d)});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.iou != b.iou) return a.iou > b.iou;
            if (a.track != b.track) return a.track < b.track;
            return a.det < b.det;
        });
        std::vector<char> track_used(active.size(), false), det_used(dets.size(), false);
        std::vector<int> next_active;
        for (const Cand& c : cands) {
            if (track_used[c.track] || det_used[c.det]) continue;
            track_used[c.track] = true;
            det_used[c.det] = true;
            const Detection3D& d = dets[c.det];
            out.tracks[active[c.track]].states.push_back(
                {d.frame, d.t, d.box, d.vx, d.vy, d.score});
            next_active.push_back(active[c.track]);
        }
        for (size_t d = 0; d < dets.size(); ++d) {
            if (det_used[d]) continue;
            Trajectory t;
            t.track_id = next_id++;
            t.class_id = dets[d].class_id;
            t.states.push_back({dets[d].frame, dets[d].t, dets[d].box, dets[d].vx, dets[d].vy,
                                dets[d].score});
            next_active.push_back(static_cast<int>(out.tracks.size()));
            out.tracks.push_back(std::move(t));
        }
        std::sort(next_active.begin(), next_active.end());
        active = std::move(next_active);
    }
    return out;
}

}  // namespace gmot
