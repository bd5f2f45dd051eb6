// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gmot/errors.hpp"

namespace gmot::io {

using nlohmann::json;

namespace {

json box_to_json(const Box3D& b) {
    return json{{"center", {b.x, b.y, b.z}}, {"size", {b.w, b.l, b.h}}, {"yaw", b.yaw}};
}

void box_from_json(const json& j, Box3D& b) {
    const auto& c = j.at("center");
    const auto& s = j.at("size");
    b.x = c.at(0);
    b.y = c.at(1);
    b.z = c.at(2);
    b.w = s.at(0);
    b.l = s.at(1);
    b.h = s.at(2);
    b.yaw = j.at("yaw");
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParseError(path.string(), 0, "cannot open for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError(path.string(), 0, "cannot open for reading");
    return is;
}

}  // namespace

void write_scenes(std::ostream& os, const std::vector<Scene>& scenes) {
    for (const Scene& scene : scenes) {
        for (int f = 0; f < scene.frame_count; ++f) {
            for (size_t d = 0; d < scene.det_frames[f].size(); ++d) {
                const Detection3D& det = scene.det_frames[f][d];
                json j;
                j["v"] = kSceneFormatVersion;
                j["scene"] = scene.id;
                j["kind"] = "det";
                j["frame"] = det.frame;
                j["t"] = det.t;
                j["cls"] = det.class_id;
                j.update(box_to_json(det.box));
                j["vel"] = {det.vx, det.vy};
                j["score"] = det.score;
                if (!scene.provenance.empty() && !scene.provenance[f][d].empty()) {
                    j["instance"] = scene.provenance[f][d];
                }
                if (!det.modalities.empty()) {
                    json mods = json::object();
                    for (const auto& [tag, emb] : det.modalities) {
                        json m;
                        m["present"] = emb.present;
                        if (emb.present) m["vec"] = emb.vec;
                        else m["dim"] = static_cast<int>(emb.vec.size());
                        mods[tag] = std::move(m);
                    }
                    j["mods"] = std::move(mods);
                }
                os << j.dump() << "\n";
            }
        }
        for (const GtTrack& t : scene.gt_tracks) {
            for (const TrackState& s : t.states) {
                json j;
                j["v"] = kSceneFormatVersion;
                j["scene"] = scene.id;
                j["kind"] = "gt";
                j["frame"] = s.frame;
                j["t"] = s.t;
                j["cls"] = t.class_id;
                j.update(box_to_json(s.box));
                j["vel"] = {s.vx, s.vy};
                j["score"] = s.score;
                j["instance"] = t.instance;
                os << j.dump() << "\n";
            }
        }
    }
}

void save_scenes(const std::filesystem::path& path, const std::vector<Scene>& scenes) {
    auto os = open_out(path);
    write_scenes(os, scenes);
}

std::vector<Scene> read_scenes(std::istream& is, const std::string& name) {
    struct SceneAccum {
        std::map<int, std::vector<std::pair<Detection3D, std::string>>> dets;
        std::map<std::string, GtTrack> gts;
        int order = 0;  // first-seen order
    };
    std::map<std::string, SceneAccum> accum;
    int next_order = 0;

    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(name, line_no, std::string("invalid JSON: ") + e.what());
        }
        try {
            const std::string scene_id = j.at("scene");
            const std::string kind = j.at("kind");
            const int frame = j.at("frame");
            if (frame < 0) throw ParseError(name, line_no, "negative frame index");
            auto [it, inserted] = accum.try_emplace(scene_id);
            if (inserted) it->second.order = next_order++;
            SceneAccum& sa = it->second;

            if (kind == "det") {
                Detection3D det;
                box_from_json(j, det.box);
                det.frame = frame;
                det.t = j.at("t");
                det.class_id = j.at("cls");
                const auto& vel = j.at("vel");
                det.vx = vel.at(0);
                det.vy = vel.at(1);
                det.score = j.at("score");
                std::string prov;
                if (j.contains("instance")) prov = j.at("instance");
                if (j.contains("mods")) {
                    for (const auto& [tag, m] : j.at("mods").items()) {
                        ModalityEmbedding emb;
                        emb.present = m.at("present");
                        if (emb.present) {
                            emb.vec = m.at("vec").get<std::vector<double>>();
                        } else {
                            emb.vec.assign(m.value("dim", 0), 0.0);
                        }
                        det.modalities[tag] = std::move(emb);
                    }
                }
                sa.dets[frame].emplace_back(std::move(det), std::move(prov));
            } else if (kind == "gt") {
                const std::string instance = j.at("instance");
                GtTrack& track = sa.gts[instance];
                track.instance = instance;
                track.class_id = j.at("cls");
                TrackState s;
                s.frame = frame;
                s.t = j.at("t");
                box_from_json(j, s.box);
                const auto& vel = j.at("vel");
                s.vx = vel.at(0);
                s.vy = vel.at(1);
                s.score = j.at("score");
                track.states.push_back(s);
            } else {
                throw ParseError(name, line_no, "unknown record kind '" + kind + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError(name, line_no, std::string("bad record: ") + e.what());
        }
    }

    std::vector<const SceneAccum*> ordered;
    std::vector<std::string> ids;
    std::vector<std::pair<int, std::string>> order_keys;
    for (const auto& [id, sa] : accum) order_keys.emplace_back(sa.order, id);
    std::sort(order_keys.begin(), order_keys.end());

    std::vector<Scene> scenes;
    for (const auto& [order, id] : order_keys) {
        SceneAccum& sa = accum.at(id);
        Scene scene;
        scene.id = id;
        int max_frame = -1;
        for (const auto& [f, v] : sa.dets) max_frame = std::max(max_frame, f);
        for (const auto& [instance, t] : sa.gts) {
            for (const TrackState& s : t.states) max_frame = std::max(max_frame, s.frame);
        }
        scene.frame_count = max_frame + 1;
        scene.det_frames.resize(scene.frame_count);
        scene.provenance.resize(scene.frame_count);
        for (auto& [f, v] : sa.dets) {
            for (auto& [det, prov] : v) {
                scene.det_frames[f].push_back(std::move(det));
                scene.provenance[f].push_back(std::move(prov));
            }
        }
        for (auto& [instance, t] : sa.gts) {
            std::sort(t.states.begin(), t.states.end(),
                      [](const TrackState& a, const TrackState& b) { return a.frame < b.frame; });
            scene.gt_tracks.push_back(std::move(t));
        }
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

std::vector<Scene> load_scenes(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_scenes(is, path.string());
}

void write_trajectories(std::ostream& os, const std::map<std::string, TrajectorySet>& per_scene) {
    for (const auto& [scene_id, ts] : per_scene) {
        for (const Trajectory& t : ts.tracks) {
            for (const TrackState& s : t.states) {
                json j;
                j["v"] = kSceneFormatVersion;
                j["scene"] = scene_id;
                j["track"] = t.track_id;
                j["cls"] = t.class_id;
                j["frame"] = s.frame;
                j["t"] = s.t;
                j.update(box_to_json(s.box));
                j["vel"] = {s.vx, s.vy};
                j["score"] = s.score;
                os << j.dump() << "\n";
            }
        }
    }
}

void save_trajectories(const std::filesystem::path& path,
                       const std::map<std::string, TrajectorySet>& per_scene) {
    auto os = open_out(path);
    write_trajectories(os, per_scene);
}

std::map<std::string, TrajectorySet> read_trajectories(std::istream& is,
                                                       const std::string& name) {
    std::map<std::string, std::map<int, Trajectory>> accum;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string scene_id = j.at("scene");
            const int track_id = j.at("track");
            Trajectory& t = accum[scene_id][track_id];
            t.track_id = track_id;
            t.class_id = j.at("cls");
            TrackState s;
            s.frame = j.at("frame");
            s.t = j.at("t");
            box_from_json(j, s.box);
            const auto& vel = j.at("vel");
            s.vx = vel.at(0);
            s.vy = vel.at(1);
            s.score = j.at("score");
            t.states.push_back(s);
        } catch (const json::exception& e) {
            throw ParseError(name, line_no, std::string("bad trajectory record: ") + e.what());
        }
    }
    std::map<std::string, TrajectorySet> out;
    for (auto& [scene_id, tracks] : accum) {
        TrajectorySet ts;
        for (auto& [id, t] : tracks) {
            std::sort(t.states.begin(), t.states.end(),
                      [](const TrackState& a, const TrackState& b) { return a.frame < b.frame; });
            ts.tracks.push_back(std::move(t));
        }
        out[scene_id] = std::move(ts);
    }
    return out;
}

std::map<std::string, TrajectorySet> load_trajectories(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_trajectories(is, path.string());
}

void write_scored_edges(std::ostream& os, const std::vector<WindowScores>& rows) {
    for (const WindowScores& w : rows) {
        for (const ScoredEdge& e : w.edges) {
            json j;
            j["scene"] = w.scene;
            j["window"] = w.window_start;
            j["j"] = e.j;
            j["i"] = e.i;
            j["score"] = e.score;
            os << j.dump() << "\n";
        }
    }
}

void save_scored_edges(const std::filesystem::path& path, const std::vector<WindowScores>& rows) {
    auto os = open_out(path);
    write_scored_edges(os, rows);
}

std::vector<WindowScores> load_scored_edges(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::map<std::pair<std::string, int>, WindowScores> accum;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string scene = j.at("scene");
            const int window = j.at("window");
            WindowScores& w = accum[{scene, window}];
            w.scene = scene;
            w.window_start = window;
            w.edges.push_back({j.at("j"), j.at("i"), j.at("score"), 1});
        } catch (const json::exception& e) {
            throw ParseError(path.string(), line_no, std::string("bad edge record: ") + e.what());
        }
    }
    std::vector<WindowScores> out;
    for (auto& [key, w] : accum) out.push_back(std::move(w));
    return out;
}

// ---- weights ----

namespace {

constexpr char kWeightsMagic[8] = {'G', 'M', 'O', 'T', 'W', 'T', 'S', '1'};

void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is, const std::string& name) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError(name, 0, "truncated weights file");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_f64_le(std::ostream& os, const double* data, size_t n) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 8));
    } else {
        for (size_t i = 0; i < n; ++i) {
            uint64_t bits;
            std::memcpy(&bits, &data[i], 8);
            unsigned char b[8];
            for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
            os.write(reinterpret_cast<const char*>(b), 8);
        }
    }
}

void read_f64_le(std::istream& is, double* data, size_t n, const std::string& name) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * 8))) {
            throw ParseError(name, 0, "truncated tensor payload");
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            unsigned char b[8];
            if (!is.read(reinterpret_cast<char*>(b), 8)) {
                throw ParseError(name, 0, "truncated tensor payload");
            }
            uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(b[k]) << (8 * k);
            std::memcpy(&data[i], &bits, 8);
        }
    }
}

json hyper_to_json(const ModelHyper& h) {
    json mods = json::array();
    for (const ModalitySpec& m : h.modalities) mods.push_back({{"tag", m.tag}, {"dim", m.dim}});
    return json{{"version", kWeightsFormatVersion},
                {"class_count", h.class_count},
                {"hidden_width", h.hidden_width},
                {"mp_steps", h.mp_steps},
                {"attn_heads", h.attn_heads},
                {"modalities", mods},
                {"cross_attention", h.cross_attention},
                {"gat_leaky_slope", h.gat_leaky_slope},
                {"init_seed", h.init_seed}};
}

ModelHyper hyper_from_json(const json& j, const std::string& name) {
    if (j.at("version").get<int>() != kWeightsFormatVersion) {
        throw ParseError(name, 0, "unsupported weights format version");
    }
    ModelHyper h;
    h.class_count = j.at("class_count");
    h.hidden_width = j.at("hidden_width");
    h.mp_steps = j.at("mp_steps");
    h.attn_heads = j.at("attn_heads");
    for (const auto& m : j.at("modalities")) {
        h.modalities.push_back({m.at("tag"), m.at("dim")});
    }
    h.cross_attention = j.at("cross_attention");
    h.gat_leaky_slope = j.at("gat_leaky_slope");
    h.init_seed = j.at("init_seed");
    return h;
}

}  // namespace

void save_model(const std::filesystem::path& path, Model& model) {
    auto os = open_out(path);
    os.write(kWeightsMagic, 8);
    const std::string header = hyper_to_json(model.hyper).dump();
    write_u32(os, static_cast<uint32_t>(header.size()));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    const nn::ParamRefs refs = model.param_refs();
    write_u32(os, static_cast<uint32_t>(refs.size()));
    for (const auto& [name, tensor] : refs) {
        write_u32(os, static_cast<uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<uint32_t>(tensor->rows));
        write_u32(os, static_cast<uint32_t>(tensor->cols));
        write_f64_le(os, tensor->data.data(), tensor->data.size());
    }
}

Model load_model(const std::filesystem::path& path) {
    const std::string name = path.string();
    auto is = open_in(path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kWeightsMagic, 8) != 0) {
        throw ParseError(name, 0, "not a weights file (bad magic)");
    }
    const uint32_t header_len = read_u32(is, name);
    std::string header(header_len, '\0');
    if (!is.read(header.data(), header_len)) throw ParseError(name, 0, "truncated header");
    json hj;
    try {
        hj = json::parse(header);
    } catch (const json::exception& e) {
        throw ParseError(name, 0, std::string("bad weights header: ") + e.what());
    }
    Model model = Model::init(hyper_from_json(hj, name));

    std::map<std::string, nn::Tensor*> by_name;
    for (auto& [pname, tensor] : model.param_refs()) by_name[pname] = tensor;

    const uint32_t count = read_u32(is, name);
    if (count != by_name.size()) {
        throw ParseError(name, 0, "weights file tensor count does not match the architecture");
    }
    std::map<std::string, int> seen;
    for (uint32_t k = 0; k < count; ++k) {
        const uint32_t name_len = read_u32(is, name);
        std::string pname(name_len, '\0');
        if (!is.read(pname.data(), name_len)) throw ParseError(name, 0, "truncated tensor name");
        const uint32_t rows = read_u32(is, name);
        const uint32_t cols = read_u32(is, name);
        auto it = by_name.find(pname);
        if (it == by_name.end()) throw ParseError(name, 0, "unknown tensor '" + pname + "'");
        if (++seen[pname] > 1) throw ParseError(name, 0, "duplicate tensor '" + pname + "'");
        nn::Tensor& t = *it->second;
        if (static_cast<uint32_t>(t.rows) != rows || static_cast<uint32_t>(t.cols) != cols) {
            throw ParseError(name, 0, "tensor '" + pname + "' has mismatched shape");
        }
        read_f64_le(is, t.data.data(), t.data.size(), name);
    }
    return model;
}

// ---- reports ----

namespace {
json class_metrics_to_json(const ClassMetrics& m) {
    return json{{"mota", m.mota},     {"motp", m.motp}, {"recall", m.recall},
                {"fp", m.fp},         {"fn", m.fn},     {"ids", m.ids},
                {"frag", m.frag},     {"gt", m.gt_total}, {"amota", m.amota},
                {"amotp", m.amotp}};
}
}  // namespace

std::string metrics_report_to_json(const MetricsReport& report) {
    json j;
    j["overall"] = class_metrics_to_json(report.overall);
    json per_class = json::object();
    for (const auto& [cls, m] : report.per_class) {
        per_class[std::to_string(cls)] = class_metrics_to_json(m);
    }
    j["per_class"] = std::move(per_class);
    json sweep = json::array();
    for (const SweepPoint& p : report.sweep) {
        sweep.push_back({{"target_recall", p.target_recall},
                         {"achievable", p.achievable},
                         {"threshold", p.threshold},
                         {"achieved_recall", p.achieved_recall},
                         {"motar", p.motar},
                         {"motp", p.motp},
                         {"fp", p.fp},
                         {"fn", p.fn},
                         {"ids", p.ids}});
    }
    j["sweep"] = std::move(sweep);
    return j.dump(2);
}

namespace {
ClassMetrics class_metrics_from_json(const json& j) {
    ClassMetrics m;
    m.mota = j.at("mota");
    m.motp = j.at("motp");
    m.recall = j.at("recall");
    m.fp = j.at("fp");
    m.fn = j.at("fn");
    m.ids = j.at("ids");
    m.frag = j.at("frag");
    m.gt_total = j.at("gt");
    m.amota = j.at("amota");
    m.amotp = j.at("amotp");
    return m;
}
}  // namespace

MetricsReport metrics_report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("metrics report: ") + e.what());
    }
    MetricsReport report;
    report.overall = class_metrics_from_json(j.at("overall"));
    for (const auto& [cls, m] : j.at("per_class").items()) {
        report.per_class[std::stoi(cls)] = class_metrics_from_json(m);
    }
    for (const auto& p : j.at("sweep")) {
        SweepPoint pt;
        pt.target_recall = p.at("target_recall");
        pt.achievable = p.at("achievable");
        pt.threshold = p.at("threshold");
        pt.achieved_recall = p.at("achieved_recall");
        pt.motar = p.at("motar");
        pt.motp = p.at("motp");
        pt.fp = p.at("fp");
        pt.fn = p.at("fn");
        pt.ids = p.at("ids");
        report.sweep.push_back(pt);
    }
    return report;
}

void save_metrics_report(const std::filesystem::path& path, const MetricsReport& report) {
    auto os = open_out(path);
    os << metrics_report_to_json(report) << "\n";
}

MetricsReport load_metrics_report(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string text((std::istreambuf_iterator<char>(is)), {});
    return metrics_report_from_json(text);
}

std::string metrics_report_table(const MetricsReport& report) {
    std::ostringstream os;
    auto row = [&os](const std::string& name, const ClassMetrics& m) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-10s %7.3f %7.3f %7.3f %7.3f %6ld %6ld %5ld %5ld\n",
                      name.c_str(), m.amota, m.amotp, m.mota, m.recall, m.fp, m.fn, m.ids, m.frag);
        os << buf;
    };
    os << "class       AMOTA   AMOTP    MOTA  recall     FP     FN   IDS  FRAG\n";
    row("overall", report.overall);
    for (const auto& [cls, m] : report.per_class) row("class " + std::to_string(cls), m);
    return os.str();
}

std::string entropy_report_to_json(const EntropyReport& report) {
    json j;
    json scenes = json::object();
    for (const auto& [id, h] : report.scene_entropy) scenes[id] = h;
    j["scenes"] = std::move(scenes);
    j["mean"] = report.mean;
    j["direction"] = report.direction;
    j["kept"] = report.kept;
    return j.dump(2);
}

EntropyReport entropy_report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("entropy report: ") + e.what());
    }
    EntropyReport report;
    for (const auto& [id, h] : j.at("scenes").items()) report.scene_entropy[id] = h;
    report.mean = j.at("mean");
    report.direction = j.at("direction");
    for (const auto& id : j.at("kept")) report.kept.push_back(id);
    return report;
}

void save_entropy_report(const std::filesystem::path& path, const EntropyReport& report) {
    auto os = open_out(path);
    os << entropy_report_to_json(report) << "\n";
}

EntropyReport load_entropy_report(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string text((std::istreambuf_iterator<char>(is)), {});
    return entropy_report_from_json(text);
}

}  // namespace gmot::io
