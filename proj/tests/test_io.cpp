// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmot/config.hpp"
#include "gmot/errors.hpp"
#include "gmot/io.hpp"
#include "gmot/synth.hpp"

using namespace gmot;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gmot_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

SceneConfig small_cfg(uint64_t seed) {
    SceneConfig cfg = SceneConfig::defaults_3class();
    cfg.seed = seed;
    cfg.frames = 8;
    cfg.objects_min = 2;
    cfg.objects_max = 4;
    cfg.fp_rate = 0.5;
    cfg.modalities = {{"camera", 4, 0.9, 0.4, 0.1}};
    return cfg;
}

bool det_equal(const Detection3D& a, const Detection3D& b) {
    if (a.box.x != b.box.x || a.box.y != b.box.y || a.box.z != b.box.z) return false;
    if (a.box.w != b.box.w || a.box.l != b.box.l || a.box.h != b.box.h) return false;
    if (a.box.yaw != b.box.yaw || a.vx != b.vx || a.vy != b.vy) return false;
    if (a.class_id != b.class_id || a.score != b.score || a.t != b.t || a.frame != b.frame) {
        return false;
    }
    if (a.modalities.size() != b.modalities.size()) return false;
    for (const auto& [tag, emb] : a.modalities) {
        auto it = b.modalities.find(tag);
        if (it == b.modalities.end()) return false;
        if (emb.present != it->second.present) return false;
        if (emb.present && emb.vec != it->second.vec) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("scene file round trip is the identity") {
    TempDir dir;
    const std::vector<Scene> scenes = generate_scenes(small_cfg(3), 2, "rt");
    const auto path = dir.path / "scenes.jsonl";
    io::save_scenes(path, scenes);
    const std::vector<Scene> loaded = io::load_scenes(path);
    REQUIRE(loaded.size() == 2);
    for (size_t s = 0; s < 2; ++s) {
        CHECK(loaded[s].id == scenes[s].id);
        REQUIRE(loaded[s].frame_count == scenes[s].frame_count);
        for (int f = 0; f < scenes[s].frame_count; ++f) {
            REQUIRE(loaded[s].det_frames[f].size() == scenes[s].det_frames[f].size());
            for (size_t d = 0; d < scenes[s].det_frames[f].size(); ++d) {
                CHECK(det_equal(loaded[s].det_frames[f][d], scenes[s].det_frames[f][d]));
                CHECK(loaded[s].provenance[f][d] == scenes[s].provenance[f][d]);
            }
        }
        REQUIRE(loaded[s].gt_tracks.size() == scenes[s].gt_tracks.size());
        // GT tracks reload keyed by instance; compare as maps.
        std::map<std::string, const GtTrack*> want;
        for (const GtTrack& t : scenes[s].gt_tracks) want[t.instance] = &t;
        for (const GtTrack& t : loaded[s].gt_tracks) {
            REQUIRE(want.count(t.instance));
            const GtTrack& w = *want.at(t.instance);
            CHECK(t.class_id == w.class_id);
            REQUIRE(t.states.size() == w.states.size());
            for (size_t k = 0; k < t.states.size(); ++k) {
                CHECK(t.states[k].frame == w.states[k].frame);
                CHECK(t.states[k].box.x == w.states[k].box.x);
                CHECK(t.states[k].box.yaw == w.states[k].box.yaw);
            }
        }
    }
}

TEST_CASE("scene serialization is byte-stable") {
    const std::vector<Scene> scenes = generate_scenes(small_cfg(9), 1, "bs");
    std::ostringstream a, b;
    io::write_scenes(a, scenes);
    io::write_scenes(b, scenes);
    CHECK(a.str() == b.str());
    // Parse + re-serialize reproduces the bytes (doubles round-trip).
    std::istringstream in(a.str());
    const std::vector<Scene> loaded = io::read_scenes(in, "mem");
    std::ostringstream c;
    io::write_scenes(c, loaded);
    CHECK(c.str() == a.str());
}

TEST_CASE("parse errors carry line numbers") {
    TempDir dir;
    const auto path = dir.path / "bad.jsonl";
    {
        std::ofstream os(path);
        os << R"({"v":1,"scene":"s","kind":"gt","frame":0,"t":0.0,"cls":0,"center":[0,0,0],)"
           << R"("size":[1,1,1],"yaw":0.0,"vel":[0,0],"score":1.0,"instance":"a"})"
           << "\n";
        os << "{this is not json}\n";
    }
    try {
        io::load_scenes(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    // Missing field: also a parse error with the line number.
    {
        std::ofstream os(path);
        os << R"({"scene":"s","kind":"det","frame":0})" << "\n";
    }
    CHECK_THROWS_AS(io::load_scenes(path), ParseError);

    CHECK_THROWS_AS(io::load_scenes(dir.path / "missing.jsonl"), ParseError);
}

TEST_CASE("empty scene file loads to an empty set") {
    TempDir dir;
    const auto path = dir.path / "empty.jsonl";
    std::ofstream(path).close();
    CHECK(io::load_scenes(path).empty());
}

TEST_CASE("trajectory file round trip") {
    TempDir dir;
    std::map<std::string, TrajectorySet> tracks;
    Trajectory t;
    t.track_id = 3;
    t.class_id = 1;
    TrackState s;
    s.frame = 2;
    s.t = 1.0;
    s.box = {1.5, -2.25, 0.8, 1.9, 4.6, 1.7, 0.3125};
    s.vx = 0.5;
    s.vy = -0.5;
    s.score = 0.875;
    t.states.push_back(s);
    s.frame = 3;
    s.t = 1.5;
    s.box.x = 2.0;
    t.states.push_back(s);
    tracks["sceneA"].tracks.push_back(t);

    const auto path = dir.path / "tracks.jsonl";
    io::save_trajectories(path, tracks);
    const auto loaded = io::load_trajectories(path);
    REQUIRE(loaded.count("sceneA"));
    REQUIRE(loaded.at("sceneA").tracks.size() == 1);
    const Trajectory& lt = loaded.at("sceneA").tracks[0];
    CHECK(lt.track_id == 3);
    CHECK(lt.class_id == 1);
    REQUIRE(lt.states.size() == 2);
    CHECK(lt.states[0].box.x == 1.5);
    CHECK(lt.states[0].box.yaw == 0.3125);
    CHECK(lt.states[1].frame == 3);
}

TEST_CASE("weights round trip bit-exactly") {
    TempDir dir;
    ModelHyper hyper;
    hyper.class_count = 3;
    hyper.hidden_width = 16;
    hyper.mp_steps = 2;
    hyper.attn_heads = 2;
    hyper.modalities = {{"camera", 4}, {"lidar", 8}};
    hyper.init_seed = 77;
    Model m = Model::init(hyper);
    const auto path = dir.path / "weights.gmw";
    io::save_model(path, m);
    Model loaded = io::load_model(path);
    CHECK(loaded.hyper.class_count == 3);
    CHECK(loaded.hyper.mp_steps == 2);
    CHECK(loaded.hyper.cross_attention == true);
    REQUIRE(loaded.hyper.modalities.size() == 2);
    CHECK(loaded.hyper.modalities[1].dim == 8);

    auto a = m.param_refs();
    auto b = loaded.param_refs();
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].first == b[k].first);
        REQUIRE(a[k].second->same_shape(*b[k].second));
        CHECK(a[k].second->data == b[k].second->data);  // bit-exact
    }
}

TEST_CASE("weights loader rejects corruption") {
    TempDir dir;
    ModelHyper hyper;
    hyper.hidden_width = 8;
    hyper.modalities = {{"camera", 4}};
    Model m = Model::init(hyper);
    const auto path = dir.path / "weights.gmw";
    io::save_model(path, m);

    // Truncate the file.
    const auto broken = dir.path / "broken.gmw";
    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        std::ofstream out(broken, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(io::load_model(broken), ParseError);

    // Bad magic.
    {
        std::ofstream out(broken, std::ios::binary);
        out << "NOTMAGIC the rest does not matter";
    }
    CHECK_THROWS_AS(io::load_model(broken), ParseError);
}

TEST_CASE("config load, save and validation") {
    TempDir dir;
    PipelineConfig cfg;
    cfg.window_len = 5;
    cfg.k_past = 12;
    cfg.modalities = {{"camera", 8}};
    cfg.theta_min = 0.15;
    const auto path = dir.path / "config.json";
    cfg.save(path);
    const PipelineConfig loaded = PipelineConfig::load(path);
    CHECK(loaded.k_past == 12);
    CHECK(loaded.theta_min == doctest::Approx(0.15));
    REQUIRE(loaded.modalities.size() == 1);
    CHECK(loaded.modalities[0].dim == 8);

    // Bad values are rejected at load.
    {
        std::ofstream os(path);
        os << R"({"beta": 1.5})";
    }
    CHECK_THROWS_AS(PipelineConfig::load(path), ConfigError);
    {
        std::ofstream os(path);
        os << R"({"window_len": 1})";
    }
    CHECK_THROWS_AS(PipelineConfig::load(path), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::load(dir.path / "nope.json"), ConfigError);
}

TEST_CASE("metrics and entropy reports round trip") {
    MetricsReport rep;
    rep.overall.mota = 0.5;
    rep.overall.motp = 0.375;
    rep.overall.amota = 0.25;
    rep.overall.gt_total = 6;
    rep.overall.fp = 1;
    rep.overall.fn = 2;
    rep.per_class[0].mota = 0.5;
    rep.per_class[2].recall = 0.625;
    SweepPoint p;
    p.target_recall = 0.5;
    p.achievable = true;
    p.motar = 0.75;
    p.threshold = 0.875;
    rep.sweep.push_back(p);
    const std::string json_text = io::metrics_report_to_json(rep);
    CHECK(json_text.find("\"mota\": 0.5") != std::string::npos);
    const MetricsReport back = io::metrics_report_from_json(json_text);
    CHECK(back.overall.mota == rep.overall.mota);
    CHECK(back.overall.motp == rep.overall.motp);
    CHECK(back.overall.fp == rep.overall.fp);
    CHECK(back.per_class.at(2).recall == 0.625);
    REQUIRE(back.sweep.size() == 1);
    CHECK(back.sweep[0].motar == 0.75);
    CHECK(back.sweep[0].threshold == 0.875);
    // Re-serialization reproduces the bytes.
    CHECK(io::metrics_report_to_json(back) == json_text);

    const std::string table = io::metrics_report_table(rep);
    CHECK(table.find("overall") != std::string::npos);

    io::EntropyReport er;
    er.scene_entropy["a"] = 0.7;
    er.scene_entropy["b"] = 0.9;
    er.mean = 0.8;
    er.direction = "above-mean";
    er.kept = {"b"};
    const std::string etext = io::entropy_report_to_json(er);
    const io::EntropyReport eback = io::entropy_report_from_json(etext);
    CHECK(eback.scene_entropy.at("b") == 0.9);
    CHECK(eback.direction == "above-mean");
    REQUIRE(eback.kept.size() == 1);
    CHECK(io::entropy_report_to_json(eback) == etext);
}
