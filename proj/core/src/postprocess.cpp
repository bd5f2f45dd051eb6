// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gmot {

namespace {
double lerp(double a, double b, double f) { return a + (b - a) * f; }
}  // namespace

Trajectory interpolate_gaps(const Trajectory& t) {
    if (t.states.empty()) throw std::invalid_argument("interpolate_gaps: empty trajectory");
    Trajectory out;
    out.track_id = t.track_id;
    out.class_id = t.class_id;
    out.states.push_back(t.states.front());
    for (size_t k = 1; k < t.states.size(); ++k) {
        const TrackState& a = t.states[k - 1];
        const TrackState& b = t.states[k];
        const int gap = b.frame - a.frame;
        const double dyaw = signed_yaw_diff(b.box.yaw, a.box.yaw);
        for (int f = a.frame + 1; f < b.frame; ++f) {
            const double r = static_cast<double>(f - a.frame) / gap;
            TrackState s;
            s.frame = f;
            s.t = lerp(a.t, b.t, r);
            s.box.x = lerp(a.box.x, b.box.x, r);
            s.box.y = lerp(a.box.y, b.box.y, r);
            s.box.z = lerp(a.box.z, b.box.z, r);
            s.box.w = lerp(a.box.w, b.box.w, r);
            s.box.l = lerp(a.box.l, b.box.l, r);
            s.box.h = lerp(a.box.h, b.box.h, r);
            s.box.yaw = wrap_angle(a.box.yaw + r * dyaw);
            s.vx = lerp(a.vx, b.vx, r);
            s.vy = lerp(a.vy, b.vy, r);
            s.score = lerp(a.score, b.score, r);
            out.states.push_back(s);
        }
        out.states.push_back(b);
    }
    return out;
}

double intra_track_bev_iou(const Trajectory& t, bool consecutive_only) {
    if (t.states.empty()) throw std::invalid_argument("intra_track_bev_iou: empty trajectory");
    double prod = 1.0;
    if (consecutive_only) {
        for (size_t k = 1; k < t.states.size(); ++k) {
            prod *= bev_iou(t.states[k - 1].box, t.states[k].box);
        }
        return prod;
    }
    for (size_t a = 0; a < t.states.size(); ++a) {
        for (size_t b = a + 1; b < t.states.size(); ++b) {
            prod *= bev_iou(t.states[a].box, t.states[b].box);
            if (prod == 0.0) return 0.0;
        }
    }
    return prod;
}

double circular_mean(const std::vector<double>& angles) {
    double sx = 0.0, sy = 0.0;
    for (double a : angles) {
        sx += std::cos(a);
        sy += std::sin(a);
    }
    return wrap_angle(std::atan2(sy, sx));
}

Trajectory correct_yaw_flips(const Trajectory& t, double still_iou_min) {
    if (t.states.empty()) return t;
    if (!(intra_track_bev_iou(t) > still_iou_min)) return t;

    auto circ_dist = [](double a, double b) { return std::abs(signed_yaw_diff(a, b)); };
    double c0 = t.states.front().box.yaw;
    double c1 = wrap_angle(c0 + M_PI);
    std::vector<int> assign(t.states.size(), 0);
    // Two-center k-means on the circle; the flip ambiguity is exactly pi.
    for (int iter = 0; iter < 16; ++iter) {
        bool changed = false;
        for (size_t k = 0; k < t.states.size(); ++k) {
            const double y = t.states[k].box.yaw;
            const int a = circ_dist(y, c0) <= circ_dist(y, c1) ? 0 : 1;
            if (a != assign[k]) {
                assign[k] = a;
                changed = true;
            }
        }
        std::vector<double> g0, g1;
        for (size_t k = 0; k < t.states.size(); ++k) {
            (assign[k] == 0 ? g0 : g1).push_back(t.states[k].box.yaw);
        }
        if (!g0.empty()) c0 = circular_mean(g0);
        if (!g1.empty()) c1 = circular_mean(g1);
        if (!changed && iter > 0) break;
    }
    size_t n0 = 0;
    for (int a : assign) n0 += (a == 0);
    const size_t n1 = assign.size() - n0;
    // Majority regime wins; a tie keeps the regime of the first state.
    const int winner = n0 >= n1 ? 0 : 1;
    std::vector<double> major;
    for (size_t k = 0; k < t.states.size(); ++k) {
        if (assign[k] == winner) major.push_back(t.states[k].box.yaw);
    }
    const double yaw = circular_mean(major);
    Trajectory out = t;
    for (TrackState& s : out.states) s.box.yaw = yaw;
    return out;
}

namespace {

Box3D mean_pose_box(const Trajectory& t) {
    Box3D m;
    m.x = m.y = m.z = m.w = m.l = m.h = 0.0;
    std::vector<double> yaws;
    for (const TrackState& s : t.states) {
        m.x += s.box.x;
        m.y += s.box.y;
        m.z += s.box.z;
        m.w += s.box.w;
        m.l += s.box.l;
        m.h += s.box.h;
        yaws.push_back(s.box.yaw);
    }
    const double n = static_cast<double>(t.states.size());
    m.x /= n;
    m.y /= n;
    m.z /= n;
    m.w /= n;
    m.l /= n;
    m.h /= n;
    m.yaw = circular_mean(yaws);
    return m;
}

bool frames_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
    for (int f : a) {
        if (std::binary_search(b.begin(), b.end(), f)) return false;
    }
    return true;
}

}  // namespace

TrajectorySet join_still_tracks(const TrajectorySet& ts, double still_iou_min,
                                double join_iou_min) {
    const size_t n = ts.tracks.size();
    std::vector<uint8_t> still(n, 0);
    std::vector<Box3D> mean_pose(n);
    std::vector<std::vector<int>> frames(n);
    for (size_t k = 0; k < n; ++k) {
        still[k] = intra_track_bev_iou(ts.tracks[k]) > still_iou_min;
        mean_pose[k] = mean_pose_box(ts.tracks[k]);
        for (const TrackState& s : ts.tracks[k].states) frames[k].push_back(s.frame);
        std::sort(frames[k].begin(), frames[k].end());
    }

    // Candidate pairs gated on the original tracks.
    struct Pair {
        size_t a, b;
    };
    std::vector<Pair> pairs;
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = a + 1; b < n; ++b) {
            if (ts.tracks[a].class_id != ts.tracks[b].class_id) continue;
            if (!still[a] || !still[b]) continue;
            if (!frames_disjoint(frames[a], frames[b])) continue;
            if (!(bev_iou(mean_pose[a], mean_pose[b]) > join_iou_min)) continue;
            pairs.push_back({a, b});
        }
    }

    // Sequential merging in ascending pair order; a merge is skipped when
    // the accumulated groups already share a frame.
    std::vector<size_t> group(n);
    std::iota(group.begin(), group.end(), 0);
    std::vector<std::vector<int>> group_frames = frames;
    auto root = [&group](size_t x) {
        while (group[x] != x) x = group[x];
        return x;
    };
    for (const Pair& p : pairs) {
        const size_t ra = root(p.a);
        const size_t rb = root(p.b);
        if (ra == rb) continue;
        if (!frames_disjoint(group_frames[ra], group_frames[rb])) continue;
        const size_t keep = std::min(ra, rb);
        const size_t drop = std::max(ra, rb);
        group[drop] = keep;
        std::vector<int> merged;
        std::merge(group_frames[keep].begin(), group_frames[keep].end(),
                   group_frames[drop].begin(), group_frames[drop].end(),
                   std::back_inserter(merged));
        group_frames[keep] = std::move(merged);
    }

    // Materialize merged tracks; the earliest-starting member donates the id.
    std::map<size_t, std::vector<size_t>> members;
    for (size_t k = 0; k < n; ++k) members[root(k)].push_back(k);
    TrajectorySet out;
    for (const auto& [r, list] : members) {
        size_t lead = list.front();
        for (size_t k : list) {
            if (ts.tracks[k].states.front().frame < ts.tracks[lead].states.front().frame ||
                (ts.tracks[k].states.front().frame == ts.tracks[lead].states.front().frame &&
                 ts.tracks[k].track_id < ts.tracks[lead].track_id)) {
                lead = k;
            }
        }
        Trajectory merged;
        merged.track_id = ts.tracks[lead].track_id;
        merged.class_id = ts.tracks[lead].class_id;
        for (size_t k : list) {
            merged.states.insert(merged.states.end(), ts.tracks[k].states.begin(),
                                 ts.tracks[k].states.end());
        }
        std::sort(merged.states.begin(), merged.states.end(),
                  [](const TrackState& a, const TrackState& b) { return a.frame < b.frame; });
        out.tracks.push_back(std::move(merged));
    }
    std::sort(out.tracks.begin(), out.tracks.end(),
              [](const Trajectory& a, const Trajectory& b) { return a.track_id < b.track_id; });
    return out;
}

Trajectory smooth_track(const Trajectory& t, int window, const std::vector<double>& weights) {
    if (window < 1 || window % 2 == 0 || static_cast<int>(weights.size()) != window) {
        throw std::invalid_argument("smooth_track: window must be odd and match the kernel size");
    }
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw std::invalid_argument("smooth_track: kernel weights must sum to 1");
    }
    const int half = window / 2;
    const int n = static_cast<int>(t.states.size());
    Trajectory out = t;
    for (int k = 0; k < n; ++k) {
        double acc[4] = {0, 0, 0, 0};  // x, y, z, (vx, vy handled below)
        double vxa = 0.0, vya = 0.0, used = 0.0;
        for (int o = -half; o <= half; ++o) {
            const int idx = k + o;
            if (idx < 0 || idx >= n) continue;
            const double w = weights[o + half];
            used += w;
            acc[0] += w * t.states[idx].box.x;
            acc[1] += w * t.states[idx].box.y;
            acc[2] += w * t.states[idx].box.z;
            vxa += w * t.states[idx].vx;
            vya += w * t.states[idx].vy;
        }
        out.states[k].box.x = acc[0] / used;
        out.states[k].box.y = acc[1] / used;
        out.states[k].box.z = acc[2] / used;
        out.states[k].vx = vxa / used;
        out.states[k].vy = vya / used;
    }
    return out;
}

TrajectorySet postprocess(const TrajectorySet& ts, const PostprocessOptions& opts) {
    TrajectorySet out;
    out.tracks.reserve(ts.tracks.size());
    for (const Trajectory& t : ts.tracks) {
        Trajectory cur = t;
        if (opts.interpolate) cur = interpolate_gaps(cur);
        if (opts.fix_yaw_flips) cur = correct_yaw_flips(cur, opts.still_iou_min);
        out.tracks.push_back(std::move(cur));
    }
    if (opts.join_still) out = join_still_tracks(out, opts.still_iou_min, opts.join_iou_min);
    if (opts.smooth) {
        for (Trajectory& t : out.tracks) t = smooth_track(t, opts.smooth_window, opts.smooth_weights);
    }
    return out;
}

}  // namespace gmot
