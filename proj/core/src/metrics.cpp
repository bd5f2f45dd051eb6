// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace gmot {

double ClearMotCounts::mota() const {
    if (gt_total == 0) throw std::invalid_argument("mota: undefined for empty ground truth");
    return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt_total);
}

Assignment hungarian_assign(const std::vector<std::vector<double>>& cost) {
    Assignment result;
    const int rows = static_cast<int>(cost.size());
    const int cols = rows ? static_cast<int>(cost[0].size()) : 0;
    if (rows == 0 || cols == 0) return result;
    for (const auto& r : cost) {
        if (static_cast<int>(r.size()) != cols) {
            throw std::invalid_argument("hungarian_assign: ragged cost matrix");
        }
        for (double c : r) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("hungarian_assign: costs must be finite");
            }
        }
    }

    // Square padding with zero-cost dummies; every perfect matching uses
    // exactly min(rows, cols) real pairs, so padding does not bias them.
    const int n = std::max(rows, cols);
    auto at = [&](int i, int j) -> double {
        return (i < rows && j < cols) ? cost[i][j] : 0.0;
    };

    // Shortest augmenting path assignment with potentials (1-based).
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 1; j <= n; ++j) {
        const int i = p[j];
        if (i >= 1 && i <= rows && j <= cols) {
            result.pairs.emplace_back(i - 1, j - 1);
            result.total_cost += cost[i - 1][j - 1];
        }
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

FrameMatchResult match_frame(const std::vector<FrameObject>& preds,
                             const std::vector<FrameObject>& gts, const MatchGate& gate,
                             const std::map<int, int>& prev_match) {
    FrameMatchResult out;
    auto gated_dist = [&](const FrameObject& p, const FrameObject& g) {
        if (gate.require_class && p.class_id != g.class_id) return kDisallowedCost;
        const double d = std::hypot(p.x - g.x, p.y - g.y);
        return d <= gate.max_dist ? d : kDisallowedCost;
    };

    std::vector<char> pred_used(preds.size(), false), gt_used(gts.size(), false);

    // Continuity: keep previous-frame pairs that still pass the gate.
    for (size_t gi = 0; gi < gts.size(); ++gi) {
        auto it = prev_match.find(gts[gi].id);
        if (it == prev_match.end()) continue;
        for (size_t pi = 0; pi < preds.size(); ++pi) {
            if (pred_used[pi] || preds[pi].id != it->second) continue;
            if (gated_dist(preds[pi], gts[gi]) < kDisallowedCost) {
                out.matches.emplace_back(static_cast<int>(pi), static_cast<int>(gi));
                pred_used[pi] = true;
                gt_used[gi] = true;
            }
            break;
        }
    }

    std::vector<int> free_pred, free_gt;
    for (size_t pi = 0; pi < preds.size(); ++pi) {
        if (!pred_used[pi]) free_pred.push_back(static_cast<int>(pi));
    }
    for (size_t gi = 0; gi < gts.size(); ++gi) {
        if (!gt_used[gi]) free_gt.push_back(static_cast<int>(gi));
    }
    if (!free_pred.empty() && !free_gt.empty()) {
        std::vector<std::vector<double>> cost(free_pred.size(),
                                              std::vector<double>(free_gt.size()));
        for (size_t a = 0; a < free_pred.size(); ++a) {
            for (size_t b = 0; b < free_gt.size(); ++b) {
                cost[a][b] = gated_dist(preds[free_pred[a]], gts[free_gt[b]]);
            }
        }
        const Assignment asg = hungarian_assign(cost);
        for (const auto& [a, b] : asg.pairs) {
            if (cost[a][b] >= kDisallowedCost) continue;
            out.matches.emplace_back(free_pred[a], free_gt[b]);
            pred_used[free_pred[a]] = true;
            gt_used[free_gt[b]] = true;
        }
    }
    for (size_t pi = 0; pi < preds.size(); ++pi) {
        if (!pred_used[pi]) out.unmatched_pred.push_back(static_cast<int>(pi));
    }
    for (size_t gi = 0; gi < gts.size(); ++gi) {
        if (!gt_used[gi]) out.unmatched_gt.push_back(static_cast<int>(gi));
    }
    std::sort(out.matches.begin(), out.matches.end());
    return out;
}

namespace {

struct GtTrackTrace {
    int last_matched_frame = std::numeric_limits<int>::min();
    int last_pred_id = -1;
    bool ever_matched = false;
};

void accumulate_scene(ClearMotCounts& acc, const TrajectorySet& pred,
                      const std::vector<GtTrack>& gt, const MatchGate& gate) {
    // Frame-major views.
    std::map<int, std::vector<FrameObject>> pred_by_frame, gt_by_frame;
    for (const Trajectory& t : pred.tracks) {
        for (const TrackState& s : t.states) {
            pred_by_frame[s.frame].push_back({t.track_id, t.class_id, s.box.x, s.box.y});
        }
    }
    for (size_t g = 0; g < gt.size(); ++g) {
        for (const TrackState& s : gt[g].states) {
            gt_by_frame[s.frame].push_back({static_cast<int>(g), gt[g].class_id, s.box.x, s.box.y});
            ++acc.gt_total;
        }
    }

    std::set<int> frames;
    for (const auto& [f, v] : pred_by_frame) frames.insert(f);
    for (const auto& [f, v] : gt_by_frame) frames.insert(f);

    std::vector<GtTrackTrace> trace(gt.size());
    std::set<int> matched_pred_tracks;
    std::map<int, int> prev_match;  // gt index -> pred track id

    static const std::vector<FrameObject> kEmpty;
    for (int f : frames) {
        auto pit = pred_by_frame.find(f);
        auto git = gt_by_frame.find(f);
        const auto& preds = pit != pred_by_frame.end() ? pit->second : kEmpty;
        const auto& gts = git != gt_by_frame.end() ? git->second : kEmpty;
        const FrameMatchResult m = match_frame(preds, gts, gate, prev_match);

        acc.fp += static_cast<long>(m.unmatched_pred.size());
        acc.fn += static_cast<long>(m.unmatched_gt.size());
        prev_match.clear();
        for (const auto& [pi, gi] : m.matches) {
            const FrameObject& p = preds[pi];
            const FrameObject& g = gts[gi];
            ++acc.matches;
            acc.dist_sum += std::hypot(p.x - g.x, p.y - g.y);
            matched_pred_tracks.insert(p.id);

            GtTrackTrace& tr = trace[g.id];
            if (tr.ever_matched && tr.last_matched_frame == f - 1 && tr.last_pred_id != p.id) {
                ++acc.ids;
            }
            if (tr.ever_matched && tr.last_matched_frame < f - 1) ++acc.frag;
            tr.ever_matched = true;
            tr.last_matched_frame = f;
            tr.last_pred_id = p.id;
            prev_match[g.id] = p.id;
        }
    }
    for (const Trajectory& t : pred.tracks) {
        if (!matched_pred_tracks.count(t.track_id)) ++acc.fp_tracks;
    }
}

}  // namespace

ClearMotCounts clear_mot(const std::vector<ScenePair>& scenes, const MatchGate& gate) {
    ClearMotCounts acc;
    for (const ScenePair& s : scenes) accumulate_scene(acc, *s.pred, *s.gt, gate);
    if (acc.gt_total == 0) {
        throw std::invalid_argument("clear_mot: empty ground truth, MOTA undefined");
    }
    return acc;
}

ClearMotCounts clear_mot(const TrajectorySet& pred, const std::vector<GtTrack>& gt,
                         const MatchGate& gate) {
    return clear_mot(std::vector<ScenePair>{{&pred, &gt}}, gate);
}

AmotaResult amota(const std::vector<ScenePair>& scenes, const MatchGate& gate, int sweep_points) {
    long gt_total = 0;
    for (const ScenePair& s : scenes) {
        for (const GtTrack& t : *s.gt) gt_total += static_cast<long>(t.states.size());
    }
    if (gt_total == 0) throw std::invalid_argument("amota: empty ground truth");

    // Distinct confidences, descending.
    std::set<double, std::greater<double>> conf_set;
    for (const ScenePair& s : scenes) {
        for (const Trajectory& t : s.pred->tracks) conf_set.insert(t.confidence());
    }
    const std::vector<double> thresholds(conf_set.begin(), conf_set.end());

    struct CurvePoint {
        double threshold;
        ClearMotCounts counts;
    };
    std::vector<CurvePoint> curve;
    std::vector<TrajectorySet> filtered(scenes.size());
    for (double th : thresholds) {
        for (size_t s = 0; s < scenes.size(); ++s) {
            filtered[s].tracks.clear();
            for (const Trajectory& t : scenes[s].pred->tracks) {
                if (t.confidence() >= th) filtered[s].tracks.push_back(t);
            }
        }
        std::vector<ScenePair> pairs;
        for (size_t s = 0; s < scenes.size(); ++s) pairs.push_back({&filtered[s], scenes[s].gt});
        curve.push_back({th, clear_mot(pairs, gate)});
    }

    AmotaResult out;
    double motar_sum = 0.0;
    double motp_sum = 0.0;
    int achievable = 0;
    const double p_total = static_cast<double>(gt_total);
    for (int k = 1; k <= sweep_points; ++k) {
        SweepPoint pt;
        pt.target_recall = static_cast<double>(k) / sweep_points;
        // Smallest inclusion set (largest threshold) reaching the target.
        for (const CurvePoint& c : curve) {
            if (c.counts.recall() >= pt.target_recall) {
                pt.achievable = true;
                pt.threshold = c.threshold;
                pt.achieved_recall = c.counts.recall();
                pt.fp = c.counts.fp;
                pt.fn = c.counts.fn;
                pt.ids = c.counts.ids;
                pt.motp = c.counts.motp();
                // MOTAR at the achieved recall r*: the FN term of the
                // sweep formula cancels identically (FN = (1 - r*) P), so
                // the error mass reduces to IDS + FP and the score stays
                // in [0, 1] without clamping artifacts from overshooting
                // a coarse track-level threshold grid.
                const double r_star = pt.achieved_recall;
                const double raw =
                    1.0 - static_cast<double>(pt.ids + pt.fp) / (r_star * p_total);
                pt.motar = std::clamp(raw, 0.0, 1.0);
                break;
            }
        }
        if (pt.achievable) {
            motar_sum += pt.motar;
            motp_sum += pt.motp;
            ++achievable;
        }
        out.sweep.push_back(pt);
    }
    out.amota = motar_sum / static_cast<double>(sweep_points);
    out.amotp = achievable ? motp_sum / static_cast<double>(achievable) : 0.0;
    return out;
}

double binary_average_precision(const std::vector<double>& scores,
                                const std::vector<int8_t>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("binary_average_precision: size mismatch");
    }
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    long npos = 0;
    for (int8_t y : labels) npos += (y == 1);
    if (npos == 0) return 0.0;
    double ap = 0.0;
    long tp = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        if (labels[order[rank]] == 1) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(rank + 1);
        }
    }
    return ap / static_cast<double>(npos);
}

namespace {

ClassMetrics to_class_metrics(const ClearMotCounts& c, const AmotaResult& a) {
    ClassMetrics m;
    m.mota = c.mota();
    m.motp = c.motp();
    m.recall = c.recall();
    m.fp = c.fp;
    m.fn = c.fn;
    m.ids = c.ids;
    m.frag = c.frag;
    m.gt_total = c.gt_total;
    m.amota = a.amota;
    m.amotp = a.amotp;
    return m;
}

}  // namespace

MetricsReport evaluate_tracking(const std::vector<ScenePair>& scenes, const MatchGate& gate,
                                int sweep_points) {
    MetricsReport report;
    const ClearMotCounts overall = clear_mot(scenes, gate);
    const AmotaResult overall_amota = amota(scenes, gate, sweep_points);
    report.overall = to_class_metrics(overall, overall_amota);
    report.sweep = overall_amota.sweep;

    std::set<int> classes;
    for (const ScenePair& s : scenes) {
        for (const GtTrack& t : *s.gt) classes.insert(t.class_id);
    }
    for (int cls : classes) {
        std::vector<TrajectorySet> preds(scenes.size());
        std::vector<std::vector<GtTrack>> gts(scenes.size());
        std::vector<ScenePair> pairs;
        for (size_t s = 0; s < scenes.size(); ++s) {
            for (const Trajectory& t : scenes[s].pred->tracks) {
                if (t.class_id == cls) preds[s].tracks.push_back(t);
            }
            for (const GtTrack& t : *scenes[s].gt) {
                if (t.class_id == cls) gts[s].push_back(t);
            }
            pairs.push_back({&preds[s], &gts[s]});
        }
        report.per_class[cls] =
            to_class_metrics(clear_mot(pairs, gate), amota(pairs, gate, sweep_points));
    }
    return report;
}

}  // namespace gmot
