// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace gmot {

std::vector<double> encode_node_3dpm(const Detection3D& det, int class_count) {
    if (det.class_id < 0 || det.class_id >= class_count) {
        throw std::invalid_argument("encode_node_3dpm: class_id " + std::to_string(det.class_id) +
                                    " out of range [0, " + std::to_string(class_count) + ")");
    }
    std::vector<double> f;
    f.reserve(11 + class_count);
    f.push_back(det.box.x);
    f.push_back(det.box.y);
    f.push_back(det.box.z);
    f.push_back(det.box.w);
    f.push_back(det.box.l);
    f.push_back(det.box.h);
    f.push_back(det.box.yaw);
    f.push_back(det.vx);
    f.push_back(det.vy);
    for (int c = 0; c < class_count; ++c) f.push_back(c == det.class_id ? 1.0 : 0.0);
    f.push_back(det.score);
    f.push_back(det.t);
    return f;
}

std::vector<double> encode_edge_raw(const Detection3D& det_j, const Detection3D& det_i) {
    if (!(det_j.t < det_i.t)) {
        throw std::invalid_argument("encode_edge_raw: edge must be time-forward (t_j < t_i)");
    }
    const double dx = det_j.box.x - det_i.box.x;
    const double dy = det_j.box.y - det_i.box.y;
    const double dz = det_j.box.z - det_i.box.z;
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double dv = std::hypot(det_j.vx - det_i.vx, det_j.vy - det_i.vy);
    const double dyaw = signed_yaw_diff(det_j.box.yaw, det_i.box.yaw);
    const double ds = std::log(det_j.box.volume() / det_i.box.volume());
    const double dt = det_i.t - det_j.t;
    return {dist, dv, dyaw, ds, dt};
}

}  // namespace gmot
