// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <array>

namespace gmot {

// Oriented 3D box: center in ego coordinates, size (w, l, h) all positive,
// yaw about +z. The footprint rectangle spans l along the heading and w
// across it.
struct Box3D {
    double x = 0.0, y = 0.0, z = 0.0;
    double w = 1.0, l = 1.0, h = 1.0;
    double yaw = 0.0;

    double volume() const { return w * l * h; }
};

// Maps any finite angle into [-pi, pi); -pi is kept at the boundary.
double wrap_angle(double theta);

// wrap_angle(a - b): the smallest signed difference, in [-pi, pi).
double signed_yaw_diff(double a, double b);

// Footprint corners in the x-y plane, counter-clockwise.
std::array<std::array<double, 2>, 4> footprint_corners(const Box3D& box);

// Intersection-over-union of the yaw-rotated footprints; height is ignored.
// Zero-area footprints are rejected; touching edges count as no overlap.
double bev_iou(const Box3D& a, const Box3D& b);

// Euclidean distance between the (x, y) centers.
double center_distance_xy(const Box3D& a, const Box3D& b);

}  // namespace gmot
