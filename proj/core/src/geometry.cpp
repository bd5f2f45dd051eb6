// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gmot/errors.hpp"

namespace gmot {

double wrap_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    // std::remainder lands in [-pi, pi]; fold the closed upper boundary.
    double w = std::remainder(theta, 2.0 * M_PI);
    if (w >= M_PI) w -= 2.0 * M_PI;
    return w;
}

double signed_yaw_diff(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("signed_yaw_diff: non-finite angle");
    }
    return wrap_angle(a - b);
}

std::array<std::array<double, 2>, 4> footprint_corners(const Box3D& box) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const double hl = 0.5 * box.l;
    const double hw = 0.5 * box.w;
    // Local corners (l along heading, w across), counter-clockwise.
    const double lx[4] = {hl, -hl, -hl, hl};
    const double ly[4] = {hw, hw, -hw, -hw};
    std::array<std::array<double, 2>, 4> out{};
    for (int i = 0; i < 4; ++i) {
        out[i][0] = box.x + c * lx[i] - s * ly[i];
        out[i][1] = box.y + s * lx[i] + c * ly[i];
    }
    return out;
}

namespace {

using Poly = std::vector<std::array<double, 2>>;

// Signed area via the shoelace formula; positive for counter-clockwise.
double shoelace(const Poly& p) {
    double a = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % n];
        a += u[0] * v[1] - v[0] * u[1];
    }
    return 0.5 * a;
}

// Sutherland-Hodgman: clip a convex polygon against the half-plane left of
// the directed edge (e0 -> e1).
Poly clip_halfplane(const Poly& poly, const std::array<double, 2>& e0,
                    const std::array<double, 2>& e1) {
    Poly out;
    const size_t n = poly.size();
    if (n == 0) return out;
    const double ex = e1[0] - e0[0];
    const double ey = e1[1] - e0[1];
    auto side = [&](const std::array<double, 2>& p) {
        return ex * (p[1] - e0[1]) - ey * (p[0] - e0[0]);
    };
    for (size_t i = 0; i < n; ++i) {
        const auto& cur = poly[i];
        const auto& nxt = poly[(i + 1) % n];
        const double sc = side(cur);
        const double sn = side(nxt);
        if (sc >= 0.0) out.push_back(cur);
        if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
        }
    }
    return out;
}

double convex_intersection_area(const std::array<std::array<double, 2>, 4>& a,
                                const std::array<std::array<double, 2>, 4>& b) {
    Poly poly(a.begin(), a.end());
    for (int i = 0; i < 4 && !poly.empty(); ++i) {
        poly = clip_halfplane(poly, b[i], b[(i + 1) % 4]);
    }
    if (poly.size() < 3) return 0.0;
    return std::abs(shoelace(poly));
}

void check_footprint(const Box3D& box, const char* who) {
    if (!(box.w > 0.0) || !(box.l > 0.0) || !std::isfinite(box.w) || !std::isfinite(box.l) ||
        !std::isfinite(box.x) || !std::isfinite(box.y) || !std::isfinite(box.yaw)) {
        throw std::invalid_argument(std::string(who) + ": degenerate or non-finite footprint");
    }
}

}  // namespace

double bev_iou(const Box3D& a, const Box3D& b) {
    check_footprint(a, "bev_iou");
    check_footprint(b, "bev_iou");
    const auto ca = footprint_corners(a);
    const auto cb = footprint_corners(b);
    const double inter = convex_intersection_area(ca, cb);
    const double area_a = a.w * a.l;
    const double area_b = b.w * b.l;
    const double uni = area_a + area_b - inter;
    double iou = inter / uni;
    if (iou < 0.0) iou = 0.0;
    if (iou > 1.0) iou = 1.0;
    return iou;
}

double center_distance_xy(const Box3D& a, const Box3D& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace gmot
