// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmot/geometry.hpp"
#include "gmot/rng.hpp"
#include "test_support.hpp"

using namespace gmot;

TEST_CASE("wrap_angle maps into [-pi, pi)") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(-M_PI));
    CHECK(wrap_angle(-1.5 * M_PI) == doctest::Approx(0.5 * M_PI));
    CHECK(wrap_angle(M_PI) == doctest::Approx(-M_PI));
    CHECK(wrap_angle(-M_PI) == doctest::Approx(-M_PI));
    CHECK_THROWS_AS(wrap_angle(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(wrap_angle(INFINITY), std::invalid_argument);
}

TEST_CASE("wrap_angle is 2pi-periodic") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = rng.uniform(-3.0, 3.0);
        const int k = static_cast<int>(rng.uniform_int(-10, 10));
        const double w = wrap_angle(theta + 2.0 * M_PI * k);
        CHECK(std::abs(w - wrap_angle(theta)) < 1e-9);
        CHECK(w >= -M_PI);
        CHECK(w < M_PI);
    }
}

TEST_CASE("signed_yaw_diff") {
    CHECK(signed_yaw_diff(0.3, 0.3) == doctest::Approx(0.0));
    CHECK(signed_yaw_diff(M_PI - 0.1, -(M_PI - 0.1)) == doctest::Approx(-0.2));
    CHECK(signed_yaw_diff(1.0, 0.25) == doctest::Approx(0.75));
    CHECK_THROWS_AS(signed_yaw_diff(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("bev_iou analytic cases") {
    const Box3D unit = test::box(0, 0, 2, 2, 0);
    CHECK(bev_iou(unit, unit) == doctest::Approx(1.0));

    const Box3D far_a = test::box(0, 0, 1, 1, 0);
    const Box3D far_b = test::box(100, 0, 1, 1, 0);
    CHECK(bev_iou(far_a, far_b) == doctest::Approx(0.0));

    // 2x2 squares offset by 1: intersection 2, union 6.
    const Box3D a = test::box(0, 0, 2, 2, 0);
    const Box3D b = test::box(1, 0, 2, 2, 0);
    CHECK(bev_iou(a, b) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("bev_iou rejects degenerate footprints") {
    Box3D bad = test::box(0, 0, 0.0, 1, 0);
    CHECK_THROWS_AS(bev_iou(bad, test::box(0, 0, 1, 1, 0)), std::invalid_argument);
    bad.w = -1.0;
    CHECK_THROWS_AS(bev_iou(bad, test::box(0, 0, 1, 1, 0)), std::invalid_argument);
}

TEST_CASE("bev_iou of touching boxes is zero") {
    const Box3D a = test::box(0, 0, 2, 2, 0);
    const Box3D b = test::box(2, 0, 2, 2, 0);  // shares the x=1 edge
    CHECK(bev_iou(a, b) == doctest::Approx(0.0));
}

TEST_CASE("bev_iou symmetry and range on random pairs") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const Box3D a = test::random_box(rng);
        const Box3D b = test::random_box(rng);
        const double ab = bev_iou(a, b);
        const double ba = bev_iou(b, a);
        CHECK(std::abs(ab - ba) < 1e-12);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("bev_iou invariant under rigid transforms") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        Box3D a = test::random_box(rng);
        Box3D b = test::random_box(rng);
        const double base = bev_iou(a, b);
        const double tx = rng.uniform(-20, 20);
        const double ty = rng.uniform(-20, 20);
        const double rot = rng.uniform(-M_PI, M_PI);
        auto transform = [&](Box3D box) {
            const double c = std::cos(rot), s = std::sin(rot);
            const double x = c * box.x - s * box.y + tx;
            const double y = s * box.x + c * box.y + ty;
            box.x = x;
            box.y = y;
            box.yaw = wrap_angle(box.yaw + rot);
            return box;
        };
        CHECK(std::abs(bev_iou(transform(a), transform(b)) - base) < 1e-9);
    }
}

TEST_CASE("bev_iou equals area ratio under containment") {
    const Box3D outer = test::box(0, 0, 4, 6, 0.3);
    Box3D inner = outer;
    inner.w = 2.0;
    inner.l = 3.0;
    CHECK(bev_iou(outer, inner) == doctest::Approx((2.0 * 3.0) / (4.0 * 6.0)));
}

TEST_CASE("bev_iou agrees with Monte-Carlo sampling") {
    // Smaller cousin of the acceptance-gate oracle.
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        Box3D a = test::random_box(rng);
        Box3D b = test::random_box(rng);
        // Keep the pair close enough to usually overlap.
        b.x = a.x + rng.uniform(-2.0, 2.0);
        b.y = a.y + rng.uniform(-2.0, 2.0);
        const double mc = test::monte_carlo_iou(a, b, 200000, 1234 + trial);
        CHECK(std::abs(bev_iou(a, b) - mc) < 5e-3);
    }
}

TEST_CASE("center_distance_xy") {
    CHECK(center_distance_xy(test::box(0, 0, 1, 1, 0), test::box(0, 0, 1, 1, 0)) ==
          doctest::Approx(0.0));
    CHECK(center_distance_xy(test::box(0, 0, 1, 1, 0), test::box(3, 4, 1, 1, 0)) ==
          doctest::Approx(5.0));
    CHECK(center_distance_xy(test::box(1, 1, 1, 1, 0), test::box(1, 2, 1, 1, 0)) ==
          doctest::Approx(1.0));
}
