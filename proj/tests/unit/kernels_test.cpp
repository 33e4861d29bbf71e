// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "recap/kernels.hpp"
#include "support/oracles.hpp"

using namespace recap;
using recap::testing::naive_ssim;
using recap::testing::random_plane;

namespace {

LumaPlane with_box(LumaPlane p, int x0, int y0, int w, int h, std::uint8_t v) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) p.at(x, y) = v;
    return p;
}

LumaPlane shift_rows(const LumaPlane& src, int dy, std::uint8_t fill) {
    LumaPlane out(src.width(), src.height(), fill);
    for (int y = 0; y < src.height(); ++y) {
        const int from = y + dy;
        if (from < 0 || from >= src.height()) continue;
        for (int x = 0; x < src.width(); ++x) out.at(x, y) = src.at(x, from);
    }
    return out;
}

}  // namespace

TEST_CASE("ssim of a plane with itself is exactly one") {
    std::mt19937 rng(1);
    const auto a = random_plane(40, 30, rng);
    CHECK(ssim(a, a) == 1.0);
    CHECK(ssim_serial(a, a) == 1.0);
}

TEST_CASE("ssim of black against white is the closed-form constant") {
    const LumaPlane black(20, 20, 0), white(20, 20, 255);
    const SsimParams p;
    const double expect = p.c1 / (255.0 * 255.0 + p.c1);
    CHECK(ssim(black, white) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ssim(black, white) < 0.01);
}

TEST_CASE("ssim is symmetric") {
    std::mt19937 rng(2);
    for (int i = 0; i < 5; ++i) {
        const auto a = random_plane(33, 21, rng), b = random_plane(33, 21, rng);
        CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-12);
    }
}

TEST_CASE("ssim matches the naive reference") {
    std::mt19937 rng(4);
    SUBCASE("random planes") {
        for (int i = 0; i < 6; ++i) {
            const int w = 7 + static_cast<int>(rng() % 50), h = 7 + static_cast<int>(rng() % 50);
            const auto a = random_plane(w, h, rng), b = random_plane(w, h, rng);
            const double ref = naive_ssim(a, b);
            CHECK(std::abs(ssim(a, b) - ref) <= 1e-9);
            CHECK(std::abs(ssim_serial(a, b) - ref) <= 1e-9);
        }
    }
    SUBCASE("one 40x40 button differs on a full-size frame") {
        LumaPlane base(360, 640, 250);
        base = with_box(base, 24, 200, 312, 44, 120);
        const auto pressed = with_box(base, 160, 300, 40, 40, 30);
        const double ref = naive_ssim(base, pressed);
        CHECK(ref < 1.0);
        CHECK(std::abs(ssim(base, pressed) - ref) <= 1e-9);
    }
}

TEST_CASE("ssim argument checks") {
    CHECK_THROWS_AS(ssim(LumaPlane(10, 10), LumaPlane(10, 11)), DimensionMismatch);
    SsimParams even;
    even.window = 4;
    CHECK_THROWS_AS(ssim(LumaPlane(10, 10), LumaPlane(10, 10), even), std::invalid_argument);
    CHECK_THROWS_AS(ssim(LumaPlane(5, 5), LumaPlane(5, 5)), std::invalid_argument);
}

TEST_CASE("strip matching finds a vertical shift") {
    std::mt19937 rng(9);
    const auto prev = random_plane(60, 200, rng);
    for (int dy : {0, 7, -12, 33}) {
        const auto cur = shift_rows(prev, dy, 0);
        const auto m = match_strips(prev, cur, 10, 60);
        REQUIRE(m.size() == 10);
        int agree = 0;
        for (const auto& s : m) {
            CHECK(s.textured);
            if (s.displacement == dy && s.correlation > 0.999) ++agree;
        }
        // Strips pushed off the frame cannot match; the rest must.
        CHECK(agree >= 8);
        const auto serial = match_strips_serial(prev, cur, 10, 60);
        REQUIRE(serial.size() == m.size());
        for (std::size_t k = 0; k < m.size(); ++k) {
            CHECK(serial[k].displacement == m[k].displacement);
            CHECK(serial[k].correlation == m[k].correlation);
        }
    }
}

TEST_CASE("flat strips are untextured") {
    const LumaPlane flat(30, 100, 128);
    const auto m = match_strips(flat, flat, 5, 10);
    for (const auto& s : m) CHECK_FALSE(s.textured);
}

TEST_CASE("strip matching argument checks") {
    CHECK_THROWS_AS(match_strips(LumaPlane(10, 10), LumaPlane(10, 12), 2, 1), DimensionMismatch);
    CHECK_THROWS_AS(match_strips(LumaPlane(10, 10), LumaPlane(10, 10), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(match_strips(LumaPlane(10, 10), LumaPlane(10, 10), 2, -1), std::invalid_argument);
}
