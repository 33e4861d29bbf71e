// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "recap/frame_io.hpp"
#include "recap/harness.hpp"
#include "support/tmpdir.hpp"

using namespace recap;
using recap::testing::TempDir;

TEST_CASE("luma of black, white and pure red frames") {
    CHECK(rgb_to_luma(RgbImage(4, 3, {0, 0, 0})) == LumaPlane(4, 3, 0));
    CHECK(rgb_to_luma(RgbImage(4, 3, {255, 255, 255})) == LumaPlane(4, 3, 255));

    const RgbImage red(5, 2, {255, 0, 0});
    const auto plane = rgb_to_luma(red);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 5; ++x) {
            const Rgb c = red.at(x, y);
            const double expect = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
            CHECK(plane.at(x, y) == static_cast<int>(std::lround(expect)));
        }
    CHECK(plane.at(0, 0) == 76);
}

TEST_CASE("luma matches the weighted sum on random pixels") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> d(0, 255);
    RgbImage img(31, 17);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            img.set(x, y, {static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng)),
                           static_cast<std::uint8_t>(d(rng))});
    const auto plane = rgb_to_luma(img);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img.at(x, y);
            const double v = (299.0 * c.r + 587.0 * c.g + 114.0 * c.b) / 1000.0;
            CHECK(plane.at(x, y) == static_cast<int>(std::floor(v + 0.5)));
        }
}

TEST_CASE("downsample") {
    SUBCASE("factor 1 is the identity") {
        std::mt19937 rng(1);
        LumaPlane p(9, 5);
        for (auto& v : p.values()) v = static_cast<std::uint8_t>(rng() % 256);
        CHECK(downsample(p, 1) == p);
    }
    SUBCASE("constant plane stays constant") { CHECK(downsample(LumaPlane(4, 4, 100), 2) == LumaPlane(2, 2, 100)); }
    SUBCASE("block means, rounded half up") {
        std::mt19937 rng(11);
        LumaPlane p(8, 8);
        for (auto& v : p.values()) v = static_cast<std::uint8_t>(rng() % 256);
        const auto d = downsample(p, 2);
        REQUIRE(d.width() == 4);
        REQUIRE(d.height() == 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                const double mean = (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                                     p.at(2 * x + 1, 2 * y + 1)) /
                                    4.0;
                CHECK(d.at(x, y) == static_cast<int>(std::floor(mean + 0.5)));
            }
    }
    SUBCASE("bad factors") {
        CHECK_THROWS_AS(downsample(LumaPlane(4, 4), 0), std::invalid_argument);
        CHECK_THROWS_AS(downsample(LumaPlane(4, 4), 5), std::invalid_argument);
    }
}

TEST_CASE("frame timestamps round half away from zero") {
    CHECK(frame_timestamp_ms(0, 30) == 0);
    CHECK(frame_timestamp_ms(1, 30) == 33);
    CHECK(frame_timestamp_ms(2, 30) == 67);
    CHECK(frame_timestamp_ms(30, 30) == 1000);
    CHECK(frame_timestamp_ms(1, 8) == 125);
}

TEST_CASE("recording from rasters") {
    std::vector<RgbImage> frames(300, RgbImage(6, 4, {1, 2, 3}));
    const Recording rec(std::move(frames), 30);
    CHECK(rec.size() == 300);
    CHECK(rec.duration_s() == doctest::Approx(10.0));
    CHECK(rec.frame(299).index == 299);
    CHECK(rec.frame(30).timestamp_ms == 1000);

    CHECK_THROWS_AS(Recording({}, 30), RecordingError);
    CHECK_THROWS_AS(Recording({RgbImage(2, 2)}, 0), RecordingError);
    CHECK_THROWS_AS(Recording({RgbImage(2, 2), RgbImage(3, 2)}, 30), RecordingError);
}

TEST_CASE("png round trip and directory loading") {
    TempDir dir("frameio");
    std::vector<RgbImage> frames;
    for (int i = 0; i < 3; ++i) {
        RgbImage img(7, 5, {static_cast<std::uint8_t>(10 * i), 20, 30});
        img.set(i, i, {255, 0, 128});
        frames.push_back(img);
    }
    const auto paths = write_recording(dir.path(), frames, 25);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].filename() == "frame_000001.png");
    const Recording rec = load_recording(dir.path());
    CHECK(rec.fps() == 25);
    REQUIRE(rec.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(rec.frame(i).pixels == frames[i]);
        CHECK(rec.frame(i).source == paths[i]);
    }
    CHECK(load_recording(dir.path(), 10.0).fps() == 10);
}

TEST_CASE("single frame recording") {
    TempDir dir("single");
    write_recording(dir.path(), {RgbImage(4, 4)}, 30);
    CHECK(load_recording(dir.path()).size() == 1);
}

TEST_CASE("bad recording directories") {
    TempDir dir("bad");
    CHECK_THROWS_AS(load_recording(dir / "missing"), RecordingError);
    CHECK_THROWS_AS(load_recording(dir.path()), RecordingError);  // no manifest
    recap::testing::spit(dir / "manifest.json", R"({"fps": 30})");
    CHECK_THROWS_AS(load_recording(dir.path()), RecordingError);  // no frames
    recap::testing::spit(dir / "manifest.json", "{not json");
    CHECK_THROWS_AS(load_recording(dir.path()), RecordingError);
    recap::testing::spit(dir / "manifest.json", R"({"fps": 30})");
    recap::testing::spit(dir / "frame_000001.png", "not a png");
    CHECK_THROWS_AS(load_recording(dir.path()), RecordingError);
}

TEST_CASE("harness session loads with the frame count from its trace") {
    SessionScript s = random_script(5);
    s.actions.resize(1);
    const auto g = generate_recording(s, 5);
    TempDir dir("session");
    write_session(dir.path(), g, s);
    const Recording rec = load_recording(dir.path());
    CHECK(rec.size() == g.trace.frame_count);
    CHECK(rec.width() == g.trace.width);
    CHECK(rec.height() == g.trace.height);
}

TEST_CASE("automatic analysis factor") {
    CHECK(auto_downsample_factor(360) == 1);
    CHECK(auto_downsample_factor(720) == 1);
    CHECK(auto_downsample_factor(1080) == 2);
}
