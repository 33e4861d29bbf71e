// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/frame_io.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace recap {

long frame_timestamp_ms(int index, double fps) {
    return std::lround(index * 1000.0 / fps);
}

Recording::Recording(std::vector<RgbImage> rasters, double fps, std::vector<fs::path> sources)
    : fps_(fps) {
    if (!(fps > 0)) throw RecordingError("fps must be positive");
    if (rasters.empty()) throw RecordingError("recording has zero frames");
    if (!sources.empty() && sources.size() != rasters.size())
        throw RecordingError("source path count does not match frame count");
    width_ = rasters.front().width();
    height_ = rasters.front().height();
    frames_.reserve(rasters.size());
    for (std::size_t i = 0; i < rasters.size(); ++i) {
        if (rasters[i].width() != width_ || rasters[i].height() != height_)
            throw RecordingError("inconsistent frame dimensions at frame " + std::to_string(i));
        Frame f;
        f.index = static_cast<int>(i);
        f.timestamp_ms = frame_timestamp_ms(f.index, fps);
        f.pixels = std::move(rasters[i]);
        if (!sources.empty()) f.source = sources[i];
        frames_.push_back(std::move(f));
    }
}

LumaPlane rgb_to_luma(const RgbImage& image) {
    LumaPlane out(image.width(), image.height());
    const auto src = image.bytes();
    auto dst = out.values();
    for (std::size_t i = 0, p = 0; i < dst.size(); ++i, p += 3) {
        // Integer weights keep the half-up rounding exact.
        const unsigned y = 299u * src[p] + 587u * src[p + 1] + 114u * src[p + 2] + 500u;
        dst[i] = static_cast<std::uint8_t>(std::min(255u, y / 1000u));
    }
    return out;
}

LumaPlane downsample(const LumaPlane& plane, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
    if (factor > plane.width() || factor > plane.height())
        throw std::invalid_argument("downsample factor larger than plane dimension");
    if (factor == 1) return plane;
    const int w = plane.width() / factor;
    const int h = plane.height() / factor;
    const unsigned n = static_cast<unsigned>(factor * factor);
    LumaPlane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            unsigned sum = 0;
            for (int dy = 0; dy < factor; ++dy) {
                const auto row = plane.row(y * factor + dy);
                for (int dx = 0; dx < factor; ++dx) sum += row[x * factor + dx];
            }
            out.at(x, y) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
        }
    }
    return out;
}

std::vector<LumaPlane> recording_luma(const Recording& rec, int downsample_factor) {
    std::vector<LumaPlane> planes(static_cast<std::size_t>(rec.size()));
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < rec.size(); ++i) {
        planes[i] = downsample(rgb_to_luma(rec.frame(i)), downsample_factor);
    }
    return planes;
}

int auto_downsample_factor(int width) { return width > 720 ? 2 : 1; }

std::string frame_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d", index + 1);
    return buf;
}

Recording load_recording(const fs::path& dir, std::optional<double> fps_override) {
    if (!fs::is_directory(dir)) throw RecordingError("not a directory: " + dir.string());
    const fs::path manifest_path = dir / "manifest.json";
    nlohmann::json manifest = nlohmann::json::object();
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        try {
            manifest = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw RecordingError("malformed manifest.json: " + std::string(e.what()));
        }
    } else if (!fps_override) {
        throw RecordingError("missing manifest.json in " + dir.string());
    }

    double fps = 0;
    if (fps_override) {
        fps = *fps_override;
    } else if (manifest.contains("fps") && manifest["fps"].is_number()) {
        fps = manifest["fps"].get<double>();
    } else {
        throw RecordingError("manifest does not declare fps");
    }
    if (!(fps > 0)) throw RecordingError("fps must be positive");
    const std::string glob = manifest.value("frame_glob", std::string("frame_*.png"));

    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (fnmatch(glob.c_str(), name.c_str(), 0) == 0) paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw RecordingError("recording has zero frames: " + dir.string());

    std::vector<RgbImage> rasters(paths.size());
    std::string failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            rasters[i] = read_png(paths[i]);
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw RecordingError(failure);
    return Recording(std::move(rasters), fps, std::move(paths));
}

std::vector<fs::path> write_recording(const fs::path& dir, const std::vector<RgbImage>& frames,
                                      double fps) {
    fs::create_directories(dir);
    std::vector<fs::path> paths(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        paths[i] = dir / (frame_stem(static_cast<int>(i)) + ".png");
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < frames.size(); ++i) write_png(paths[i], frames[i]);

    nlohmann::ordered_json manifest;
    manifest["fps"] = fps;
    manifest["frame_glob"] = "frame_*.png";
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return paths;
}

}  // namespace recap
