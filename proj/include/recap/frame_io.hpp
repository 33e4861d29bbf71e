// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/image.hpp"

namespace recap {

/// Raised for anything wrong with the recording layout on disk.
class RecordingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Frame {
    int index = 0;
    long timestamp_ms = 0;
    RgbImage pixels;
    /// Image file the frame was decoded from; empty for in-memory frames.
    std::filesystem::path source;
};

/// round(index * 1000 / fps), half away from zero.
long frame_timestamp_ms(int index, double fps);

/// Ordered frame sequence sharing one size and frame rate.
class Recording {
public:
    Recording() = default;
    /// Takes ownership of the rasters; indices and timestamps are assigned here.
    Recording(std::vector<RgbImage> rasters, double fps,
              std::vector<std::filesystem::path> sources = {});

    double fps() const { return fps_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return static_cast<int>(frames_.size()); }
    double duration_s() const { return size() / fps_; }

    const Frame& frame(int i) const { return frames_.at(static_cast<std::size_t>(i)); }
    const std::vector<Frame>& frames() const { return frames_; }

private:
    std::vector<Frame> frames_;
    double fps_ = 0;
    int width_ = 0;
    int height_ = 0;
};

/// Y = 0.299 R + 0.587 G + 0.114 B, rounded half-up.
LumaPlane rgb_to_luma(const RgbImage& image);
inline LumaPlane rgb_to_luma(const Frame& frame) { return rgb_to_luma(frame.pixels); }

/// Box-filter mean over factor x factor blocks. Trailing partial blocks are dropped.
LumaPlane downsample(const LumaPlane& plane, int factor);

/// Converts every frame of the recording; frames are processed in parallel.
std::vector<LumaPlane> recording_luma(const Recording& rec, int downsample_factor = 1);

/// Analysis factor used when the config leaves it on auto.
int auto_downsample_factor(int width);

/// Reads `manifest.json` plus the frame files it names from a directory.
/// `fps_override` replaces the manifest rate when given.
Recording load_recording(const std::filesystem::path& dir,
                         std::optional<double> fps_override = std::nullopt);

/// Writes frames as `frame_000001.png`... plus a manifest. Returns the frame paths.
std::vector<std::filesystem::path> write_recording(const std::filesystem::path& dir,
                                                   const std::vector<RgbImage>& frames, double fps);

/// Zero-padded 1-based file stem used for frame index `index`.
std::string frame_stem(int index);

// png_io.cpp
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace recap
