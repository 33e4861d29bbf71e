// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/adapters.hpp"
#include "recap/frame_io.hpp"
#include "recap/segmentation.hpp"

namespace recap {

inline constexpr int kClipSampleSize = 16;
inline constexpr int kClipSampleStride = 5;

/// 16 frame indices drawn from a clip.
using ClipSample = std::array<int, kClipSampleSize>;

/// Clips of at least 80 frames: start, start+5, ..., start+75.
/// Shorter clips: index start + floor(i * length / 16) for i in [0, 16).
ClipSample sample_clip(const ActionClip& clip);

class NoIndicatorFound : public std::runtime_error {
public:
    NoIndicatorFound() : std::runtime_error("no touch indicator found in clip") {}
};

struct IndicatorParams {
    /// Per-channel change that counts as a changed pixel.
    int change_threshold = 16;
    int min_blob_pixels = 20;
    /// Largest bounding box accepted, as a fraction of the frame area.
    double max_box_fraction = 0.08;
    /// Blob pixels over bounding-box area.
    double min_fill = 0.15;
    /// Longer box side over shorter side.
    double max_aspect = 4.0;
};

/// Finds transient overlays: pixels that change between consecutive sampled
/// frames and do not already hold their final value. The largest compact
/// blob of the earliest such pair gives the point, at its centroid, or at
/// its apex when the blob is shaped like an arrow pointer.
class IndicatorLocalizer final : public TapLocalizer {
public:
    explicit IndicatorLocalizer(IndicatorParams params = {}) : params_(params) {}
    std::optional<TapPoint> locate(const Recording& rec, std::span<const int> sample) override;

private:
    IndicatorParams params_;
};

/// Throws NoIndicatorFound when the localizer reports nothing.
TapPoint infer_tap_location(const Recording& rec, const ClipSample& sample, TapLocalizer& localizer);

enum class ScrollDirection { Up, Down };
const char* to_string(ScrollDirection d);

struct ScrollOffset {
    /// Positive when content moved up the screen (scrolling down).
    int distance_px = 0;
    ScrollDirection direction() const { return distance_px > 0 ? ScrollDirection::Down : ScrollDirection::Up; }
};

struct ScrollParams {
    int folds = 10;
    double min_correlation = 0.5;
    /// 0 means a third of the frame height.
    int search_radius = 0;
    /// Strips that stay put with at least this correlation look like fixed chrome...
    double chrome_correlation = 0.995;
    /// ...when they do so in at least this fraction of the moving pairs.
    double chrome_fraction = 0.8;
};

struct ScrollDiagnostics {
    /// Per pair (clip-relative), the offset it contributed.
    std::vector<int> pair_offsets;
    /// Pairs whose strips were all rejected; they contribute 0.
    std::vector<int> rejected_pairs;
    std::vector<int> chrome_strips;
    int moving_pairs = 0;
};

/// Offset between two planes: median displacement over the accepted strips.
/// `excluded` marks strips to ignore. Returns nullopt when every strip is rejected.
std::optional<int> pair_offset(const std::vector<StripMatch>& matches, const std::vector<bool>& excluded,
                               double min_correlation);

/// Net displacement from the frame before the clip to its last frame; a
/// clip starting at frame 0 is measured from frame 0. `planes` is indexed by
/// frame and only the entries in that range are read.
ScrollOffset infer_scroll_offset(const ActionClip& clip, const std::vector<LumaPlane>& planes,
                                 const ScrollParams& params = {}, ScrollDiagnostics* diag = nullptr);
ScrollOffset infer_scroll_offset(const ActionClip& clip, const Recording& rec,
                                 const ScrollParams& params = {}, ScrollDiagnostics* diag = nullptr);

/// OCR items for one frame with confidences validated.
std::vector<OcrItem> ocr_frame(const Frame& frame, OcrAdapter& adapter);

/// Vertical band [top, bottom) occupied by the keyboard: from the highest
/// trigger row to the bottom of the frame, or the lower 45% when no row is
/// recognisable.
std::pair<int, int> keyboard_band(const std::vector<OcrItem>& items, int frame_height);
std::vector<OcrItem> strip_keyboard_text(const std::vector<OcrItem>& items, std::pair<int, int> band);

/// Characters of `after` left unmatched by a recursive longest-common-block
/// alignment with `before`. Whitespace-only pieces are dropped and the
/// result is trimmed.
std::string lcs_diff(const std::string& before, const std::string& after);

/// OCR items joined with single spaces in reading order.
std::string ocr_text(const std::vector<OcrItem>& items);

struct InputDelta {
    std::string text;
    int before_frame = 0;
    int after_frame = 0;
};

/// `keyboard_span` is the (first, last) frame flagged as keyboard-visible.
InputDelta infer_input_text(const Recording& rec, std::pair<int, int> keyboard_span, OcrAdapter& adapter,
                            std::vector<std::string>* notes = nullptr);

}  // namespace recap
