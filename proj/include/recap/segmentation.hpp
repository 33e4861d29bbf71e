// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recap/adapters.hpp"
#include "recap/frame_io.hpp"
#include "recap/kernels.hpp"

namespace recap {

enum class ActionKind { Tap, Scroll, Input };

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view name);

/// scores[k] = ssim(luma(f_k), luma(f_{k+1})).
struct SimilaritySignal {
    std::vector<double> scores;
    double fps = 30;
};

/// Inclusive frame interval [start_frame, end_frame] covering one action.
struct ActionClip {
    ActionKind kind = ActionKind::Tap;
    int start_frame = 0;
    int end_frame = 0;
    /// Loading plateau inside a TAP, inclusive frames.
    std::optional<std::pair<int, int>> steady_gap;
    /// Frames flagged keyboard-visible, INPUT only.
    std::optional<std::pair<int, int>> keyboard_span;

    int length() const { return end_frame - start_frame + 1; }
};

/// Keyboard visibility sampled every `stride` frames and interpolated to
/// all frames by nearest sample (ties go to the earlier sample).
struct KeyboardFlags {
    std::vector<int> sampled_frames;
    std::vector<bool> sampled_visible;
    std::vector<bool> per_frame;
};

struct SegmentationConfig {
    double drop_threshold = 0.92;
    double steady_gap_max_s = 0.5;
    double scroll_min_s = 0.3;
    int input_min_oscillations = 3;
    int keyboard_stride = 5;
    /// Lead-in and tail added around each detected clip.
    double clip_pad_s = 0.1;
    /// Smallest dip below baseline counted as activity.
    double activity_margin = 0.002;
    /// Activity margin in units of the signal jitter, estimated robustly
    /// from successive score differences.
    double activity_noise_k = 4.0;
    /// 0 selects the automatic factor (2 above 720 px width, else 1).
    int downsample_factor = 0;
    SsimParams ssim;
};

struct SegmentationDiagnostics {
    double baseline = 1.0;
    double jitter = 0.0;
    double drop_level = 0.0;
    double active_level = 0.0;
    /// Resting stretches found; activity is measured against the nearest.
    int steady_runs = 0;
    std::vector<std::string> notes;
};

/// All consecutive-pair SSIM scores. Pairs are evaluated in parallel.
SimilaritySignal compute_signal(const Recording& rec, int downsample_factor = 1,
                                const SsimParams& params = {});
/// Same signal from precomputed planes.
SimilaritySignal compute_signal(const std::vector<LumaPlane>& planes, double fps,
                                const SsimParams& params = {});

/// Keyboard discrimination on the letters-only and digits-only OCR strings.
bool detect_keyboard(std::string_view ocr_text, std::string_view ocr_num);

/// Splits OCR output into (letters, digits) in reading order.
std::pair<std::string, std::string> split_ocr_characters(const std::vector<OcrItem>& items);
bool is_keyboard_frame(const std::vector<OcrItem>& items);

KeyboardFlags sample_keyboard(const Recording& rec, OcrAdapter& ocr, int stride = 5);
/// Builds flags from already known per-sample answers.
KeyboardFlags interpolate_keyboard(int frame_count, std::vector<int> sampled_frames,
                                   std::vector<bool> sampled_visible);

/// Cuts the signal into sorted, disjoint, typed clips.
std::vector<ActionClip> segment_actions(const SimilaritySignal& signal, const KeyboardFlags& kb,
                                        const SegmentationConfig& cfg = {},
                                        SegmentationDiagnostics* diag = nullptr);

/// Diagnostic CSV: "frame_index,score" with one row per pair.
std::string signal_csv(const SimilaritySignal& signal);

}  // namespace recap
