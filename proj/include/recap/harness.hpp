// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic screen recordings with ground truth. A session script describes
// a handful of screens built from a small widget vocabulary and a list of
// user actions; the renderer turns it into frames, per-frame OCR/element
// fixtures and a trace of what happened when.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/adapters.hpp"
#include "recap/attributes.hpp"
#include "recap/image.hpp"
#include "recap/segmentation.hpp"

namespace recap {

class ScriptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IndicatorStyle { Default, Cursor, Custom };
const char* to_string(IndicatorStyle s);
std::optional<IndicatorStyle> parse_indicator_style(const std::string& s);

enum class KeyboardLayout { Qwerty, QwertyCaps, Numeric };
const char* to_string(KeyboardLayout k);
std::optional<KeyboardLayout> parse_keyboard_layout(const std::string& s);

/// Screen geometry shared by every session.
inline constexpr int kStatusBarHeight = 24;
inline constexpr int kAppBarBottom = 80;
inline constexpr int kGlyphScale = 2;

struct WidgetSpec {
    std::string id;
    ElementClass klass = ElementClass::TextView;
    /// Box in screen coordinates at scroll offset 0. Widgets above the app
    /// bar bottom stay fixed; the rest scroll with the content.
    Box box;
    std::string text;
    double text_confid = 0.97;
    std::string caption;  // icons
    double caption_confid = 0.9;
    /// Edit texts: a small label drawn inside the field.
    std::string inner_label;
    bool checked = false;
    Rgb color{33, 150, 243};

    bool fixed() const { return box.y < kAppBarBottom; }
};

struct ScreenSpec {
    std::string id;
    std::string title;
    Rgb background{250, 250, 250};
    Rgb app_bar{63, 81, 181};
    /// Total content height including the chrome; >= frame height.
    int content_height = 640;
    std::vector<WidgetSpec> widgets;
};

struct ActionSpec {
    ActionKind kind = ActionKind::Tap;
    /// Frames of idle screen before the action starts.
    int gap_before = 30;
    // TAP / INPUT
    std::string target;
    std::optional<double> tap_x;  // fraction of the target box, default 0.5
    std::optional<double> tap_y;
    // TAP
    std::string go_to;
    int loading_frames = 0;
    // SCROLL: positive moves the content up (scrolling down).
    int scroll_px = 0;
    int scroll_frames = 0;  // 0 = automatic
    // INPUT
    std::vector<std::string> keys;
    KeyboardLayout keyboard = KeyboardLayout::Qwerty;
    int key_interval = 5;
    /// Drops one space from a label in the OCR fixtures of the frames before the keyboard opens.
    bool mangle_space = false;
};

struct SessionScript {
    double fps = 30;
    int width = 360;
    int height = 640;
    IndicatorStyle indicator = IndicatorStyle::Default;
    double noise_sigma = 0;
    int lead_frames = 15;
    int tail_frames = 20;
    std::string start_screen;
    std::vector<ScreenSpec> screens;
    std::vector<ActionSpec> actions;
};

nlohmann::ordered_json script_to_json(const SessionScript& s);
/// Parses and validates; throws ScriptError with a readable message.
SessionScript script_from_json(const nlohmann::json& j);
SessionScript load_script(const std::filesystem::path& path);
/// Checks references, geometry and schedules without rendering.
void validate_script(const SessionScript& s);

/// Final text produced by an edit-key sequence ("<left>", "<right>", "<bs>").
std::string apply_keys(const std::vector<std::string>& keys);

struct TruthAction {
    ActionKind kind = ActionKind::Tap;
    int start_frame = 0;
    int end_frame = 0;
    std::optional<TapPoint> tap;
    std::optional<Box> target_box;
    std::optional<int> scroll_px;
    std::optional<std::string> text;
    std::optional<std::pair<int, int>> steady_gap;
    std::optional<std::pair<int, int>> keyboard_span;
};

struct GroundTruthTrace {
    double fps = 30;
    int width = 0;
    int height = 0;
    int frame_count = 0;
    std::uint64_t seed = 0;
    IndicatorStyle indicator = IndicatorStyle::Default;
    std::vector<TruthAction> actions;
    /// Non-keyboard frames whose text happens to trip the keyboard test.
    std::vector<int> trigger_frames;
};

nlohmann::ordered_json trace_to_json(const GroundTruthTrace& t);
GroundTruthTrace trace_from_json(const nlohmann::json& j);
GroundTruthTrace load_trace(const std::filesystem::path& path);

struct GeneratedSession {
    std::vector<RgbImage> frames;
    AnnotationTable annotations;
    GroundTruthTrace trace;
};

/// Deterministic in (script, seed). The seed only drives pixel noise.
GeneratedSession generate_recording(const SessionScript& script, std::uint64_t seed);

/// Writes frames, manifest, per-frame fixtures, trace.json and script.json.
void write_session(const std::filesystem::path& dir, const GeneratedSession& session, const SessionScript& script);

struct RandomScriptOptions {
    int min_actions = 3;
    int max_actions = 5;
    /// Relative weights for TAP, SCROLL and INPUT.
    double tap_weight = 1;
    double scroll_weight = 1;
    double input_weight = 1;
    std::optional<IndicatorStyle> indicator;
    /// Probability that a TAP gets a loading plateau.
    double loading_probability = 0;
    double noise_sigma = 0;
    /// Share of INPUT actions typed with a mid-text edit.
    double edit_probability = 0.2;
};

SessionScript random_script(std::uint64_t seed, const RandomScriptOptions& opts = {});

/// The fixed 50-script batch: mixed kinds, all indicator styles, 5 scripts with loading plateaus.
std::vector<SessionScript> standard_batch(double noise_sigma = 0, int count = 50);

}  // namespace recap
