// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/attributes.hpp"
#include "recap/gui.hpp"
#include "recap/segmentation.hpp"

namespace recap {

struct CaptionConfig {
    double alpha = 0.9;
    double beta = 0.5;
};

/// Throws std::invalid_argument unless 0 <= beta < alpha <= 1.
void validate(const CaptionConfig& cfg);

/// Label confidence of `element` when its label occurs exactly once on the screen, else 0.
double object_confidence(const Screen& screen, int element);

enum class Relation { NextTo, Below, Above, LeftOf, RightOf };
const char* relation_words(Relation r);

/// Scroll distance as a fraction-of-screen phrase.
struct ScrollPhrase {
    /// "a quarter", "half", "three quarters" or "the full".
    std::string bucket;
    /// Whole screens scrolled when the distance exceeds one screen; 0 otherwise.
    int repeat = 0;
    bool operator==(const ScrollPhrase&) const = default;
};

ScrollPhrase phrase_scroll_offset(int distance_px, int frame_height);
/// "half of the screen", "the full screen", "the full screen twice", ...
std::string render_offset(const ScrollPhrase& phrase);

struct Slots {
    std::optional<std::string> obj_text;
    std::optional<ElementClass> obj_class;
    std::optional<std::string> position;
    std::optional<Relation> relation;
    std::optional<std::string> nbr_text;
    std::optional<ScrollDirection> direction;
    std::optional<ScrollPhrase> offset;
    std::optional<std::string> input_text;
    bool operator==(const Slots&) const = default;
};

class MissingSlot : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Picks the description template for an action. `has_label` tells whether
/// the target carries text (TAP, INPUT) or whether a revealed text target
/// exists (SCROLL).
int select_template(ActionKind kind, bool has_label, double confid, const CaptionConfig& cfg);

/// Instantiates a template. Templates 3 and 7 fall back to shorter forms
/// when the neighbour (or the whole target) is unknown; see docs/script.md.
std::string render_description(int template_id, const Slots& slots);

/// Inverse of render_description.
std::optional<std::pair<int, Slots>> parse_description(const std::string& text);

struct TargetChoice {
    std::optional<int> element;
    /// Neighbour used for relation phrasing, if any.
    std::optional<int> neighbor;
    std::optional<Relation> relation;
};

/// Smallest element containing the point (pixel coordinates).
std::optional<int> resolve_tap_target(const Screen& screen, double px, double py);
/// Edit text containing the point, else the topmost edit text.
std::optional<int> resolve_input_target(const Screen& screen, std::optional<std::pair<double, double>> tap_px);
/// Text element of `after` whose label is absent from `before_texts`, closest to the screen centre.
std::optional<int> resolve_scroll_target(const Screen& after, const std::vector<std::string>& before_texts);

/// Nearest labelled neighbour of `element` and the relation word that describes it.
TargetChoice describe_neighbor(const Screen& screen, int element);

/// Inferred attributes carried alongside the rendered text.
struct ActionAttributes {
    std::optional<TapPoint> tap;
    bool tap_low_confidence = false;
    std::optional<int> scroll_px;
    std::optional<std::string> input_text;
};

struct StepDescription {
    int clip_index = 0;
    ActionKind kind = ActionKind::Tap;
    int template_id = 0;
    std::string text;
    Slots slots;
    double obj_confid = 0;
    std::optional<double> label_confid;
    ActionAttributes attributes;
};

struct TapContext {
    TapPoint point;
    bool low_confidence = false;
};

StepDescription caption_tap(const Screen& screen, const TapContext& tap, const CaptionConfig& cfg);
StepDescription caption_scroll(const ScrollOffset& offset, int frame_height, const Screen* after,
                               const std::vector<std::string>& before_texts);
StepDescription caption_input(const Screen& screen, const std::string& text,
                              std::optional<TapPoint> field_tap, const CaptionConfig& cfg);

}  // namespace recap
