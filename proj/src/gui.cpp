// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/gui.hpp"

#include <algorithm>
#include <cmath>

namespace recap {

namespace {

struct ClassNames {
    ElementClass klass;
    std::string_view name;
    std::string_view word;
};

constexpr std::array<ClassNames, 11> kClassNames = {{
    {ElementClass::Button, "button", "button"},
    {ElementClass::Checkbox, "checkbox", "checkbox"},
    {ElementClass::Icon, "icon", "icon"},
    {ElementClass::ImageView, "imageview", "image"},
    {ElementClass::TextView, "textview", "text"},
    {ElementClass::RadioButton, "radio button", "radio button"},
    {ElementClass::Spinner, "spinner", "spinner"},
    {ElementClass::Switch, "switch", "switch"},
    {ElementClass::ToggleButton, "toggle button", "toggle button"},
    {ElementClass::EditText, "edittext", "edittext"},
    {ElementClass::Chronometer, "chronometer", "chronometer"},
}};

}  // namespace

std::string_view class_name(ElementClass c) {
    for (const auto& e : kClassNames)
        if (e.klass == c) return e.name;
    return "textview";
}

std::string_view class_word(ElementClass c) {
    for (const auto& e : kClassNames)
        if (e.klass == c) return e.word;
    return "text";
}

std::optional<ElementClass> parse_element_class(std::string_view name) {
    for (const auto& e : kClassNames)
        if (e.name == name) return e.klass;
    return std::nullopt;
}

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Left: return "left";
        case Direction::Right: return "right";
        case Direction::Top: return "top";
        case Direction::Bottom: return "bottom";
    }
    return "?";
}

GridPosition absolute_position(const Box& box, int frame_width, int frame_height) {
    // Doubled coordinates keep every comparison in integers.
    auto cell = [](long twice_center, long extent) {
        if (3 * twice_center <= 2 * extent) return 0;
        if (3 * twice_center <= 4 * extent) return 1;
        return 2;
    };
    return {static_cast<GridRow>(cell(2L * box.y + box.h, frame_height)),
            static_cast<GridCol>(cell(2L * box.x + box.w, frame_width))};
}

namespace {

constexpr std::array<std::array<const char*, 3>, 3> kPhrases = {{
    {"top left corner", "top", "top right corner"},
    {"left", "center", "right"},
    {"bottom left corner", "bottom", "bottom right corner"},
}};

}  // namespace

std::string position_phrase(GridPosition pos) {
    return kPhrases[static_cast<int>(pos.row)][static_cast<int>(pos.col)];
}

std::optional<GridPosition> parse_position_phrase(const std::string& phrase) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (phrase == kPhrases[r][c]) return GridPosition{static_cast<GridRow>(r), static_cast<GridCol>(c)};
    return std::nullopt;
}

namespace {

double overlap(int a0, int a1, int b0, int b1) { return std::max(0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

ElementGraph build_graph(const std::vector<GuiElement>& elements, const GraphParams& params) {
    ElementGraph g;
    g.links.resize(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Box& s = elements[i].box;
        for (std::size_t j = 0; j < elements.size(); ++j) {
            if (i == j) continue;
            const Box& c = elements[j].box;
            const double dx = c.center_x() - s.center_x();
            const double dy = c.center_y() - s.center_y();
            const double dist = std::hypot(dx, dy);
            if (dist > params.threshold_px) continue;
            const double v_edge = std::max(1, std::min(s.h, c.h));
            const double h_edge = std::max(1, std::min(s.w, c.w));
            const bool v_ok = overlap(s.y, s.bottom(), c.y, c.bottom()) >= params.min_axis_overlap * v_edge;
            const bool h_ok = overlap(s.x, s.right(), c.x, c.right()) >= params.min_axis_overlap * h_edge;
            auto offer = [&](Direction d) {
                auto& slot = g.links[i][static_cast<int>(d)];
                if (!slot || dist < slot->distance) slot = Neighbor{static_cast<int>(j), dist};
            };
            if (v_ok && dx < 0) offer(Direction::Left);
            if (v_ok && dx > 0) offer(Direction::Right);
            if (h_ok && dy < 0) offer(Direction::Top);
            if (h_ok && dy > 0) offer(Direction::Bottom);
        }
    }
    return g;
}

std::vector<GuiElement> detect_elements(const Frame& frame, ElementDetector& detector) {
    std::vector<GuiElement> out;
    for (const auto& d : detector.detect(frame)) {
        GuiElement e;
        e.klass = d.klass;
        const int x0 = std::clamp(d.box.x, 0, frame.pixels.width());
        const int y0 = std::clamp(d.box.y, 0, frame.pixels.height());
        const int x1 = std::clamp(d.box.right(), 0, frame.pixels.width());
        const int y1 = std::clamp(d.box.bottom(), 0, frame.pixels.height());
        e.box = {x0, y0, x1 - x0, y1 - y0};
        e.detector_confid = d.confidence;
        out.push_back(e);
    }
    return out;
}

std::vector<GuiElement> enrich(std::vector<GuiElement> elements, const std::vector<OcrItem>& ocr,
                               const Frame& frame, IconCaptioner* captioner) {
    for (auto& e : elements) {
        const OcrItem* best = nullptr;
        for (const auto& item : ocr) {
            if (!e.box.contains(item.box.center_x(), item.box.center_y())) continue;
            if (!best || item.confidence > best->confidence) best = &item;
        }
        if (best) {
            e.text = best->text;
            e.ocr_confid = best->confidence;
        } else {
            e.text.reset();
            e.ocr_confid = 0;
        }
        if (e.klass == ElementClass::Icon && captioner) {
            if (auto cap = captioner->caption(frame, e.box)) {
                e.caption = cap->text;
                e.caption_confid = cap->confidence;
            }
        }
    }
    return elements;
}

std::vector<GuiElement> enrich(std::vector<GuiElement> elements, const Frame& frame, OcrAdapter& ocr,
                               IconCaptioner* captioner) {
    return enrich(std::move(elements), ocr.recognize(frame), frame, captioner);
}

Screen build_screen(const Frame& frame, ElementDetector& detector, OcrAdapter& ocr, IconCaptioner* captioner,
                    double neighbor_fraction, double min_axis_overlap) {
    Screen s;
    s.frame_index = frame.index;
    s.width = frame.pixels.width();
    s.height = frame.pixels.height();
    s.elements = enrich(detect_elements(frame, detector), frame, ocr, captioner);
    s.graph = build_graph(s.elements, {neighbor_fraction * s.height, min_axis_overlap});
    return s;
}

}  // namespace recap
