// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "recap/adapters.hpp"
#include "recap/element_class.hpp"
#include "recap/frame_io.hpp"
#include "recap/image.hpp"

namespace recap {

struct GuiElement {
    ElementClass klass = ElementClass::TextView;
    Box box;
    std::optional<std::string> text;
    std::optional<std::string> caption;
    double ocr_confid = 0;
    double caption_confid = 0;
    double detector_confid = 1;

    /// Text for text-bearing elements, caption for icons without text.
    const std::optional<std::string>& label() const { return text ? text : caption; }
    double label_confid() const { return text ? ocr_confid : caption_confid; }
};

enum class Direction { Left = 0, Right = 1, Top = 2, Bottom = 3 };
inline constexpr std::array<Direction, 4> kAllDirections = {Direction::Left, Direction::Right,
                                                            Direction::Top, Direction::Bottom};
const char* to_string(Direction d);

struct Neighbor {
    int index = -1;
    double distance = 0;
};

/// Nearest element in each of the four directions, per element.
struct ElementGraph {
    std::vector<std::array<std::optional<Neighbor>, 4>> links;

    const std::optional<Neighbor>& neighbor(int element, Direction d) const {
        return links.at(static_cast<std::size_t>(element))[static_cast<int>(d)];
    }
};

enum class GridRow { Top, Center, Bottom };
enum class GridCol { Left, Center, Right };

struct GridPosition {
    GridRow row = GridRow::Center;
    GridCol col = GridCol::Center;
    bool operator==(const GridPosition&) const = default;
};

/// 3x3 cell holding the box centre. A centre exactly on a cell boundary
/// belongs to the lower-index cell.
GridPosition absolute_position(const Box& box, int frame_width, int frame_height);
/// "top left corner", "top", "center", "bottom right corner", ...
std::string position_phrase(GridPosition pos);
std::optional<GridPosition> parse_position_phrase(const std::string& phrase);

struct GraphParams {
    double threshold_px = 160;
    /// Minimum overlap on the perpendicular axis, as a fraction of the source edge.
    double min_axis_overlap = 0.3;
};

ElementGraph build_graph(const std::vector<GuiElement>& elements, const GraphParams& params);

struct Screen {
    int frame_index = 0;
    int width = 0;
    int height = 0;
    std::vector<GuiElement> elements;
    ElementGraph graph;
};

std::vector<GuiElement> detect_elements(const Frame& frame, ElementDetector& detector);

/// Attaches the best contained OCR item to every element and icon captions.
std::vector<GuiElement> enrich(std::vector<GuiElement> elements, const std::vector<OcrItem>& ocr,
                               const Frame& frame, IconCaptioner* captioner);
std::vector<GuiElement> enrich(std::vector<GuiElement> elements, const Frame& frame, OcrAdapter& ocr,
                               IconCaptioner* captioner);

/// Detection, enrichment and graph construction for one frame.
/// `neighbor_fraction` scales the graph threshold by the frame height.
Screen build_screen(const Frame& frame, ElementDetector& detector, OcrAdapter& ocr,
                    IconCaptioner* captioner, double neighbor_fraction = 0.25,
                    double min_axis_overlap = 0.3);

}  // namespace recap
