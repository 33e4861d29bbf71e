// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "recap/image.hpp"

namespace recap {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Column-major 5x7 bitmap: bit r of column c lights row r. Characters
/// outside printable ASCII map to '?'.
const std::array<std::uint8_t, kGlyphWidth>& glyph(char c);

/// Horizontal advance per character, including one blank column.
inline int glyph_advance(int scale) { return (kGlyphWidth + 1) * scale; }
int text_width(std::string_view text, int scale);
inline int text_height(int scale) { return kGlyphHeight * scale; }

/// Draws text with its top-left corner at (x, y); pixels outside `clip` are skipped.
void draw_text(RgbImage& img, int x, int y, std::string_view text, Rgb color, int scale, const Box& clip);
void draw_text(RgbImage& img, int x, int y, std::string_view text, Rgb color, int scale);

}  // namespace recap
