// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include "recap/glyphs.hpp"
#include "recap/subtitles.hpp"

namespace recap {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(IndicatorStyle s) {
    switch (s) {
        case IndicatorStyle::Default: return "default";
        case IndicatorStyle::Cursor: return "cursor";
        case IndicatorStyle::Custom: return "custom";
    }
    return "default";
}

std::optional<IndicatorStyle> parse_indicator_style(const std::string& s) {
    for (auto v : {IndicatorStyle::Default, IndicatorStyle::Cursor, IndicatorStyle::Custom})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

const char* to_string(KeyboardLayout k) {
    switch (k) {
        case KeyboardLayout::Qwerty: return "qwerty";
        case KeyboardLayout::QwertyCaps: return "QWERTY";
        case KeyboardLayout::Numeric: return "numeric";
    }
    return "qwerty";
}

std::optional<KeyboardLayout> parse_keyboard_layout(const std::string& s) {
    for (auto v : {KeyboardLayout::Qwerty, KeyboardLayout::QwertyCaps, KeyboardLayout::Numeric})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

namespace {

constexpr int kKeyboardHeight = 270;
constexpr int kSuggestionHeight = 40;
constexpr int kKeyRowTop = 44;
constexpr int kKeyRowPitch = 54;
constexpr int kKeyHeight = 46;
constexpr int kIndicatorFrames = 6;
constexpr int kSwapDelay = 3;
constexpr int kFirstKeyDelay = 9;
constexpr int kCloseDelay = 9;

const Rgb kInk{33, 33, 33};
const Rgb kMuted{117, 117, 117};
const Rgb kWhite{255, 255, 255};

int keyboard_top(int height) { return height - kKeyboardHeight; }

// --- drawing primitives ------------------------------------------------------

Box intersect(const Box& a, const Box& b) {
    const int x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right()), y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return {x0, y0, x1 - x0, y1 - y0};
}

void fill(RgbImage& img, const Box& box, Rgb c, const Box& clip) {
    const Box r = intersect(intersect(box, clip), {0, 0, img.width(), img.height()});
    for (int y = r.y; y < r.bottom(); ++y)
        for (int x = r.x; x < r.right(); ++x) img.set(x, y, c);
}

void outline(RgbImage& img, const Box& box, Rgb c, int t, const Box& clip) {
    fill(img, {box.x, box.y, box.w, t}, c, clip);
    fill(img, {box.x, box.bottom() - t, box.w, t}, c, clip);
    fill(img, {box.x, box.y, t, box.h}, c, clip);
    fill(img, {box.right() - t, box.y, t, box.h}, c, clip);
}

std::uint8_t mix(std::uint8_t under, std::uint8_t over, double alpha) {
    return static_cast<std::uint8_t>(std::lround(under * (1 - alpha) + over * alpha));
}

void blend_pixel(RgbImage& img, int x, int y, Rgb c, double alpha) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
    const Rgb u = img.at(x, y);
    img.set(x, y, {mix(u.r, c.r, alpha), mix(u.g, c.g, alpha), mix(u.b, c.b, alpha)});
}

// Pixels whose centre lies within [r_in, r_out) of (cx, cy).
void ring(RgbImage& img, double cx, double cy, double r_in, double r_out, Rgb c, double alpha, const Box& clip) {
    const int x0 = static_cast<int>(std::floor(cx - r_out)), x1 = static_cast<int>(std::ceil(cx + r_out));
    const int y0 = static_cast<int>(std::floor(cy - r_out)), y1 = static_cast<int>(std::ceil(cy + r_out));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (!clip.contains(x, y)) continue;
            const double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
            if (d >= r_in && d < r_out) blend_pixel(img, x, y, c, alpha);
        }
    }
}

void text(RgbImage& img, int x, int y, const std::string& s, Rgb c, int scale, const Box& clip) {
    draw_text(img, x, y, s, c, scale, clip);
}

Box text_box(int x, int y, const std::string& s, int scale) { return {x, y, text_width(s, scale), text_height(scale)}; }

std::uint32_t hash_of(const std::string& s) {
    std::uint32_t h = 2166136261u;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 16777619u;
    }
    return h;
}

// 12x19 arrow pointer, tip at the top-left pixel. 'X' outline, 'o' body.
constexpr std::array<const char*, 19> kCursor = {
    "X           ", "XX          ", "XoX         ", "XooX        ", "XoooX       ", "XooooX      ",
    "XoooooX     ", "XooooooX    ", "XoooooooX   ", "XooooooooX  ", "XoooooooooX ", "XooooooXXXXX",
    "XoooXooX    ", "XooXXooX    ", "XoX  XooX   ", "XX   XooX   ", "X     XooX  ", "      XooX  ",
    "       XX   ",
};

// --- widgets -----------------------------------------------------------------

struct Rendered {
    RgbImage image;
    FrameAnnotations ann;
};

struct KeyboardView {
    KeyboardLayout layout = KeyboardLayout::Qwerty;
    std::string field_text;
    std::optional<std::string> pressed;
};

struct Overlay {
    IndicatorStyle style = IndicatorStyle::Default;
    double x = 0;
    double y = 0;
    int age = 0;
};

struct FrameState {
    int screen = 0;
    int scroll = 0;
    bool placeholder = false;
    std::map<std::string, std::string> fields;  // "screen/widget" -> typed text
    std::optional<Overlay> overlay;
    std::optional<KeyboardView> keyboard;
    bool mangle = false;
};

std::string field_key(const ScreenSpec& s, const WidgetSpec& w) { return s.id + "/" + w.id; }

void draw_icon(RgbImage& img, const Box& b, const std::string& caption, Rgb c, const Box& clip) {
    const int cx = b.x + b.w / 2, cy = b.y + b.h / 2;
    switch (hash_of(caption) % 4) {
        case 0:  // three bars
            for (int i = -1; i <= 1; ++i) fill(img, {cx - 10, cy + i * 7 - 1, 20, 3}, c, clip);
            break;
        case 1:  // magnifier
            ring(img, cx - 2, cy - 2, 5, 8, c, 1.0, clip);
            fill(img, {cx + 4, cy + 4, 4, 4}, c, clip);
            fill(img, {cx + 7, cy + 7, 4, 4}, c, clip);
            break;
        case 2:  // two heads
            ring(img, cx - 5, cy - 4, 0, 4, c, 1.0, clip);
            ring(img, cx + 5, cy - 4, 0, 4, c, 1.0, clip);
            fill(img, {cx - 11, cy + 2, 22, 7}, c, clip);
            break;
        default:  // framed dot
            outline(img, {cx - 10, cy - 10, 20, 20}, c, 2, clip);
            ring(img, cx, cy, 0, 4, c, 1.0, clip);
            break;
    }
}

void draw_image_view(RgbImage& img, const Box& b, const std::string& seed, const Box& clip) {
    const std::uint32_t h = hash_of(seed);
    const Rgb base{static_cast<std::uint8_t>(80 + h % 120), static_cast<std::uint8_t>(80 + (h >> 8) % 120),
                   static_cast<std::uint8_t>(80 + (h >> 16) % 120)};
    const Box r = intersect(intersect(b, clip), {0, 0, img.width(), img.height()});
    for (int y = r.y; y < r.bottom(); ++y) {
        for (int x = r.x; x < r.right(); ++x) {
            const int band = ((x - b.x) + 2 * (y - b.y)) / 9 % 3;
            const int shade = band * 28;
            img.set(x, y, {static_cast<std::uint8_t>(std::min(255, base.r + shade)),
                           static_cast<std::uint8_t>(std::min(255, base.g + shade)),
                           static_cast<std::uint8_t>(std::min(255, base.b + shade))});
        }
    }
}

// Draws one widget at its on-screen box and appends its annotations.
void draw_widget(Rendered& out, const WidgetSpec& w, const Box& b, const Box& clip, const std::string& typed) {
    RgbImage& img = out.image;
    auto add_text = [&](const std::string& s, int x, int y, int scale, double confid) {
        const Box tb = text_box(x, y, s, scale);
        if (intersect(tb, clip) == tb && !s.empty()) out.ann.ocr.push_back({s, tb, confid});
    };
    auto centered = [&](const std::string& s, Rgb c, double confid) {
        const int x = b.x + (b.w - text_width(s, kGlyphScale)) / 2;
        const int y = b.y + (b.h - text_height(kGlyphScale)) / 2;
        text(img, x, y, s, c, kGlyphScale, clip);
        add_text(s, x, y, kGlyphScale, confid);
    };
    auto left = [&](const std::string& s, int dx, Rgb c, double confid) {
        const int y = b.y + (b.h - text_height(kGlyphScale)) / 2;
        text(img, b.x + dx, y, s, c, kGlyphScale, clip);
        add_text(s, b.x + dx, y, kGlyphScale, confid);
    };

    std::optional<std::string> ann_text;
    double ann_confid = 0;
    switch (w.klass) {
        case ElementClass::Button:
            fill(img, b, w.color, clip);
            centered(w.text, kWhite, w.text_confid);
            break;
        case ElementClass::TextView:
        case ElementClass::Chronometer:
            left(w.text, 0, kInk, w.text_confid);
            break;
        case ElementClass::Checkbox: {
            const Box sq{b.x + b.w / 2 - 10, b.y + b.h / 2 - 10, 20, 20};
            if (w.checked) {
                fill(img, sq, w.color, clip);
                fill(img, {sq.x + 5, sq.y + 9, 10, 3}, kWhite, clip);
            } else {
                outline(img, sq, kMuted, 2, clip);
            }
            break;
        }
        case ElementClass::RadioButton:
            ring(img, b.center_x(), b.center_y(), 7, 10, kMuted, 1.0, clip);
            if (w.checked) ring(img, b.center_x(), b.center_y(), 0, 5, w.color, 1.0, clip);
            break;
        case ElementClass::Switch: {
            const Box track{b.x + 4, b.y + b.h / 2 - 7, b.w - 8, 14};
            fill(img, track, w.checked ? Rgb{144, 202, 249} : Rgb{189, 189, 189}, clip);
            const double tx = w.checked ? track.right() - 10 : track.x + 10;
            ring(img, tx, b.center_y(), 0, 11, w.checked ? w.color : Rgb{245, 245, 245}, 1.0, clip);
            ring(img, tx, b.center_y(), 10, 11, kMuted, 1.0, clip);
            break;
        }
        case ElementClass::ToggleButton:
            fill(img, b, Rgb{224, 224, 224}, clip);
            fill(img, {b.x + 6, b.bottom() - 6, b.w - 12, 3}, w.checked ? w.color : kMuted, clip);
            centered(w.text, kInk, w.text_confid);
            break;
        case ElementClass::Spinner:
            fill(img, {b.x, b.bottom() - 2, b.w, 2}, kMuted, clip);
            left(w.text, 4, kInk, w.text_confid);
            for (int i = 0; i < 6; ++i) fill(img, {b.right() - 20 + i, b.y + b.h / 2 - 3 + i, 12 - 2 * i, 1}, kInk, clip);
            break;
        case ElementClass::EditText: {
            outline(img, b, kMuted, 2, clip);
            if (!w.inner_label.empty()) {
                text(img, b.x + 8, b.y + 5, w.inner_label, w.color, 1, clip);
                add_text(w.inner_label, b.x + 8, b.y + 5, 1, w.text_confid);
            }
            if (!typed.empty()) {
                const Box inner{b.x + 2, b.y + 2, b.w - 4, b.h - 4};
                const int ty = w.inner_label.empty() ? b.y + (b.h - text_height(kGlyphScale)) / 2
                                                     : b.bottom() - 6 - text_height(kGlyphScale);
                text(img, b.x + 8, ty, typed, kInk, kGlyphScale, intersect(inner, clip));
                add_text(typed, b.x + 8, ty, kGlyphScale, 0.95);
            }
            break;
        }
        case ElementClass::ImageView:
            draw_image_view(img, b, w.id, clip);
            break;
        case ElementClass::Icon:
            draw_icon(img, b, w.caption, w.fixed() ? kWhite : kInk, clip);
            break;
    }
    if (!w.text.empty() && w.klass != ElementClass::EditText) {
        ann_text = w.text;
        ann_confid = w.text_confid;
    } else if (w.klass == ElementClass::EditText) {
        if (!w.inner_label.empty()) {
            ann_text = w.inner_label;
            ann_confid = w.text_confid;
        } else if (!typed.empty()) {
            ann_text = typed;
            ann_confid = 0.95;
        }
    }
    FrameAnnotations::Element e;
    e.klass = w.klass;
    e.box = intersect(b, clip);
    e.text = ann_text;
    e.text_confid = ann_confid;
    if (w.klass == ElementClass::Icon && !w.caption.empty()) {
        e.caption = w.caption;
        e.caption_confid = w.caption_confid;
    }
    out.ann.elements.push_back(e);
}

// --- keyboard ----------------------------------------------------------------

struct Key {
    std::string label;  // drawn text; empty for blank keys
    std::string value;  // what pressing it types or does
    Box box;
};

std::vector<std::vector<Key>> keyboard_keys(KeyboardLayout layout, int width, int height) {
    const int top = keyboard_top(height) + kKeyRowTop;
    std::vector<std::vector<Key>> rows;
    auto row_y = [&](int r) { return top + r * kKeyRowPitch; };
    if (layout == KeyboardLayout::Numeric) {
        const int pitch = width / 3;
        const std::array<std::array<const char*, 3>, 4> labels = {
            {{"1", "2", "3"}, {"4", "5", "6"}, {"7", "8", "9"}, {",", "0", "."}}};
        for (int r = 0; r < 4; ++r) {
            std::vector<Key> row;
            for (int c = 0; c < 3; ++c)
                row.push_back({labels[r][c], labels[r][c], {c * pitch + 3, row_y(r), pitch - 6, kKeyHeight}});
            rows.push_back(row);
        }
        return rows;
    }
    const bool caps = layout == KeyboardLayout::QwertyCaps;
    const std::array<std::string, 3> letters = {"qwertyuiop", "asdfghjkl", "zxcvbnm"};
    const int pitch = width / 10;
    for (int r = 0; r < 3; ++r) {
        std::vector<Key> row;
        int x = r == 0 ? 0 : r == 1 ? pitch / 2 : pitch + pitch / 2;
        if (r == 2) row.push_back({"", "<shift>", {2, row_y(r), pitch + pitch / 2 - 6, kKeyHeight}});
        for (char ch : letters[r]) {
            const char shown = caps ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch;
            const std::string s(1, shown);
            row.push_back({s, s, {x + 2, row_y(r), pitch - 4, kKeyHeight}});
            x += pitch;
        }
        if (r == 2) row.push_back({"", "<bs>", {x + 2, row_y(r), width - x - 4, kKeyHeight}});
        rows.push_back(row);
    }
    std::vector<Key> bottom;
    bottom.push_back({"?123", "<sym>", {2, row_y(3), pitch * 2 - 4, kKeyHeight}});
    bottom.push_back({",", ",", {pitch * 2 + 2, row_y(3), pitch - 4, kKeyHeight}});
    bottom.push_back({"", " ", {pitch * 3 + 2, row_y(3), pitch * 4 - 4, kKeyHeight}});
    bottom.push_back({".", ".", {pitch * 7 + 2, row_y(3), pitch - 4, kKeyHeight}});
    bottom.push_back({"", "<enter>", {pitch * 8 + 2, row_y(3), width - pitch * 8 - 4, kKeyHeight}});
    rows.push_back(bottom);
    return rows;
}

std::optional<Key> find_key(KeyboardLayout layout, int width, int height, const std::string& value) {
    for (const auto& row : keyboard_keys(layout, width, height)) {
        for (const auto& k : row) {
            if (k.value == value) return k;
            // Lower-case layouts still show where an upper-case letter lives.
            if (value.size() == 1 && k.value.size() == 1 &&
                std::tolower(static_cast<unsigned char>(k.value[0])) ==
                    std::tolower(static_cast<unsigned char>(value[0])))
                return k;
        }
    }
    if (value == "<left>" || value == "<right>") return std::nullopt;
    return std::nullopt;
}

std::vector<std::string> suggestions(const std::string& typed) {
    if (typed.empty()) return {"I", "the", "and"};
    std::string cap = typed;
    cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
    return {typed, typed + "s", cap + "!"};
}

void draw_keyboard(Rendered& out, const KeyboardView& kb) {
    RgbImage& img = out.image;
    const int w = img.width(), h = img.height();
    const Box all{0, 0, w, h};
    const int top = keyboard_top(h);
    fill(img, {0, top, w, kKeyboardHeight}, Rgb{236, 239, 241}, all);
    fill(img, {0, top + kSuggestionHeight - 1, w, 1}, Rgb{200, 200, 200}, all);

    const auto sugg = suggestions(kb.field_text);
    for (std::size_t i = 0; i < sugg.size(); ++i) {
        const int slot = w / 3;
        const int x = static_cast<int>(i) * slot + (slot - text_width(sugg[i], kGlyphScale)) / 2;
        const int y = top + (kSuggestionHeight - text_height(kGlyphScale)) / 2;
        text(img, x, y, sugg[i], kMuted, kGlyphScale, all);
        out.ann.ocr.push_back({sugg[i], text_box(x, y, sugg[i], kGlyphScale), 0.9});
    }

    const auto rows = keyboard_keys(kb.layout, w, h);
    for (const auto& row : rows) {
        std::string joined;
        Box span{};
        bool first = true;
        for (const auto& k : row) {
            const bool down = kb.pressed && *kb.pressed == k.value;
            fill(img, k.box, down ? Rgb{189, 189, 189} : kWhite, all);
            if (k.label.empty()) continue;
            const int x = k.box.x + (k.box.w - text_width(k.label, kGlyphScale)) / 2;
            const int y = k.box.y + (k.box.h - text_height(kGlyphScale)) / 2;
            text(img, x, y, k.label, kInk, kGlyphScale, all);
            const Box tb = text_box(x, y, k.label, kGlyphScale);
            if (k.label.size() > 1) {
                out.ann.ocr.push_back({k.label, tb, 0.9});
                continue;
            }
            joined += k.label;
            if (first) span = tb;
            else span = {span.x, span.y, tb.right() - span.x, span.h};
            first = false;
        }
        if (!joined.empty()) out.ann.ocr.push_back({joined, span, 0.9});
    }

    if (kb.pressed && kb.pressed->size() == 1 && *kb.pressed != " ") {
        if (auto key = find_key(kb.layout, w, h, *kb.pressed)) {
            const Box pop{key->box.x - 4, key->box.y - 50, key->box.w + 8, 56};
            fill(img, pop, kWhite, all);
            outline(img, pop, Rgb{189, 189, 189}, 1, all);
            std::string shown = *kb.pressed;
            const int x = pop.x + (pop.w - text_width(shown, 3)) / 2;
            const int y = pop.y + 8;
            text(img, x, y, shown, kInk, 3, all);
            out.ann.ocr.push_back({shown, text_box(x, y, shown, 3), 0.9});
        }
    }
}

// --- whole frame -------------------------------------------------------------

void draw_overlay(RgbImage& img, const Overlay& o) {
    const Box all{0, 0, img.width(), img.height()};
    switch (o.style) {
        case IndicatorStyle::Default: {
            const double alpha = 0.6 * (kIndicatorFrames - o.age) / kIndicatorFrames;
            ring(img, o.x, o.y, 0, 24, Rgb{80, 80, 80}, alpha, all);
            break;
        }
        case IndicatorStyle::Cursor: {
            const int tx = static_cast<int>(std::floor(o.x)), ty = static_cast<int>(std::floor(o.y));
            for (int r = 0; r < static_cast<int>(kCursor.size()); ++r) {
                for (int c = 0; kCursor[r][c]; ++c) {
                    const int x = tx + c, y = ty + r;
                    if (!all.contains(x, y)) continue;
                    if (kCursor[r][c] == 'X') img.set(x, y, Rgb{0, 0, 0});
                    else if (kCursor[r][c] == 'o') img.set(x, y, Rgb{235, 235, 235});
                }
            }
            break;
        }
        case IndicatorStyle::Custom:
            ring(img, o.x, o.y, 16, 22, Rgb{233, 30, 99}, 0.85, all);
            break;
    }
}

void mangle_first_space(std::vector<OcrItem>& items) {
    auto ordered = reading_order(items);
    for (const auto& it : ordered) {
        const auto pos = it.text.find(' ');
        if (pos == std::string::npos) continue;
        for (auto& orig : items) {
            if (orig == it) {
                orig.text.erase(pos, 1);
                return;
            }
        }
    }
}

Rendered render_frame(const SessionScript& script, const FrameState& st) {
    const ScreenSpec& screen = script.screens[st.screen];
    const int w = script.width, h = script.height;
    Rendered out{RgbImage(w, h, screen.background), {}};
    const Box content{0, kAppBarBottom, w, h - kAppBarBottom};

    if (st.placeholder) {
        for (int i = 0; i < 7; ++i) {
            const int bw = w - 48 - (i * 37) % 120;
            fill(out.image, {24, kAppBarBottom + 24 + i * 62, bw, 18}, Rgb{224, 224, 224}, content);
            fill(out.image, {24, kAppBarBottom + 48 + i * 62, bw / 2, 12}, Rgb{236, 236, 236}, content);
        }
    } else {
        for (const auto& wd : screen.widgets) {
            if (wd.fixed()) continue;
            const Box b{wd.box.x, wd.box.y - st.scroll, wd.box.w, wd.box.h};
            const Box vis = intersect(b, content);
            if (vis.h * 5 < b.h * 3 || vis.w == 0) {
                // Mostly hidden: draw what shows but do not annotate it.
                Rendered scratch{std::move(out.image), {}};
                auto it = st.fields.find(field_key(screen, wd));
                draw_widget(scratch, wd, b, content, it == st.fields.end() ? "" : it->second);
                out.image = std::move(scratch.image);
                continue;
            }
            auto it = st.fields.find(field_key(screen, wd));
            draw_widget(out, wd, b, content, it == st.fields.end() ? "" : it->second);
        }
        // Row dividers give long lists some structure between labels.
        for (const auto& wd : screen.widgets) {
            if (wd.fixed() || wd.id.rfind("row", 0) != 0) continue;
            fill(out.image, {16, wd.box.bottom() + 6 - st.scroll, w - 32, 1}, Rgb{224, 224, 224}, content);
        }
    }

    // Chrome over the content.
    const Box all{0, 0, w, h};
    const Rgb status{static_cast<std::uint8_t>(screen.app_bar.r * 3 / 4),
                     static_cast<std::uint8_t>(screen.app_bar.g * 3 / 4),
                     static_cast<std::uint8_t>(screen.app_bar.b * 3 / 4)};
    fill(out.image, {0, 0, w, kStatusBarHeight}, status, all);
    for (int i = 0; i < 3; ++i) fill(out.image, {w - 20 - i * 16, 8, 10, 9}, kWhite, all);
    fill(out.image, {0, kStatusBarHeight, w, kAppBarBottom - kStatusBarHeight}, screen.app_bar, all);
    {
        const int tx = 56, ty = kStatusBarHeight + (kAppBarBottom - kStatusBarHeight - text_height(kGlyphScale)) / 2;
        text(out.image, tx, ty, screen.title, kWhite, kGlyphScale, all);
        const Box tb = text_box(tx, ty, screen.title, kGlyphScale);
        out.ann.ocr.push_back({screen.title, tb, 0.98});
        FrameAnnotations::Element e;
        e.klass = ElementClass::TextView;
        e.box = tb;
        e.text = screen.title;
        e.text_confid = 0.98;
        out.ann.elements.push_back(e);
    }
    for (const auto& wd : screen.widgets)
        if (wd.fixed()) draw_widget(out, wd, wd.box, all, "");

    if (st.keyboard) draw_keyboard(out, *st.keyboard);
    if (st.overlay) draw_overlay(out.image, *st.overlay);
    if (st.mangle) mangle_first_space(out.ann.ocr);
    return out;
}

void add_noise(RgbImage& img, double sigma, std::uint64_t seed, int frame) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(frame) * 0xbf58476d1ce4e5b9ULL + 1);
    std::normal_distribution<double> dist(0.0, sigma);
    auto bytes = img.bytes();
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        const int n = static_cast<int>(std::lround(dist(rng)));
        for (int c = 0; c < 3; ++c) bytes[i + c] = static_cast<std::uint8_t>(std::clamp(bytes[i + c] + n, 0, 255));
    }
}

// --- timeline ----------------------------------------------------------------

int screen_index(const SessionScript& s, const std::string& id) {
    for (std::size_t i = 0; i < s.screens.size(); ++i)
        if (s.screens[i].id == id) return static_cast<int>(i);
    return -1;
}

const WidgetSpec* find_widget(const ScreenSpec& s, const std::string& id) {
    for (const auto& w : s.widgets)
        if (w.id == id) return &w;
    return nullptr;
}

Box on_screen(const WidgetSpec& w, int scroll) {
    return w.fixed() ? w.box : Box{w.box.x, w.box.y - scroll, w.box.w, w.box.h};
}

bool fully_visible(const SessionScript& s, const WidgetSpec& w, int scroll, int bottom_limit) {
    if (w.fixed()) return true;
    const Box b = on_screen(w, scroll);
    return b.y >= kAppBarBottom && b.bottom() <= bottom_limit && b.x >= 0 && b.right() <= s.width;
}

int auto_scroll_frames(int distance) {
    const int d = std::abs(distance);
    return std::min(d, std::clamp(12 + d / 40, 12, 32));
}

}  // namespace

std::vector<int> scroll_schedule(int distance, int frames);

std::vector<int> scroll_schedule(int distance, int frames) {
    const int total = std::abs(distance);
    std::vector<int> steps(static_cast<std::size_t>(frames), 1);
    if (frames <= 0 || total < frames) return {};
    // Decreasing weights give an ease-out; every step moves at least one pixel.
    const long wsum = static_cast<long>(frames) * (frames + 1) / 2;
    const int spare = total - frames;
    std::vector<std::pair<long, int>> rem;
    int used = 0;
    for (int i = 0; i < frames; ++i) {
        const long num = static_cast<long>(spare) * (frames - i);
        steps[i] += static_cast<int>(num / wsum);
        used += static_cast<int>(num / wsum);
        rem.push_back({num % wsum, i});
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto a, auto b) { return a.first > b.first; });
    for (int k = 0; k < spare - used; ++k) steps[rem[k].second] += 1;
    if (distance < 0)
        for (auto& s : steps) s = -s;
    return steps;
}

std::string apply_keys(const std::vector<std::string>& keys) {
    std::string text;
    std::size_t cursor = 0;
    for (const auto& k : keys) {
        if (k == "<left>") {
            if (cursor > 0) --cursor;
        } else if (k == "<right>") {
            if (cursor < text.size()) ++cursor;
        } else if (k == "<bs>") {
            if (cursor > 0) {
                text.erase(cursor - 1, 1);
                --cursor;
            }
        } else {
            text.insert(cursor, k);
            cursor += k.size();
        }
    }
    return text;
}

namespace {

struct Timeline {
    std::vector<FrameState> frames;
    std::vector<TruthAction> truth;
};

Timeline build_timeline(const SessionScript& script) {
    Timeline tl;
    FrameState cur;
    cur.screen = screen_index(script, script.start_screen);
    auto emit = [&](const FrameState& s, int n) {
        for (int i = 0; i < n; ++i) tl.frames.push_back(s);
    };
    auto overlay_for = [&](int p, int frame, double x, double y) -> std::optional<Overlay> {
        const int age = frame - p;
        if (age < 0 || age >= kIndicatorFrames) return std::nullopt;
        return Overlay{script.indicator, x, y, age};
    };

    emit(cur, script.lead_frames);
    int previous_end = static_cast<int>(tl.frames.size()) - 1;
    for (std::size_t ai = 0; ai < script.actions.size(); ++ai) {
        const ActionSpec& a = script.actions[ai];
        emit(cur, a.gap_before);
        const int p = static_cast<int>(tl.frames.size());
        const ScreenSpec& screen = script.screens[cur.screen];
        TruthAction t;
        t.kind = a.kind;
        t.start_frame = p;

        if (a.kind == ActionKind::Tap || a.kind == ActionKind::Input) {
            const WidgetSpec* w = find_widget(screen, a.target);
            const Box b = on_screen(*w, cur.scroll);
            const double x = b.x + b.w * a.tap_x.value_or(0.5);
            const double y = b.y + b.h * a.tap_y.value_or(0.5);
            t.tap = TapPoint{x / script.width, y / script.height};
            t.target_box = b;

            if (a.kind == ActionKind::Tap) {
                const int target = screen_index(script, a.go_to);
                const int end = std::max(p + kIndicatorFrames - 1, p + kSwapDelay + a.loading_frames);
                for (int f = p; f <= end; ++f) {
                    FrameState s = cur;
                    if (f >= p + kSwapDelay) {
                        s.screen = target;
                        s.scroll = 0;
                        s.placeholder = f < p + kSwapDelay + a.loading_frames;
                    }
                    s.overlay = overlay_for(p, f, x, y);
                    tl.frames.push_back(s);
                }
                cur.screen = target;
                cur.scroll = 0;
                t.end_frame = end;
                if (a.loading_frames > 0) t.steady_gap = std::make_pair(p + kSwapDelay, p + kSwapDelay + a.loading_frames - 1);
            } else {
                const std::string key = field_key(screen, *w);
                const int kb_open = p + kSwapDelay;
                const int first_key = kb_open + kFirstKeyDelay;
                const int n_keys = static_cast<int>(a.keys.size());
                const int last_key = n_keys > 0 ? first_key + (n_keys - 1) * a.key_interval : kb_open;
                const int close = last_key + kCloseDelay;
                std::vector<std::string> typed;
                for (int f = p; f <= close; ++f) {
                    FrameState s = cur;
                    s.overlay = overlay_for(p, f, x, y);
                    if (f >= kb_open && f < close) {
                        const int since = f - first_key;
                        if (since >= 0 && since % a.key_interval == 0 && since / a.key_interval < n_keys)
                            typed.push_back(a.keys[since / a.key_interval]);
                        s.fields[key] = apply_keys(typed);
                        KeyboardView kv;
                        kv.layout = a.keyboard;
                        kv.field_text = s.fields[key];
                        if (since >= 0) {
                            const int idx = since / a.key_interval;
                            const int phase = since % a.key_interval;
                            if (idx < n_keys && phase < 2) kv.pressed = a.keys[idx];
                        }
                        s.keyboard = kv;
                    } else if (f >= close) {
                        s.fields[key] = apply_keys(typed);
                    }
                    tl.frames.push_back(s);
                }
                cur.fields[key] = apply_keys(a.keys);
                t.end_frame = close;
                t.text = apply_keys(a.keys);
                t.keyboard_span = std::make_pair(kb_open, close - 1);
                if (a.mangle_space)
                    for (int f = previous_end + 1; f < kb_open; ++f) tl.frames[f].mangle = true;
            }
        } else {
            const int frames = a.scroll_frames > 0 ? a.scroll_frames : auto_scroll_frames(a.scroll_px);
            const auto steps = scroll_schedule(a.scroll_px, frames);
            for (int d : steps) {
                cur.scroll += d;
                tl.frames.push_back(cur);
            }
            t.end_frame = p + frames - 1;
            t.scroll_px = a.scroll_px;
        }
        previous_end = t.end_frame;
        tl.truth.push_back(t);
    }
    emit(cur, script.tail_frames);
    return tl;
}

}  // namespace

// --- validation --------------------------------------------------------------

void validate_script(const SessionScript& s) {
    auto fail = [](const std::string& m) { throw ScriptError(m); };
    if (!(s.fps > 0)) fail("fps must be positive");
    if (s.width < 200 || s.height < 400) fail("frame size must be at least 200x400");
    if (s.noise_sigma < 0) fail("noise_sigma must be non-negative");
    if (s.lead_frames < 1 || s.tail_frames < 1) fail("lead_frames and tail_frames must be >= 1");
    if (s.screens.empty()) fail("script has no screens");
    std::set<std::string> ids;
    for (const auto& sc : s.screens) {
        if (sc.id.empty() || !ids.insert(sc.id).second) fail("screen ids must be unique and non-empty");
        if (sc.content_height < s.height) fail("screen '" + sc.id + "': content_height below frame height");
        std::set<std::string> wids;
        for (const auto& w : sc.widgets) {
            if (w.id.empty() || !wids.insert(w.id).second)
                fail("screen '" + sc.id + "': widget ids must be unique and non-empty");
            if (w.box.w <= 0 || w.box.h <= 0 || w.box.x < 0 || w.box.right() > s.width || w.box.y < kStatusBarHeight ||
                w.box.bottom() > sc.content_height)
                fail("screen '" + sc.id + "': widget '" + w.id + "' lies outside the screen");
            if (w.fixed() && w.box.bottom() > kAppBarBottom)
                fail("screen '" + sc.id + "': widget '" + w.id + "' straddles the app bar");
            if (w.text_confid < 0 || w.text_confid > 1 || w.caption_confid < 0 || w.caption_confid > 1)
                fail("screen '" + sc.id + "': widget '" + w.id + "' has a confidence outside [0,1]");
        }
    }
    if (screen_index(s, s.start_screen) < 0) fail("start_screen '" + s.start_screen + "' does not exist");

    // Walk the actions to check targets against the state they will meet.
    int screen = screen_index(s, s.start_screen);
    int scroll = 0;
    std::set<std::string> filled;
    for (std::size_t i = 0; i < s.actions.size(); ++i) {
        const auto& a = s.actions[i];
        const std::string where = "action " + std::to_string(i) + ": ";
        if (a.gap_before < 1) fail(where + "gap_before must be >= 1");
        const ScreenSpec& sc = s.screens[screen];
        if (a.kind == ActionKind::Tap || a.kind == ActionKind::Input) {
            const WidgetSpec* w = find_widget(sc, a.target);
            if (!w) fail(where + "target '" + a.target + "' is not on screen '" + sc.id + "'");
            for (auto f : {a.tap_x, a.tap_y})
                if (f && (*f < 0 || *f >= 1)) fail(where + "tap fractions must lie in [0,1)");
            const int limit = a.kind == ActionKind::Input ? keyboard_top(s.height) : s.height;
            if (!fully_visible(s, *w, scroll, limit))
                fail(where + "target '" + a.target + "' is not fully visible when the action starts");
            if (a.kind == ActionKind::Tap) {
                const int next = screen_index(s, a.go_to);
                if (next < 0) fail(where + "go_to screen '" + a.go_to + "' does not exist");
                if (next == screen) fail(where + "go_to must lead to a different screen");
                if (a.loading_frames < 0) fail(where + "loading_frames must be >= 0");
                screen = next;
                scroll = 0;
            } else {
                if (w->klass != ElementClass::EditText) fail(where + "INPUT target must be an edittext");
                if (!filled.insert(field_key(sc, *w)).second) fail(where + "field already filled");
                if (a.key_interval < 3) fail(where + "key_interval must be >= 3");
                for (const auto& k : a.keys) {
                    const bool special = k == "<left>" || k == "<right>" || k == "<bs>";
                    if (!special && (k.size() != 1 || k[0] < 0x20 || k[0] > 0x7e))
                        fail(where + "keys must be single printable characters or <left>/<right>/<bs>");
                }
            }
        } else {
            if (a.scroll_px == 0) fail(where + "scroll_px must be non-zero");
            const int frames = a.scroll_frames > 0 ? a.scroll_frames : auto_scroll_frames(a.scroll_px);
            if (std::abs(a.scroll_px) < frames) fail(where + "scroll_px must be at least the number of scroll frames");
            const int next = scroll + a.scroll_px;
            if (next < 0 || next > sc.content_height - s.height)
                fail(where + "scroll leaves the content range of screen '" + sc.id + "'");
            const int per_frame = (std::abs(a.scroll_px) * 2 + frames) / frames;
            if (per_frame > s.height / 3) fail(where + "scroll is too fast for the frame rate");
            scroll = next;
        }
    }
}

// --- generation --------------------------------------------------------------

GeneratedSession generate_recording(const SessionScript& script, std::uint64_t seed) {
    validate_script(script);
    const Timeline tl = build_timeline(script);
    GeneratedSession g;
    const int n = static_cast<int>(tl.frames.size());
    g.frames.resize(static_cast<std::size_t>(n));
    g.annotations.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 4)
    for (int f = 0; f < n; ++f) {
        Rendered r = render_frame(script, tl.frames[f]);
        if (script.noise_sigma > 0) add_noise(r.image, script.noise_sigma, seed, f);
        g.frames[f] = std::move(r.image);
        g.annotations[f] = std::move(r.ann);
    }
    g.trace.fps = script.fps;
    g.trace.width = script.width;
    g.trace.height = script.height;
    g.trace.frame_count = n;
    g.trace.seed = seed;
    g.trace.indicator = script.indicator;
    g.trace.actions = tl.truth;
    for (int f = 0; f < n; ++f)
        if (!tl.frames[f].keyboard && is_keyboard_frame(g.annotations[f].ocr)) g.trace.trigger_frames.push_back(f);
    return g;
}

// --- JSON --------------------------------------------------------------------

namespace {

ordered_json box_json(const Box& b) { return {b.x, b.y, b.w, b.h}; }

Box box_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4) throw ScriptError(what + ": box must be [x, y, w, h]");
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

ordered_json rgb_json(Rgb c) { return {c.r, c.g, c.b}; }

Rgb rgb_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) throw ScriptError(what + ": colour must be [r, g, b]");
    auto ch = [&](int i) {
        const int v = j[i].get<int>();
        if (v < 0 || v > 255) throw ScriptError(what + ": colour channel outside 0..255");
        return static_cast<std::uint8_t>(v);
    };
    return {ch(0), ch(1), ch(2)};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
            throw ScriptError(what + ": unknown key '" + k + "'");
    }
}

}  // namespace

ordered_json script_to_json(const SessionScript& s) {
    ordered_json j;
    j["schema"] = "1";
    j["fps"] = s.fps;
    j["width"] = s.width;
    j["height"] = s.height;
    j["indicator"] = to_string(s.indicator);
    j["noise_sigma"] = s.noise_sigma;
    j["lead_frames"] = s.lead_frames;
    j["tail_frames"] = s.tail_frames;
    j["start_screen"] = s.start_screen;
    j["screens"] = ordered_json::array();
    for (const auto& sc : s.screens) {
        ordered_json o;
        o["id"] = sc.id;
        o["title"] = sc.title;
        o["background"] = rgb_json(sc.background);
        o["app_bar"] = rgb_json(sc.app_bar);
        o["content_height"] = sc.content_height;
        o["widgets"] = ordered_json::array();
        for (const auto& w : sc.widgets) {
            ordered_json wj;
            wj["id"] = w.id;
            wj["class"] = std::string(class_name(w.klass));
            wj["box"] = box_json(w.box);
            if (!w.text.empty()) wj["text"] = w.text;
            wj["text_confid"] = w.text_confid;
            if (!w.caption.empty()) {
                wj["caption"] = w.caption;
                wj["caption_confid"] = w.caption_confid;
            }
            if (!w.inner_label.empty()) wj["inner_label"] = w.inner_label;
            if (w.checked) wj["checked"] = true;
            wj["color"] = rgb_json(w.color);
            o["widgets"].push_back(wj);
        }
        j["screens"].push_back(o);
    }
    j["actions"] = ordered_json::array();
    for (const auto& a : s.actions) {
        ordered_json o;
        o["kind"] = std::string(to_string(a.kind));
        o["gap_before"] = a.gap_before;
        switch (a.kind) {
            case ActionKind::Tap:
                o["target"] = a.target;
                if (a.tap_x) o["tap_x"] = *a.tap_x;
                if (a.tap_y) o["tap_y"] = *a.tap_y;
                o["go_to"] = a.go_to;
                o["loading_frames"] = a.loading_frames;
                break;
            case ActionKind::Scroll:
                o["scroll_px"] = a.scroll_px;
                if (a.scroll_frames > 0) o["scroll_frames"] = a.scroll_frames;
                break;
            case ActionKind::Input:
                o["target"] = a.target;
                if (a.tap_x) o["tap_x"] = *a.tap_x;
                if (a.tap_y) o["tap_y"] = *a.tap_y;
                o["keys"] = a.keys;
                o["keyboard"] = to_string(a.keyboard);
                o["key_interval"] = a.key_interval;
                if (a.mangle_space) o["mangle_space"] = true;
                break;
        }
        j["actions"].push_back(o);
    }
    return j;
}

SessionScript script_from_json(const json& j) {
    SessionScript s;
    try {
        if (!j.is_object()) throw ScriptError("script must be a JSON object");
        check_keys(j,
                   {"schema", "fps", "width", "height", "indicator", "noise_sigma", "lead_frames", "tail_frames",
                    "start_screen", "screens", "actions"},
                   "script");
        s.fps = j.value("fps", 30.0);
        s.width = j.value("width", 360);
        s.height = j.value("height", 640);
        const auto style = j.value("indicator", std::string("default"));
        const auto parsed = parse_indicator_style(style);
        if (!parsed) throw ScriptError("unknown indicator style '" + style + "'");
        s.indicator = *parsed;
        s.noise_sigma = j.value("noise_sigma", 0.0);
        s.lead_frames = j.value("lead_frames", 15);
        s.tail_frames = j.value("tail_frames", 20);
        for (const auto& sj : j.at("screens")) {
            ScreenSpec sc;
            check_keys(sj, {"id", "title", "background", "app_bar", "content_height", "widgets"}, "screen");
            sc.id = sj.at("id").get<std::string>();
            sc.title = sj.value("title", sc.id);
            if (sj.contains("background")) sc.background = rgb_from(sj["background"], "screen " + sc.id);
            if (sj.contains("app_bar")) sc.app_bar = rgb_from(sj["app_bar"], "screen " + sc.id);
            sc.content_height = sj.value("content_height", s.height);
            for (const auto& wj : sj.value("widgets", json::array())) {
                WidgetSpec w;
                check_keys(wj,
                           {"id", "class", "box", "text", "text_confid", "caption", "caption_confid", "inner_label",
                            "checked", "color"},
                           "widget");
                w.id = wj.at("id").get<std::string>();
                const auto cls = wj.at("class").get<std::string>();
                const auto k = parse_element_class(cls);
                if (!k) throw ScriptError("widget '" + w.id + "': unknown class '" + cls + "'");
                w.klass = *k;
                w.box = box_from(wj.at("box"), "widget " + w.id);
                w.text = wj.value("text", std::string());
                w.text_confid = wj.value("text_confid", 0.97);
                w.caption = wj.value("caption", std::string());
                w.caption_confid = wj.value("caption_confid", 0.9);
                w.inner_label = wj.value("inner_label", std::string());
                w.checked = wj.value("checked", false);
                if (wj.contains("color")) w.color = rgb_from(wj["color"], "widget " + w.id);
                sc.widgets.push_back(w);
            }
            s.screens.push_back(sc);
        }
        s.start_screen = j.value("start_screen", s.screens.empty() ? std::string() : s.screens.front().id);
        for (const auto& aj : j.value("actions", json::array())) {
            ActionSpec a;
            check_keys(aj,
                       {"kind", "gap_before", "target", "tap_x", "tap_y", "go_to", "loading_frames", "scroll_px",
                        "scroll_frames", "keys", "text", "keyboard", "key_interval", "mangle_space"},
                       "action");
            const auto kind = aj.at("kind").get<std::string>();
            const auto k = parse_action_kind(kind);
            if (!k) throw ScriptError("unknown action kind '" + kind + "'");
            a.kind = *k;
            a.gap_before = aj.value("gap_before", 30);
            a.target = aj.value("target", std::string());
            if (aj.contains("tap_x")) a.tap_x = aj["tap_x"].get<double>();
            if (aj.contains("tap_y")) a.tap_y = aj["tap_y"].get<double>();
            a.go_to = aj.value("go_to", std::string());
            a.loading_frames = aj.value("loading_frames", 0);
            a.scroll_px = aj.value("scroll_px", 0);
            a.scroll_frames = aj.value("scroll_frames", 0);
            if (aj.contains("keys")) a.keys = aj["keys"].get<std::vector<std::string>>();
            if (aj.contains("text"))
                for (char c : aj["text"].get<std::string>()) a.keys.emplace_back(1, c);
            const auto layout = aj.value("keyboard", std::string("qwerty"));
            const auto kl = parse_keyboard_layout(layout);
            if (!kl) throw ScriptError("unknown keyboard layout '" + layout + "'");
            a.keyboard = *kl;
            a.key_interval = aj.value("key_interval", 5);
            a.mangle_space = aj.value("mangle_space", false);
            s.actions.push_back(a);
        }
    } catch (const json::exception& e) {
        throw ScriptError(std::string("malformed script: ") + e.what());
    }
    validate_script(s);
    return s;
}

SessionScript load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptError("cannot open script " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ScriptError(path.string() + ": " + e.what());
    }
    return script_from_json(j);
}

ordered_json trace_to_json(const GroundTruthTrace& t) {
    ordered_json j;
    j["schema"] = "1";
    j["fps"] = t.fps;
    j["width"] = t.width;
    j["height"] = t.height;
    j["frame_count"] = t.frame_count;
    j["seed"] = t.seed;
    j["indicator"] = to_string(t.indicator);
    j["frames"] = {{"ocr", "frame_NNNNNN.ocr.json"}, {"elements", "frame_NNNNNN.elements.json"}};
    j["actions"] = ordered_json::array();
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
        const auto& a = t.actions[i];
        ordered_json o;
        o["index"] = i;
        o["kind"] = std::string(to_string(a.kind));
        o["start_frame"] = a.start_frame;
        o["end_frame"] = a.end_frame;
        if (a.tap) o["tap"] = {{"x", a.tap->x}, {"y", a.tap->y}};
        if (a.target_box) o["target_box"] = box_json(*a.target_box);
        if (a.scroll_px) o["scroll_px"] = *a.scroll_px;
        if (a.text) o["text"] = *a.text;
        if (a.steady_gap) o["steady_gap"] = {a.steady_gap->first, a.steady_gap->second};
        if (a.keyboard_span) o["keyboard_span"] = {a.keyboard_span->first, a.keyboard_span->second};
        j["actions"].push_back(o);
    }
    j["trigger_frames"] = t.trigger_frames;
    return j;
}

GroundTruthTrace trace_from_json(const json& j) {
    GroundTruthTrace t;
    try {
        t.fps = j.at("fps").get<double>();
        t.width = j.at("width").get<int>();
        t.height = j.at("height").get<int>();
        t.frame_count = j.at("frame_count").get<int>();
        t.seed = j.value("seed", std::uint64_t{0});
        t.indicator = parse_indicator_style(j.value("indicator", std::string("default"))).value_or(IndicatorStyle::Default);
        for (const auto& o : j.at("actions")) {
            TruthAction a;
            const auto k = parse_action_kind(o.at("kind").get<std::string>());
            if (!k) throw ScriptError("trace: unknown action kind");
            a.kind = *k;
            a.start_frame = o.at("start_frame").get<int>();
            a.end_frame = o.at("end_frame").get<int>();
            if (o.contains("tap")) a.tap = TapPoint{o["tap"].at("x").get<double>(), o["tap"].at("y").get<double>()};
            if (o.contains("target_box")) a.target_box = box_from(o["target_box"], "trace");
            if (o.contains("scroll_px")) a.scroll_px = o["scroll_px"].get<int>();
            if (o.contains("text")) a.text = o["text"].get<std::string>();
            if (o.contains("steady_gap")) a.steady_gap = std::make_pair(o["steady_gap"][0].get<int>(), o["steady_gap"][1].get<int>());
            if (o.contains("keyboard_span"))
                a.keyboard_span = std::make_pair(o["keyboard_span"][0].get<int>(), o["keyboard_span"][1].get<int>());
            t.actions.push_back(a);
        }
        if (j.contains("trigger_frames")) t.trigger_frames = j["trigger_frames"].get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ScriptError(std::string("malformed trace: ") + e.what());
    }
    return t;
}

GroundTruthTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptError("cannot open trace " + path.string());
    try {
        return trace_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ScriptError(path.string() + ": " + e.what());
    }
}

void write_session(const std::filesystem::path& dir, const GeneratedSession& session, const SessionScript& script) {
    const auto paths = write_recording(dir, session.frames, script.fps);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        write_text_file(fixture_path(paths[i], "ocr"), ocr_to_json(session.annotations[i].ocr).dump() + "\n");
        write_text_file(fixture_path(paths[i], "elements"),
                        elements_to_json(session.annotations[i].elements).dump() + "\n");
    }
    write_text_file(dir / "trace.json", trace_to_json(session.trace).dump(2) + "\n");
    write_text_file(dir / "script.json", script_to_json(script).dump(2) + "\n");
}

// --- random scripts ----------------------------------------------------------

namespace {

const std::vector<std::string> kTitles = {"Settings", "Profile", "Library", "Inbox",   "Explore", "Wallet",
                                          "Travel",   "Recipes", "Garden",  "Fitness", "Journal", "Podcasts"};
const std::vector<std::string> kWords = {
    "Account", "Privacy", "Display",  "Sound",    "Battery",  "Storage", "Network", "Language", "Backup",
    "Updates", "About",   "Help",     "Friends",  "Messages", "Photos",  "Music",   "Videos",   "Calendar",
    "Contacts", "Notes",  "Weather",  "Maps",     "Camera",   "Gallery", "Security", "Themes",  "Fonts",
    "Alarms",  "Sharing", "Devices",  "Reminders", "Offline", "Cloud",   "Archive", "Labels",   "Billing"};
const std::vector<std::string> kPhrases = {
    "Dark Mode",   "Night Light", "Data Saver",     "Auto Rotate",  "Full Name",    "Home Address",
    "Phone Number", "Email Address", "Advanced Setting", "Audio cue settings", "Sync Now", "Clear Cache",
    "Send Report", "Log Out",     "Add Friend",     "Edit Profile", "Open Map",     "Play All"};
const std::vector<std::string> kAdjectives = {"Blue",  "Quiet", "Golden", "Silver", "Rapid", "Gentle", "Hidden",
                                              "Lunar", "Solar", "Amber",  "Frosty", "Misty", "Sunny",  "Brave",
                                              "Little", "Royal", "Crimson", "Velvet", "Wild",  "Distant"};
const std::vector<std::string> kNouns = {"Harbor", "Forest", "Canyon", "Meadow", "River", "Summit", "Island",
                                         "Garden", "Valley", "Bridge", "Tower",  "Market", "Lagoon", "Prairie",
                                         "Orchard", "Glacier", "Desert", "Beacon", "Castle", "Station"};
const std::vector<std::string> kButtons = {"OK",   "Save", "Next", "Done", "Apply", "Cancel", "Retry",
                                           "Send", "Open", "Join", "Share", "Start", "Close", "Later"};
const std::vector<std::string> kTypedWords = {"John", "Maria", "hello", "Lisbon", "banana", "Pixel",
                                              "coffee", "Oslo",  "tiger", "Nadia",  "violet", "Kyoto"};
const std::vector<std::string> kTypedNumbers = {"100", "250", "75", "4200", "31", "960", "18", "2024", "500", "64"};
const std::vector<std::string> kCaptions = {"menu", "search", "share", "friend", "settings", "favorite"};
const std::vector<Rgb> kBackgrounds = {{250, 250, 250}, {255, 248, 225}, {232, 245, 233},
                                       {227, 242, 253}, {243, 229, 245}, {255, 235, 238}};
const std::vector<Rgb> kAppBars = {{63, 81, 181}, {0, 121, 107}, {123, 31, 162}, {191, 54, 12}, {69, 90, 100}, {2, 119, 189}};
const std::vector<Rgb> kAccents = {{33, 150, 243}, {0, 150, 136}, {156, 39, 176}, {230, 81, 0}, {56, 142, 60}};

class Picker {
public:
    explicit Picker(std::mt19937_64& rng) : rng_(rng) {}
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool chance(double p) { return real(0, 1) < p; }
    template <typename T>
    const T& one(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))]; }
    // Draws without repeating within one pool.
    std::string fresh(const std::vector<std::string>& pool, std::set<std::string>& used) {
        for (int tries = 0; tries < 200; ++tries) {
            const auto& s = one(pool);
            if (used.insert(s).second) return s;
        }
        for (const auto& s : pool)
            if (used.insert(s).second) return s;
        throw std::logic_error("vocabulary exhausted");
    }

private:
    std::mt19937_64& rng_;
};

ScreenSpec random_screen(Picker& pick, const std::string& id, const std::string& title, int index, int width,
                         int height, bool uniform_list) {
    ScreenSpec sc;
    sc.id = id;
    sc.title = title;
    sc.background = kBackgrounds[static_cast<std::size_t>(index) % kBackgrounds.size()];
    sc.app_bar = kAppBars[static_cast<std::size_t>(index) % kAppBars.size()];
    const Rgb accent = pick.one(kAccents);
    std::set<std::string> used{title};
    int y = kAppBarBottom + 16;
    int n = 0;
    auto wid = [&](const std::string& prefix) { return prefix + std::to_string(n++); };

    WidgetSpec menu;
    menu.id = "menu";
    menu.klass = ElementClass::Icon;
    menu.box = {8, kStatusBarHeight + 12, 32, 32};
    menu.caption = "menu";
    menu.caption_confid = pick.chance(0.5) ? 0.93 : 0.75;
    sc.widgets.push_back(menu);
    WidgetSpec side;
    side.id = "action";
    side.klass = ElementClass::Icon;
    side.box = {width - 44, kStatusBarHeight + 12, 32, 32};
    side.caption = pick.one(std::vector<std::string>(kCaptions.begin() + 1, kCaptions.end()));
    side.caption_confid = pick.chance(0.5) ? 0.95 : 0.7;
    sc.widgets.push_back(side);

    auto confid = [&]() {
        const double r = pick.real(0, 1);
        return r < 0.7 ? 0.97 : r < 0.85 ? 0.72 : 0.4;
    };

    // Form fields.
    const int fields = pick.uniform(1, 2);
    for (int f = 0; f < fields; ++f) {
        const std::string label = pick.fresh(pick.chance(0.5) ? kPhrases : kWords, used);
        WidgetSpec field;
        field.klass = ElementClass::EditText;
        field.color = accent;
        field.text_confid = confid();
        if (pick.chance(0.5)) {
            WidgetSpec lab;
            lab.id = wid("label");
            lab.klass = ElementClass::TextView;
            lab.text = label;
            lab.text_confid = 0.97;
            lab.box = {24, y, text_width(label, kGlyphScale), text_height(kGlyphScale)};
            sc.widgets.push_back(lab);
            y += 22;
            field.id = wid("field");
            field.box = {24, y, width - 48, 44};
        } else {
            field.id = wid("field");
            field.inner_label = label;
            field.box = {24, y, width - 48, 48};
        }
        sc.widgets.push_back(field);
        y += field.box.h + 14;
    }

    // Buttons.
    const int buttons = pick.uniform(1, 2);
    const int bw = (width - 48 - 16) / 2;
    for (int b = 0; b < buttons; ++b) {
        WidgetSpec btn;
        btn.id = wid("button");
        btn.klass = ElementClass::Button;
        btn.text = pick.fresh(kButtons, used);
        btn.text_confid = confid();
        btn.color = accent;
        btn.box = {24 + b * (bw + 16), y, bw, 44};
        sc.widgets.push_back(btn);
    }
    y += 44 + 16;

    // Toggles with labels.
    const int toggles = pick.uniform(1, 3);
    for (int t = 0; t < toggles; ++t) {
        WidgetSpec ctl;
        ctl.id = wid("toggle");
        const int kind = pick.uniform(0, 2);
        ctl.klass = kind == 0 ? ElementClass::Checkbox : kind == 1 ? ElementClass::Switch : ElementClass::RadioButton;
        ctl.checked = pick.chance(0.5);
        ctl.color = accent;
        ctl.box = {20, y, ctl.klass == ElementClass::Switch ? 52 : 36, 36};
        sc.widgets.push_back(ctl);
        WidgetSpec lab;
        lab.id = wid("label");
        lab.klass = ElementClass::TextView;
        lab.text = pick.fresh(pick.chance(0.5) ? kPhrases : kWords, used);
        lab.text_confid = confid();
        lab.box = {ctl.box.right() + 12, y + 11, text_width(lab.text, kGlyphScale), text_height(kGlyphScale)};
        sc.widgets.push_back(lab);
        y += 36 + 12;
    }

    // A picture with a caption line.
    if (pick.chance(0.6)) {
        WidgetSpec img;
        img.id = wid("image");
        img.klass = ElementClass::ImageView;
        img.box = {24, y, 96, 64};
        sc.widgets.push_back(img);
        WidgetSpec sp;
        sp.id = wid("spinner");
        sp.klass = ElementClass::Spinner;
        sp.text = pick.fresh(kWords, used);
        sp.text_confid = confid();
        sp.box = {136, y + 12, width - 160, 40};
        sc.widgets.push_back(sp);
        y += 64 + 16;
    }

    // List rows fill the rest of the content.
    const int target_height = pick.uniform(height + 300, height * 3);
    std::set<std::string> row_names;
    const std::string repeated = pick.one(kNouns);
    while (y + 72 < target_height) {
        const int h = pick.uniform(44, 72);
        WidgetSpec row;
        row.id = wid("row");
        row.klass = ElementClass::TextView;
        if (uniform_list) {
            row.text = repeated;
        } else {
            std::string name;
            do {
                name = pick.one(kAdjectives) + " " + pick.one(kNouns);
            } while (!row_names.insert(name).second || used.count(name));
            row.text = name;
        }
        row.text_confid = 0.97;
        const int x = pick.uniform(20, 40);
        row.box = {x, y + (h - text_height(kGlyphScale)) / 2, text_width(row.text, kGlyphScale), text_height(kGlyphScale)};
        sc.widgets.push_back(row);
        if (pick.chance(0.5)) {
            WidgetSpec thumb;
            thumb.id = wid("thumb");
            thumb.klass = ElementClass::ImageView;
            thumb.box = {width - 64, y + (h - 32) / 2, 32, 32};
            sc.widgets.push_back(thumb);
        }
        y += h + 12;
    }
    sc.content_height = std::max(height, y + 24);
    return sc;
}

bool tappable(const WidgetSpec& w) {
    return w.klass != ElementClass::EditText && w.klass != ElementClass::Chronometer;
}

std::vector<std::string> keys_for(Picker& pick, const std::string& word, bool edit) {
    std::vector<std::string> keys;
    if (!edit || word.size() < 3) {
        for (char c : word) keys.emplace_back(1, c);
        return keys;
    }
    // Type everything but a middle run, walk back, fill the gap in.
    const std::size_t cut = static_cast<std::size_t>(pick.uniform(1, static_cast<int>(word.size()) - 2));
    const std::size_t len = 1;
    const std::string head = word.substr(0, cut), mid = word.substr(cut, len), tail = word.substr(cut + len);
    for (char c : head) keys.emplace_back(1, c);
    if (pick.chance(0.5)) {
        keys.emplace_back("x");
        keys.emplace_back("<bs>");
    }
    for (char c : tail) keys.emplace_back(1, c);
    for (std::size_t i = 0; i < tail.size(); ++i) keys.emplace_back("<left>");
    for (char c : mid) keys.emplace_back(1, c);
    return keys;
}

}  // namespace

SessionScript random_script(std::uint64_t seed, const RandomScriptOptions& opts) {
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 0x1234567ULL);
    Picker pick(rng);
    SessionScript s;
    s.indicator = opts.indicator.value_or(static_cast<IndicatorStyle>(pick.uniform(0, 2)));
    s.noise_sigma = opts.noise_sigma;

    const int n_screens = pick.uniform(4, 6);
    std::set<std::string> titles;
    const bool uniform_list = pick.chance(0.1);
    for (int i = 0; i < n_screens; ++i) {
        const std::string title = pick.fresh(kTitles, titles);
        s.screens.push_back(
            random_screen(pick, "screen" + std::to_string(i), title, i, s.width, s.height, uniform_list && i == 0));
    }
    s.start_screen = s.screens.front().id;

    int screen = 0;
    int scroll = 0;
    std::set<std::string> filled;
    const int n_actions = pick.uniform(opts.min_actions, opts.max_actions);
    for (int i = 0; i < n_actions; ++i) {
        const ScreenSpec& sc = s.screens[screen];
        const int room_down = sc.content_height - s.height - scroll;
        const int room_up = scroll;
        std::vector<const WidgetSpec*> fields, taps;
        for (const auto& w : sc.widgets) {
            if (w.klass == ElementClass::EditText && !filled.count(field_key(sc, w)) &&
                fully_visible(s, w, scroll, keyboard_top(s.height)))
                fields.push_back(&w);
            if (tappable(w) && fully_visible(s, w, scroll, s.height)) taps.push_back(&w);
        }
        double wt = opts.tap_weight, ws = std::max(room_down, room_up) >= 40 ? opts.scroll_weight : 0,
               wi = fields.empty() ? 0 : opts.input_weight;
        if (wt + ws + wi <= 0) wt = 1;
        const double r = pick.real(0, wt + ws + wi);
        ActionSpec a;
        a.gap_before = pick.uniform(24, 40);
        if (r < wt || taps.empty()) {
            a.kind = ActionKind::Tap;
            const WidgetSpec* w = pick.one(taps);
            a.target = w->id;
            a.tap_x = std::round(pick.real(0.35, 0.65) * 100) / 100;
            a.tap_y = std::round(pick.real(0.35, 0.65) * 100) / 100;
            int next = pick.uniform(0, n_screens - 2);
            if (next >= screen) ++next;
            a.go_to = s.screens[next].id;
            if (opts.loading_probability > 0 && pick.chance(opts.loading_probability))
                a.loading_frames = pick.uniform(6, 12);
            screen = next;
            scroll = 0;
        } else if (r < wt + ws) {
            a.kind = ActionKind::Scroll;
            const bool down = room_up < 40 || (room_down >= 40 && pick.chance(0.6));
            const int room = down ? room_down : room_up;
            const int dist = pick.uniform(40, std::min(800, room));
            a.scroll_px = down ? dist : -dist;
            scroll += a.scroll_px;
        } else {
            a.kind = ActionKind::Input;
            const WidgetSpec* w = pick.one(fields);
            a.target = w->id;
            a.tap_x = std::round(pick.real(0.3, 0.7) * 100) / 100;
            a.tap_y = 0.5;
            const int layout = pick.uniform(0, 2);
            a.keyboard = static_cast<KeyboardLayout>(layout);
            std::string word = a.keyboard == KeyboardLayout::Numeric ? pick.one(kTypedNumbers) : pick.one(kTypedWords);
            if (a.keyboard == KeyboardLayout::QwertyCaps) {
                for (auto& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            }
            a.keys = keys_for(pick, word, pick.chance(opts.edit_probability));
            a.key_interval = pick.uniform(4, 6);
            filled.insert(field_key(sc, *w));
        }
        s.actions.push_back(a);
    }
    validate_script(s);
    return s;
}

std::vector<SessionScript> standard_batch(double noise_sigma, int count) {
    std::vector<SessionScript> out;
    for (int i = 0; i < count; ++i) {
        RandomScriptOptions o;
        o.min_actions = 3;
        o.max_actions = 5;
        o.indicator = static_cast<IndicatorStyle>(i % 3);
        o.loading_probability = i % 10 == 3 ? 1.0 : 0.0;
        o.noise_sigma = noise_sigma;
        out.push_back(random_script(7000 + static_cast<std::uint64_t>(i), o));
    }
    return out;
}

}  // namespace recap
