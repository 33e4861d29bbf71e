// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/attributes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <tuple>

namespace recap {

ClipSample sample_clip(const ActionClip& clip) {
    ClipSample s{};
    const long len = clip.length();
    for (int i = 0; i < kClipSampleSize; ++i) {
        if (len >= kClipSampleSize * kClipSampleStride)
            s[i] = clip.start_frame + i * kClipSampleStride;
        else
            s[i] = clip.start_frame + static_cast<int>(i * len / kClipSampleSize);
    }
    return s;
}

// --- tap ---------------------------------------------------------------------

namespace {

struct Blob {
    long pixels = 0;
    double cx = 0;
    double cy = 0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    // First pixel in raster order: the apex of a pointer.
    int apex_x = 0, apex_y = 0;

    // Arrow pointers carry their mass well left of their box centre;
    // rings and dots do not.
    bool pointer_like() const {
        const double bw = x1 - x0 + 1;
        return (x0 + x1 + 1) / 2.0 - cx > 0.08 * bw && apex_x - x0 <= 1;
    }
};

// Qualifying 8-connected components of `mask`.
std::vector<Blob> compact_blobs(std::vector<std::uint8_t>& mask, int w, int h, const IndicatorParams& p) {
    std::vector<Blob> blobs;
    std::vector<int> stack;
    const double max_area = p.max_box_fraction * w * h;
    for (int start = 0; start < w * h; ++start) {
        if (!mask[start]) continue;
        mask[start] = 0;
        stack.assign(1, start);
        long n = 0;
        double sx = 0, sy = 0;
        int x0 = w, y0 = h, x1 = -1, y1 = -1;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            const int x = idx % w, y = idx / w;
            ++n;
            sx += x;
            sy += y;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int nidx = ny * w + nx;
                    if (!mask[nidx]) continue;
                    mask[nidx] = 0;
                    stack.push_back(nidx);
                }
            }
        }
        const int bw = x1 - x0 + 1, bh = y1 - y0 + 1;
        const double box_area = static_cast<double>(bw) * bh;
        if (n < p.min_blob_pixels || box_area > max_area || n < p.min_fill * box_area) continue;
        if (std::max(bw, bh) > p.max_aspect * std::min(bw, bh)) continue;
        blobs.push_back({n, sx / n + 0.5, sy / n + 0.5, x0, y0, x1, y1, start % w, start / w});
    }
    return blobs;
}

}  // namespace

std::optional<TapPoint> IndicatorLocalizer::locate(const Recording& rec, std::span<const int> sample) {
    if (sample.size() < 2) return std::nullopt;
    const int w = rec.width(), h = rec.height();
    const int t = params_.change_threshold;
    const auto px = [&](int f) { return rec.frame(f).pixels.bytes(); };
    // Largest per-channel difference, so tinted overlays on coloured bars
    // of similar brightness still register.
    const auto diff = [](std::span<const std::uint8_t> u, std::span<const std::uint8_t> v, std::size_t k) {
        const std::size_t i = 3 * k;
        return std::max({std::abs(int(u[i]) - int(v[i])), std::abs(int(u[i + 1]) - int(v[i + 1])),
                         std::abs(int(u[i + 2]) - int(v[i + 2]))});
    };
    const auto z = px(sample.back());

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
    // Pass 0 looks for overlays appearing, pass 1 for overlays that were
    // already showing at the clip start and go away later. The earliest
    // pair with a qualifying blob wins.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 1; i < sample.size(); ++i) {
            if (sample[i] == sample[i - 1]) continue;
            const auto a = px(sample[i - 1]);
            const auto b = px(sample[i]);
            bool any = false;
            for (std::size_t k = 0; k < mask.size(); ++k) {
                const bool changed = diff(a, b, k) > t;
                const bool hit = pass == 0 ? changed && diff(b, z, k) > t
                                           : changed && diff(a, z, k) > t && diff(b, z, k) <= t;
                mask[k] = hit;
                any = any || hit;
            }
            if (!any) continue;
            std::optional<Blob> best;
            for (const auto& blob : compact_blobs(mask, w, h, params_))
                if (!best || blob.pixels > best->pixels) best = blob;
            if (!best) continue;
            double x = best->cx, y = best->cy;
            if (best->pointer_like()) {
                x = best->apex_x + 0.5;
                y = best->apex_y + 0.5;
            }
            return TapPoint{std::clamp(x / w, 0.0, 1.0), std::clamp(y / h, 0.0, 1.0)};
        }
    }
    return std::nullopt;
}

TapPoint infer_tap_location(const Recording& rec, const ClipSample& sample, TapLocalizer& localizer) {
    auto p = localizer.locate(rec, sample);
    if (!p) throw NoIndicatorFound();
    return {std::clamp(p->x, 0.0, 1.0), std::clamp(p->y, 0.0, 1.0)};
}

// --- scroll ------------------------------------------------------------------

const char* to_string(ScrollDirection d) { return d == ScrollDirection::Down ? "down" : "up"; }

std::optional<int> pair_offset(const std::vector<StripMatch>& matches, const std::vector<bool>& excluded,
                               double min_correlation) {
    std::vector<int> d;
    for (std::size_t s = 0; s < matches.size(); ++s) {
        if (s < excluded.size() && excluded[s]) continue;
        const auto& m = matches[s];
        if (m.textured && m.correlation >= min_correlation) d.push_back(m.displacement);
    }
    if (d.empty()) return std::nullopt;
    std::sort(d.begin(), d.end());
    const std::size_t mid = d.size() / 2;
    if (d.size() % 2) return d[mid];
    return static_cast<int>(std::lround((d[mid - 1] + d[mid]) / 2.0));
}

ScrollOffset infer_scroll_offset(const ActionClip& clip, const std::vector<LumaPlane>& planes,
                                 const ScrollParams& params, ScrollDiagnostics* diag) {
    if (params.folds < 2) throw std::invalid_argument("scroll matching needs at least 2 folds");
    ScrollDiagnostics local;
    ScrollDiagnostics& d = diag ? *diag : local;
    d = {};
    const int first = std::max(0, clip.start_frame - 1);
    const int last = std::min(static_cast<int>(planes.size()) - 1, clip.end_frame);
    if (last <= first) return {};
    const int h = planes[first].height();
    const int radius = params.search_radius > 0 ? params.search_radius : h / 3;

    std::vector<std::vector<StripMatch>> matches(static_cast<std::size_t>(last - first));
    for (int k = first; k < last; ++k) {
        if (planes[k] == planes[k + 1]) continue;
        matches[k - first] = match_strips(planes[k], planes[k + 1], params.folds, radius);
        ++d.moving_pairs;
    }

    std::vector<bool> chrome(static_cast<std::size_t>(params.folds), false);
    if (d.moving_pairs > 0) {
        for (int s = 0; s < params.folds; ++s) {
            int still = 0;
            for (const auto& m : matches)
                if (!m.empty() && m[s].textured && m[s].displacement == 0 &&
                    m[s].correlation > params.chrome_correlation)
                    ++still;
            if (still >= params.chrome_fraction * d.moving_pairs) {
                chrome[s] = true;
                d.chrome_strips.push_back(s);
            }
        }
        // Excluding every strip would leave nothing to measure.
        if (static_cast<int>(d.chrome_strips.size()) == params.folds) {
            std::fill(chrome.begin(), chrome.end(), false);
            d.chrome_strips.clear();
        }
    }

    ScrollOffset total;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        int off = 0;
        if (!matches[i].empty()) {
            if (auto o = pair_offset(matches[i], chrome, params.min_correlation)) off = *o;
            else d.rejected_pairs.push_back(static_cast<int>(i));
        }
        d.pair_offsets.push_back(off);
        total.distance_px += off;
    }
    return total;
}

ScrollOffset infer_scroll_offset(const ActionClip& clip, const Recording& rec, const ScrollParams& params,
                                 ScrollDiagnostics* diag) {
    std::vector<LumaPlane> planes(static_cast<std::size_t>(rec.size()));
    const int first = std::max(0, clip.start_frame - 1);
    const int last = std::min(rec.size() - 1, clip.end_frame);
#pragma omp parallel for
    for (int f = first; f <= last; ++f) planes[f] = rgb_to_luma(rec.frame(f));
    return infer_scroll_offset(clip, planes, params, diag);
}

// --- input -------------------------------------------------------------------

std::vector<OcrItem> ocr_frame(const Frame& frame, OcrAdapter& adapter) {
    auto items = adapter.recognize(frame);
    for (const auto& it : items) {
        if (!(it.confidence >= 0 && it.confidence <= 1))
            throw AdapterError(AdapterError::Kind::MalformedOutput, "ocr", "confidence outside [0,1]");
    }
    return items;
}

namespace {

bool triggers_keyboard(const std::vector<const OcrItem*>& row) {
    std::string letters, digits;
    for (const OcrItem* it : row) {
        for (char c : it->text) {
            const auto u = static_cast<unsigned char>(c);
            if (std::isalpha(u)) letters.push_back(c);
            else if (std::isdigit(u)) digits.push_back(c);
        }
    }
    return detect_keyboard(letters, digits);
}

}  // namespace

std::pair<int, int> keyboard_band(const std::vector<OcrItem>& items, int frame_height) {
    std::vector<int> heights;
    for (const auto& it : items) heights.push_back(it.box.h);
    std::sort(heights.begin(), heights.end());
    const double tol = heights.empty() ? 0 : 0.5 * heights[heights.size() / 2];

    int top = frame_height;
    for (const auto& anchor : items) {
        std::vector<const OcrItem*> row;
        for (const auto& it : items)
            if (std::abs(it.box.y - anchor.box.y) <= tol) row.push_back(&it);
        std::sort(row.begin(), row.end(), [](const OcrItem* a, const OcrItem* b) { return a->box.x < b->box.x; });
        if (triggers_keyboard(row)) top = std::min(top, anchor.box.y);
    }
    if (top == frame_height) top = static_cast<int>(std::lround(0.55 * frame_height));
    return {top, frame_height};
}

std::vector<OcrItem> strip_keyboard_text(const std::vector<OcrItem>& items, std::pair<int, int> band) {
    std::vector<OcrItem> out;
    for (const auto& it : items) {
        const double cy = it.box.center_y();
        if (cy >= band.first && cy < band.second) continue;
        out.push_back(it);
    }
    return out;
}

namespace {

struct Block {
    std::size_t a, b, size;
};

// Longest common block in a[alo,ahi) x b[blo,bhi); ties go to the smallest
// start in `a`, then in `b`.
Block longest_block(const std::string& a, const std::string& b, std::size_t alo, std::size_t ahi,
                    std::size_t blo, std::size_t bhi) {
    Block best{alo, blo, 0};
    std::vector<std::size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
    for (std::size_t i = alo; i < ahi; ++i) {
        for (std::size_t j = blo; j < bhi; ++j) {
            const std::size_t k = a[i] == b[j] ? prev[j - blo] + 1 : 0;
            cur[j - blo + 1] = k;
            if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
        }
        std::swap(prev, cur);
        // prev[0] must stay 0 for the shifted indexing above.
        std::fill(cur.begin(), cur.end(), 0);
    }
    return best;
}

void matching_blocks(const std::string& a, const std::string& b, std::size_t alo, std::size_t ahi,
                     std::size_t blo, std::size_t bhi, std::vector<Block>& out) {
    if (alo >= ahi || blo >= bhi) return;
    const Block m = longest_block(a, b, alo, ahi, blo, bhi);
    if (m.size == 0) return;
    matching_blocks(a, b, alo, m.a, blo, m.b, out);
    out.push_back(m);
    matching_blocks(a, b, m.a + m.size, ahi, m.b + m.size, bhi, out);
}

bool all_space(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string trim(std::string s) {
    auto sp = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && sp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && sp(s[i])) ++i;
    return s.substr(i);
}

}  // namespace

std::string lcs_diff(const std::string& before, const std::string& after) {
    std::vector<Block> blocks;
    matching_blocks(before, after, 0, before.size(), 0, after.size(), blocks);
    std::string out;
    std::size_t pos = 0;
    auto take = [&](std::size_t end) {
        const std::string_view piece = std::string_view(after).substr(pos, end - pos);
        if (!piece.empty() && !all_space(piece)) out.append(piece);
    };
    for (const auto& m : blocks) {
        take(m.b);
        pos = m.b + m.size;
    }
    take(after.size());
    return trim(out);
}

std::string ocr_text(const std::vector<OcrItem>& items) {
    std::string out;
    for (const auto& it : reading_order(items)) {
        if (!out.empty()) out.push_back(' ');
        out += it.text;
    }
    return out;
}

InputDelta infer_input_text(const Recording& rec, std::pair<int, int> keyboard_span, OcrAdapter& adapter,
                            std::vector<std::string>* notes) {
    std::map<int, std::vector<OcrItem>> cache;
    auto ocr = [&](int f) -> const std::vector<OcrItem>& {
        auto it = cache.find(f);
        if (it == cache.end()) it = cache.emplace(f, ocr_frame(rec.frame(f), adapter)).first;
        return it->second;
    };
    const int n = rec.size();
    int before = std::clamp(keyboard_span.first - 1, 0, n - 1);
    while (before > 0 && is_keyboard_frame(ocr(before))) --before;
    int after = std::clamp(keyboard_span.second + 1, 0, n - 1);
    while (after < n - 1 && is_keyboard_frame(ocr(after))) ++after;

    InputDelta d;
    d.before_frame = std::max(0, before - 2);
    d.after_frame = std::min(n - 1, after + 2);
    auto text_of = [&](int f) {
        const auto& items = ocr(f);
        if (!is_keyboard_frame(items)) return ocr_text(items);
        return ocr_text(strip_keyboard_text(items, keyboard_band(items, rec.height())));
    };
    d.text = lcs_diff(text_of(d.before_frame), text_of(d.after_frame));
    if (d.text.empty() && notes)
        notes->push_back("no text difference between frames " + std::to_string(d.before_frame) + " and " +
                         std::to_string(d.after_frame));
    return d;
}

}  // namespace recap
