// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace recap {

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Tap: return "TAP";
        case ActionKind::Scroll: return "SCROLL";
        case ActionKind::Input: return "INPUT";
    }
    return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view name) {
    std::string up(name);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "TAP") return ActionKind::Tap;
    if (up == "SCROLL") return ActionKind::Scroll;
    if (up == "INPUT") return ActionKind::Input;
    return std::nullopt;
}

SimilaritySignal compute_signal(const std::vector<LumaPlane>& planes, double fps,
                                const SsimParams& params) {
    if (planes.size() < 2) throw RecordingError("similarity signal needs at least 2 frames");
    SimilaritySignal sig;
    sig.fps = fps;
    sig.scores.resize(planes.size() - 1);
    const int pairs = static_cast<int>(sig.scores.size());
#pragma omp parallel for schedule(dynamic, 2)
    for (int k = 0; k < pairs; ++k) sig.scores[k] = ssim_serial(planes[k], planes[k + 1], params);
    return sig;
}

SimilaritySignal compute_signal(const Recording& rec, int downsample_factor, const SsimParams& params) {
    if (rec.size() < 2) throw RecordingError("similarity signal needs at least 2 frames");
    return compute_signal(recording_luma(rec, downsample_factor), rec.fps(), params);
}

bool detect_keyboard(std::string_view ocr_text, std::string_view ocr_num) {
    std::string lower(ocr_text);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    static constexpr std::array<std::string_view, 3> kRows = {"qwert", "asdfg", "zxcvb"};
    static constexpr std::array<std::string_view, 3> kDigits = {"123", "456", "789"};
    for (auto row : kRows)
        if (lower.find(row) != std::string::npos) return true;
    for (auto run : kDigits)
        if (ocr_num.find(run) != std::string_view::npos) return true;
    return false;
}

std::pair<std::string, std::string> split_ocr_characters(const std::vector<OcrItem>& items) {
    std::string letters, digits;
    for (const auto& it : reading_order(items)) {
        for (char c : it.text) {
            const auto u = static_cast<unsigned char>(c);
            if (std::isalpha(u)) letters.push_back(c);
            else if (std::isdigit(u)) digits.push_back(c);
        }
    }
    return {letters, digits};
}

bool is_keyboard_frame(const std::vector<OcrItem>& items) {
    const auto [letters, digits] = split_ocr_characters(items);
    return detect_keyboard(letters, digits);
}

KeyboardFlags interpolate_keyboard(int frame_count, std::vector<int> sampled_frames,
                                   std::vector<bool> sampled_visible) {
    KeyboardFlags kb;
    kb.sampled_frames = std::move(sampled_frames);
    kb.sampled_visible = std::move(sampled_visible);
    kb.per_frame.assign(static_cast<std::size_t>(std::max(frame_count, 0)), false);
    if (kb.sampled_frames.empty()) return kb;
    std::size_t s = 0;
    for (int f = 0; f < frame_count; ++f) {
        while (s + 1 < kb.sampled_frames.size() &&
               std::abs(kb.sampled_frames[s + 1] - f) < std::abs(kb.sampled_frames[s] - f))
            ++s;
        kb.per_frame[f] = kb.sampled_visible[s];
    }
    return kb;
}

KeyboardFlags sample_keyboard(const Recording& rec, OcrAdapter& ocr, int stride) {
    if (stride < 1) throw std::invalid_argument("keyboard stride must be >= 1");
    std::vector<int> frames;
    for (int f = 0; f < rec.size(); f += stride) frames.push_back(f);
    if (frames.back() != rec.size() - 1) frames.push_back(rec.size() - 1);
    std::vector<bool> visible(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        visible[i] = is_keyboard_frame(ocr.recognize(rec.frame(frames[i])));
    return interpolate_keyboard(rec.size(), std::move(frames), std::move(visible));
}

std::string signal_csv(const SimilaritySignal& signal) {
    std::ostringstream out;
    out << "frame_index,score\n";
    char buf[64];
    for (std::size_t k = 0; k < signal.scores.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.9f\n", k + 1, signal.scores[k]);
        out << buf;
    }
    return out.str();
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kMinSteadyPairs = 3;

double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
    return 0.5 * (lo + hi);
}

std::vector<double> median3(const std::vector<double>& s) {
    std::vector<double> out(s);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        std::array<double, 3> w = {s[i - 1], s[i], s[i + 1]};
        std::sort(w.begin(), w.end());
        out[i] = w[1];
    }
    return out;
}

// Inclusive range of pair indices.
struct PairRun {
    int first;
    int last;
};

// Maximal runs of `flag` within [lo, hi].
std::vector<PairRun> runs_of(const std::vector<bool>& flag, int lo, int hi) {
    std::vector<PairRun> runs;
    for (int k = lo; k <= hi; ++k) {
        if (!flag[k]) continue;
        int e = k;
        while (e + 1 <= hi && flag[e + 1]) ++e;
        runs.push_back({k, e});
        k = e;
    }
    return runs;
}

struct Event {
    ActionKind kind;
    PairRun pairs;
    std::optional<std::pair<int, int>> steady_gap;
    std::optional<std::pair<int, int>> keyboard_span;
};

bool looks_like_scroll(const std::vector<double>& smooth, const PairRun& r, int scroll_min_pairs) {
    const int len = r.last - r.first + 1;
    if (len < scroll_min_pairs) return false;
    const int third = std::max(1, len / 3);
    double head = 0, tail = 0;
    for (int i = 0; i < third; ++i) {
        head += smooth[r.first + i];
        tail += smooth[r.last - i];
    }
    // Gradual recovery: the deepest point is not in the last third and the
    // tail sits higher.
    const auto lowest = std::min_element(smooth.begin() + r.first, smooth.begin() + r.last + 1);
    const int at = static_cast<int>(lowest - smooth.begin()) - r.first;
    return tail > head && at < len - third;
}

}  // namespace

std::vector<ActionClip> segment_actions(const SimilaritySignal& signal, const KeyboardFlags& kb,
                                        const SegmentationConfig& cfg, SegmentationDiagnostics* diag) {
    SegmentationDiagnostics local;
    SegmentationDiagnostics& d = diag ? *diag : local;
    const auto& s = signal.scores;
    const int pairs = static_cast<int>(s.size());
    if (pairs == 0) return {};
    const int frames = pairs + 1;
    const double fps = signal.fps > 0 ? signal.fps : 30.0;

    // Each screen settles at its own similarity level once noise is present,
    // so activity is judged against the steady stretch next to it. Jitter
    // comes from successive differences, which ignore those level shifts.
    d.baseline = median_of(s);
    std::vector<double> step(s.size() > 1 ? s.size() - 1 : 0);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) step[k] = std::abs(s[k + 1] - s[k]);
    d.jitter = 1.4826 * median_of(step) / std::sqrt(2.0);
    const double margin = std::max(cfg.activity_margin, cfg.activity_noise_k * d.jitter);
    d.drop_level = d.baseline * cfg.drop_threshold;
    d.active_level = std::max(d.drop_level, d.baseline - margin);

    // Steady runs: chains of pairs whose neighbours stay within the margin,
    // long enough and high enough to be a resting screen.
    std::vector<int> run_of(s.size(), -1);
    std::vector<double> levels;
    for (int k = 0; k < pairs;) {
        int e = k;
        while (e + 1 < pairs && std::abs(s[e + 1] - s[e]) <= margin) ++e;
        if (e - k + 1 >= kMinSteadyPairs) {
            const double level = median_of({s.begin() + k, s.begin() + e + 1});
            if (level >= d.drop_level) {
                for (int i = k; i <= e; ++i) run_of[i] = static_cast<int>(levels.size());
                levels.push_back(level);
            }
        }
        k = e + 1;
    }
    d.steady_runs = static_cast<int>(levels.size());
    std::vector<double> before(s.size(), -1.0), after(s.size(), -1.0);
    for (int k = 0, last = -1; k < pairs; ++k) {
        if (run_of[k] >= 0) last = run_of[k];
        if (last >= 0) before[k] = levels[last];
    }
    for (int k = pairs - 1, next = -1; k >= 0; --k) {
        if (run_of[k] >= 0) next = run_of[k];
        if (next >= 0) after[k] = levels[next];
    }

    std::vector<bool> drop(s.size()), active(s.size());
    for (int k = 0; k < pairs; ++k) {
        double base = std::max(before[k], after[k]);
        if (base < 0) base = d.baseline;
        if (run_of[k] >= 0) base = levels[run_of[k]];
        drop[k] = s[k] < base * cfg.drop_threshold;
        active[k] = run_of[k] < 0 && s[k] < std::max(base * cfg.drop_threshold, base - margin);
    }
    const auto smooth = median3(s);

    const int pad = static_cast<int>(std::lround(cfg.clip_pad_s * fps));
    const int gap_max = static_cast<int>(std::lround(cfg.steady_gap_max_s * fps));
    const int scroll_min = std::max(2, static_cast<int>(std::lround(cfg.scroll_min_s * fps)));
    const int stride = std::max(1, cfg.keyboard_stride);

    std::vector<bool> consumed(s.size(), false);
    std::vector<Event> events;

    // INPUT: keyboard-visible spans bounded by their appearance/disappearance drops.
    if (static_cast<int>(kb.per_frame.size()) == frames) {
        for (int f = 0; f < frames; ++f) {
            if (!kb.per_frame[f]) continue;
            int g = f;
            while (g + 1 < frames && kb.per_frame[g + 1]) ++g;
            const int ks = f, ke = g;
            f = g;

            // The opening drop is the pair leading into the first keyboard frame;
            // sampling blurs that frame by up to one stride either way.
            const int open_lo = std::max(0, ks - 1 - stride), open_hi = std::min(pairs - 1, ks - 1 + stride);
            const int close_lo = std::max(0, ke - stride), close_hi = std::min(pairs - 1, ke + stride);
            int first = -1, last = -1;
            for (int k = open_lo; k <= open_hi && first < 0; ++k)
                if (drop[k] && !consumed[k]) first = k;
            for (int k = close_hi; k >= close_lo && last < 0; --k)
                if (drop[k] && !consumed[k]) last = k;
            if (first < 0 || last < 0 || last < first) {
                d.notes.push_back("keyboard span " + std::to_string(ks) + "-" + std::to_string(ke) +
                                  " has no bounding drops; not an INPUT");
                continue;
            }
            while (first > 0 && active[first - 1] && !consumed[first - 1]) --first;
            while (last + 1 < pairs && active[last + 1] && !consumed[last + 1]) ++last;

            const int cycles = static_cast<int>(runs_of(active, first, last).size());
            if (cycles < cfg.input_min_oscillations) {
                d.notes.push_back("keyboard span " + std::to_string(ks) + "-" + std::to_string(ke) + " shows " +
                                  std::to_string(cycles) + " drop/rise cycles; not an INPUT");
                continue;
            }
            for (int k = first; k <= last; ++k) consumed[k] = true;
            events.push_back({ActionKind::Input, {first, last}, std::nullopt, std::make_pair(ks, ke)});
        }
    }

    // TAP / SCROLL: activity runs that contain at least one drastic drop.
    std::vector<bool> free_active(s.size());
    for (int k = 0; k < pairs; ++k) free_active[k] = active[k] && !consumed[k];
    for (const auto& run : runs_of(free_active, 0, pairs - 1)) {
        bool has_drop = false;
        for (int k = run.first; k <= run.last; ++k) has_drop = has_drop || drop[k];
        if (!has_drop) continue;
        const ActionKind kind = looks_like_scroll(smooth, run, scroll_min) ? ActionKind::Scroll : ActionKind::Tap;
        events.push_back({kind, run, std::nullopt, std::nullopt});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.pairs.first < b.pairs.first; });

    // Loading plateau: two TAP drops separated by a short steady stretch are one TAP.
    std::vector<Event> merged;
    for (auto& e : events) {
        if (!merged.empty() && merged.back().kind == ActionKind::Tap && e.kind == ActionKind::Tap) {
            auto& prev = merged.back();
            const int plateau_first = prev.pairs.last + 1;  // first frame after the drop settles
            const int plateau_last = e.pairs.first;         // last steady frame before the next drop
            if (plateau_last - plateau_first + 1 <= gap_max) {
                if (!prev.steady_gap) prev.steady_gap = std::make_pair(plateau_first, plateau_last);
                else prev.steady_gap->second = plateau_last;
                prev.pairs.last = e.pairs.last;
                continue;
            }
        }
        merged.push_back(e);
    }

    // Frame intervals with lead-in/tail padding, kept disjoint.
    std::vector<ActionClip> clips;
    for (const auto& e : merged) {
        ActionClip c;
        c.kind = e.kind;
        c.start_frame = e.pairs.first;
        c.end_frame = e.pairs.last + 1;
        c.steady_gap = e.steady_gap;
        c.keyboard_span = e.keyboard_span;
        clips.push_back(c);
    }
    std::vector<ActionClip> out = clips;
    for (std::size_t i = 0; i < out.size(); ++i) {
        int lo = std::max(0, clips[i].start_frame - pad);
        int hi = std::min(frames - 1, clips[i].end_frame + pad);
        if (i > 0) {
            const int mid = (clips[i - 1].end_frame + clips[i].start_frame) / 2;
            lo = std::max(lo, std::min(mid + 1, clips[i].start_frame));
        }
        if (i + 1 < out.size()) {
            const int mid = (clips[i].end_frame + clips[i + 1].start_frame) / 2;
            hi = std::min(hi, std::max(mid, clips[i].end_frame));
        }
        out[i].start_frame = lo;
        out[i].end_frame = hi;
    }
    return out;
}

}  // namespace recap
