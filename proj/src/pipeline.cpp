// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "recap/attributes.hpp"
#include "recap/gui.hpp"
#include "recap/subtitles.hpp"

namespace recap {

using nlohmann::ordered_json;

namespace {

std::shared_ptr<CommandChannel> channel(const std::string& name, const AdapterSettings& s, int jobs) {
    CommandSpec spec;
    spec.name = name;
    spec.argv = split_command(s.command);
    spec.timeout = std::chrono::milliseconds(s.timeout_ms);
    spec.max_parallel = jobs > 0 ? std::min(jobs, s.max_parallel) : s.max_parallel;
    auto ch = std::make_shared<CommandChannel>(spec);
    ch->check_available();
    return ch;
}

// Bails out of the whole run; everything else only costs the clip.
void rethrow_if_fatal(const AdapterError& e) {
    if (e.kind() == AdapterError::Kind::Unavailable) throw e;
}

KeyboardFlags keyboard_flags(const Recording& rec, OcrAdapter& ocr, int stride, std::vector<std::string>& notes) {
    std::vector<int> frames;
    std::vector<bool> visible;
    for (int f = 0; f < rec.size(); f += stride) frames.push_back(f);
    if (frames.empty() || frames.back() != rec.size() - 1) frames.push_back(rec.size() - 1);
    for (int f : frames) {
        bool kb = false;
        try {
            kb = is_keyboard_frame(ocr_frame(rec.frame(f), ocr));
        } catch (const AdapterError& e) {
            rethrow_if_fatal(e);
            notes.push_back("keyboard check skipped for frame " + std::to_string(f) + ": " + e.what());
        }
        visible.push_back(kb);
    }
    return interpolate_keyboard(rec.size(), frames, visible);
}

std::optional<TapPoint> locate_tap(const Recording& rec, const ActionClip& clip, TapLocalizer& localizer) {
    try {
        return infer_tap_location(rec, sample_clip(clip), localizer);
    } catch (const NoIndicatorFound&) {
        return std::nullopt;
    }
}

std::vector<std::string> texts_of(const std::vector<OcrItem>& items) {
    std::vector<std::string> out;
    for (const auto& it : items) out.push_back(it.text);
    return out;
}

ordered_json pair_json(const std::optional<std::pair<int, int>>& p) {
    if (!p) return nullptr;
    return {p->first, p->second};
}

}  // namespace

AdapterSet make_adapters(const PipelineConfig& cfg, int jobs, std::shared_ptr<const AnnotationTable> table) {
    AdapterSet a;
    FixtureStore store(table);
    if (cfg.ocr.command.empty()) a.ocr = std::make_unique<FixtureOcr>(store);
    else a.ocr = std::make_unique<CommandOcr>(channel("ocr", cfg.ocr, jobs));
    if (cfg.detector.command.empty()) a.detector = std::make_unique<FixtureDetector>(store);
    else a.detector = std::make_unique<CommandDetector>(channel("detector", cfg.detector, jobs));
    if (cfg.captioner.command.empty()) a.captioner = std::make_unique<FixtureCaptioner>(store);
    else a.captioner = std::make_unique<CommandCaptioner>(channel("captioner", cfg.captioner, jobs));
    if (cfg.tap_localizer.command.empty()) a.tap_localizer = std::make_unique<IndicatorLocalizer>(cfg.tap);
    else a.tap_localizer = std::make_unique<CommandTapLocalizer>(channel("tap_localizer", cfg.tap_localizer, jobs));
    return a;
}

std::vector<PredictedAction> PipelineResult::predictions() const {
    std::vector<PredictedAction> out;
    for (std::size_t i = 0; i < clips.size(); ++i) out.push_back({clips[i], steps[i].attributes});
    return out;
}

PipelineResult run_pipeline(const Recording& rec, const PipelineConfig& cfg, AdapterSet& adapters) {
    validate(cfg);
    PipelineResult r;
    if (rec.size() < 2) {
        r.signal.fps = rec.fps();
        r.segmentation.notes.push_back("recording has fewer than two frames; nothing to segment");
        return r;
    }
    const int factor =
        cfg.segmentation.downsample_factor > 0 ? cfg.segmentation.downsample_factor : auto_downsample_factor(rec.width());
    const auto full = recording_luma(rec, 1);
    std::vector<LumaPlane> analysis;
    if (factor > 1) {
        analysis.resize(full.size());
#pragma omp parallel for schedule(static)
        for (int i = 0; i < static_cast<int>(full.size()); ++i) analysis[i] = downsample(full[i], factor);
    }
    r.signal = compute_signal(factor > 1 ? analysis : full, rec.fps(), cfg.segmentation.ssim);
    r.keyboard = keyboard_flags(rec, *adapters.ocr, cfg.segmentation.keyboard_stride, r.segmentation.notes);
    const auto clips = segment_actions(r.signal, r.keyboard, cfg.segmentation, &r.segmentation);

    const auto screen_at = [&](const Frame& f) {
        return build_screen(f, *adapters.detector, *adapters.ocr, adapters.captioner.get(), cfg.neighbor_fraction,
                            cfg.min_axis_overlap);
    };

    for (const auto& clip : clips) {
        ClipOutcome out;
        out.clip = clip;
        StepDescription step;
        try {
            switch (clip.kind) {
                case ActionKind::Tap: {
                    auto point = locate_tap(rec, clip, *adapters.tap_localizer);
                    const bool low = !point;
                    if (low) out.notes.push_back("no touch indicator found; using the screen centre");
                    const TapPoint p = point.value_or(TapPoint{0.5, 0.5});
                    const Screen screen = screen_at(rec.frame(clip.start_frame));
                    step = caption_tap(screen, {p, low}, cfg.caption);
                    step.attributes.tap = p;
                    step.attributes.tap_low_confidence = low;
                    out.details["tap"] = {{"x", p.x}, {"y", p.y}, {"low_confidence", low}};
                    break;
                }
                case ActionKind::Scroll: {
                    ScrollDiagnostics sd;
                    const ScrollOffset off = infer_scroll_offset(clip, full, cfg.scroll, &sd);
                    out.details["scroll"] = {{"distance_px", off.distance_px},
                                             {"pair_offsets", sd.pair_offsets},
                                             {"rejected_pairs", sd.rejected_pairs},
                                             {"chrome_strips", sd.chrome_strips},
                                             {"moving_pairs", sd.moving_pairs}};
                    if (sd.moving_pairs == 0 || off.distance_px == 0 ||
                        2 * static_cast<int>(sd.rejected_pairs.size()) > sd.moving_pairs) {
                        out.kept = false;
                        out.reason = "no consistent vertical offset; not a scroll";
                        break;
                    }
                    const auto before = texts_of(ocr_frame(rec.frame(clip.start_frame), *adapters.ocr));
                    const Screen after = screen_at(rec.frame(clip.end_frame));
                    step = caption_scroll(off, rec.height(), &after, before);
                    step.attributes.scroll_px = off.distance_px;
                    break;
                }
                case ActionKind::Input: {
                    const auto span = clip.keyboard_span.value_or(std::make_pair(clip.start_frame, clip.end_frame));
                    const InputDelta delta = infer_input_text(rec, span, *adapters.ocr, &out.notes);
                    ActionClip opening = clip;
                    opening.end_frame = std::clamp(span.first + 6, clip.start_frame + 1, clip.end_frame);
                    const auto field_tap = locate_tap(rec, opening, *adapters.tap_localizer);
                    const Screen screen = screen_at(rec.frame(delta.before_frame));
                    step = caption_input(screen, delta.text, field_tap, cfg.caption);
                    step.attributes.input_text = delta.text;
                    step.attributes.tap = field_tap;
                    out.details["input"] = {{"before_frame", delta.before_frame},
                                            {"after_frame", delta.after_frame},
                                            {"text", delta.text}};
                    break;
                }
            }
        } catch (const AdapterError& e) {
            rethrow_if_fatal(e);
            out.kept = false;
            out.reason = std::string("adapter ") + to_string(e.kind()) + ": " + e.what();
        }
        if (out.kept) {
            step.clip_index = static_cast<int>(r.clips.size());
            r.clips.push_back(clip);
            r.steps.push_back(step);
        }
        r.outcomes.push_back(std::move(out));
    }
    return r;
}

ordered_json diagnostics_json(const PipelineResult& r, const Recording& rec, const PipelineConfig& cfg) {
    ordered_json j;
    j["schema"] = "1";
    j["recording"] = {{"frames", rec.size()}, {"fps", rec.fps()}, {"width", rec.width()}, {"height", rec.height()}};
    const auto& s = r.signal.scores;
    ordered_json sig;
    sig["pairs"] = s.size();
    sig["min"] = s.empty() ? 1.0 : *std::min_element(s.begin(), s.end());
    sig["mean"] = s.empty() ? 1.0 : std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    sig["baseline"] = r.segmentation.baseline;
    sig["jitter"] = r.segmentation.jitter;
    sig["drop_level"] = r.segmentation.drop_level;
    sig["active_level"] = r.segmentation.active_level;
    sig["steady_runs"] = r.segmentation.steady_runs;
    j["signal"] = sig;
    ordered_json kb = ordered_json::array();
    for (std::size_t i = 0; i < r.keyboard.sampled_frames.size(); ++i)
        if (r.keyboard.sampled_visible[i]) kb.push_back(r.keyboard.sampled_frames[i]);
    j["keyboard_frames_sampled"] = kb;
    j["notes"] = r.segmentation.notes;
    ordered_json clips = ordered_json::array();
    for (const auto& o : r.outcomes) {
        ordered_json c;
        c["kind"] = std::string(to_string(o.clip.kind));
        c["start_frame"] = o.clip.start_frame;
        c["end_frame"] = o.clip.end_frame;
        c["steady_gap"] = pair_json(o.clip.steady_gap);
        c["keyboard_span"] = pair_json(o.clip.keyboard_span);
        c["kept"] = o.kept;
        if (!o.kept) c["reason"] = o.reason;
        c["notes"] = o.notes;
        for (const auto& [k, v] : o.details.items()) c[k] = v;
        clips.push_back(c);
    }
    j["clips"] = clips;
    j["config_echo"] = config_to_json(cfg);
    return j;
}

void write_outputs(const std::filesystem::path& out_dir, const PipelineResult& r, const Recording& rec,
                   const PipelineConfig& cfg, bool dump_signal) {
    const auto echo = config_to_json(cfg);
    const std::vector<std::pair<std::string, std::string>> files = {
        {"steps.json", report_json(r.clips, r.steps, rec.fps(), echo).dump(2) + "\n"},
        {"captions.srt", format_srt(build_cues(r.clips, r.steps, rec.fps()))},
        {"diagnostics.json", diagnostics_json(r, rec, cfg).dump(2) + "\n"},
    };
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(out_dir);
        for (const auto& [name, content] : files) {
            write_text_file(out_dir / name, content);
            written.push_back(out_dir / name);
        }
        if (dump_signal) {
            write_text_file(out_dir / "signal.csv", signal_csv(r.signal));
            written.push_back(out_dir / "signal.csv");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
}

}  // namespace recap
