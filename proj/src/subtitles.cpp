// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/subtitles.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <system_error>

namespace recap {

using nlohmann::ordered_json;

std::vector<SubtitleCue> build_cues(const std::vector<ActionClip>& clips, const std::vector<StepDescription>& steps,
                                    double fps) {
    if (clips.size() != steps.size())
        throw std::invalid_argument("cue building needs one step per clip (" + std::to_string(clips.size()) +
                                    " clips, " + std::to_string(steps.size()) + " steps)");
    if (!(fps > 0)) throw std::invalid_argument("fps must be positive");
    std::vector<SubtitleCue> cues;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        SubtitleCue c;
        c.index = static_cast<int>(i) + 1;
        c.start_ms = frame_timestamp_ms(clips[i].start_frame, fps);
        if (i + 1 < clips.size())
            c.end_ms = frame_timestamp_ms(clips[i + 1].start_frame, fps) - 1;
        else
            c.end_ms = frame_timestamp_ms(clips[i].end_frame, fps) + kFinalCueHoldMs;
        if (!cues.empty() && c.start_ms <= cues.back().end_ms) cues.back().end_ms = c.start_ms - 1;
        c.end_ms = std::max(c.end_ms, c.start_ms + 1);
        c.text = steps[i].text;
        cues.push_back(c);
    }
    return cues;
}

std::string format_srt_time(long ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld,%03ld", ms / 3600000, (ms / 60000) % 60, (ms / 1000) % 60,
                  ms % 1000);
    return buf;
}

std::string format_srt(const std::vector<SubtitleCue>& cues) {
    std::string out;
    for (const auto& c : cues) {
        out += std::to_string(c.index) + "\n";
        out += format_srt_time(c.start_ms) + " --> " + format_srt_time(c.end_ms) + "\n";
        out += c.text + "\n\n";
    }
    return out;
}

std::vector<SubtitleCue> parse_srt(const std::string& text) {
    static const std::regex timing(R"((\d+):(\d\d):(\d\d),(\d{3}) --> (\d+):(\d\d):(\d\d),(\d{3}))");
    auto to_ms = [](const std::smatch& m, int base) {
        return std::stol(m[base]) * 3600000 + std::stol(m[base + 1]) * 60000 + std::stol(m[base + 2]) * 1000 +
               std::stol(m[base + 3]);
    };
    std::vector<SubtitleCue> cues;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        SubtitleCue c;
        c.index = std::stoi(line);
        if (!std::getline(in, line)) throw std::runtime_error("truncated SRT cue " + std::to_string(c.index));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch m;
        if (!std::regex_match(line, m, timing)) throw std::runtime_error("bad SRT timing line: " + line);
        c.start_ms = to_ms(m, 1);
        c.end_ms = to_ms(m, 5);
        std::string body;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) break;
            if (!body.empty()) body += "\n";
            body += line;
        }
        c.text = body;
        cues.push_back(c);
    }
    return cues;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot move " + tmp + " into place: " + ec.message());
}

void write_srt(const std::vector<SubtitleCue>& cues, const std::filesystem::path& path) {
    write_text_file(path, format_srt(cues));
}

namespace {

ordered_json slots_json(const Slots& s) {
    ordered_json j = ordered_json::object();
    if (s.obj_text) j["obj_text"] = *s.obj_text;
    if (s.obj_class) j["obj_class"] = std::string(class_name(*s.obj_class));
    if (s.position) j["position"] = *s.position;
    if (s.relation) j["nbr_relation"] = relation_words(*s.relation);
    if (s.nbr_text) j["nbr_text"] = *s.nbr_text;
    if (s.direction) j["direction"] = to_string(*s.direction);
    if (s.offset) j["offset"] = render_offset(*s.offset);
    if (s.input_text) j["input_text"] = *s.input_text;
    return j;
}

ordered_json attributes_json(const ActionAttributes& a) {
    ordered_json j = ordered_json::object();
    if (a.tap) {
        j["tap"] = {{"x", a.tap->x}, {"y", a.tap->y}};
        j["tap_low_confidence"] = a.tap_low_confidence;
    }
    if (a.scroll_px) j["scroll_px"] = *a.scroll_px;
    if (a.input_text) j["input_text"] = *a.input_text;
    return j;
}

}  // namespace

ordered_json report_json(const std::vector<ActionClip>& clips, const std::vector<StepDescription>& steps, double fps,
                         const ordered_json& config_echo) {
    if (clips.size() != steps.size()) throw std::invalid_argument("report needs one step per clip");
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const auto& c = clips[i];
        const auto& s = steps[i];
        ordered_json o;
        o["index"] = i + 1;
        o["kind"] = std::string(to_string(c.kind));
        o["template_id"] = s.template_id;
        o["text"] = s.text;
        o["start_ms"] = frame_timestamp_ms(c.start_frame, fps);
        o["end_ms"] = frame_timestamp_ms(c.end_frame, fps);
        o["start_frame"] = c.start_frame;
        o["end_frame"] = c.end_frame;
        o["slots"] = slots_json(s.slots);
        ordered_json conf;
        conf["obj_confid"] = s.obj_confid;
        conf["label_confid"] = s.label_confid ? ordered_json(*s.label_confid) : ordered_json(nullptr);
        o["confidences"] = conf;
        o["attributes"] = attributes_json(s.attributes);
        o["config_echo"] = config_echo;
        arr.push_back(std::move(o));
    }
    return arr;
}

void write_report(const ordered_json& report, const std::filesystem::path& path) {
    write_text_file(path, report.dump(2) + "\n");
}

}  // namespace recap
