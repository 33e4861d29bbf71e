// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/captioning.hpp"
#include "recap/segmentation.hpp"

namespace recap {

struct SubtitleCue {
    int index = 1;
    long start_ms = 0;
    long end_ms = 0;
    std::string text;
    bool operator==(const SubtitleCue&) const = default;
};

/// How long the last cue stays up after its clip ends.
inline constexpr long kFinalCueHoldMs = 1500;

/// One cue per clip, shown from the clip start until just before the next clip.
std::vector<SubtitleCue> build_cues(const std::vector<ActionClip>& clips,
                                    const std::vector<StepDescription>& steps, double fps);

std::string format_srt_time(long ms);
std::string format_srt(const std::vector<SubtitleCue>& cues);
std::vector<SubtitleCue> parse_srt(const std::string& text);
void write_srt(const std::vector<SubtitleCue>& cues, const std::filesystem::path& path);

/// Step report entries, one per clip.
nlohmann::ordered_json report_json(const std::vector<ActionClip>& clips, const std::vector<StepDescription>& steps,
                                   double fps, const nlohmann::ordered_json& config_echo);
void write_report(const nlohmann::ordered_json& report, const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary sibling and a rename.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace recap
