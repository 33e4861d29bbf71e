// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "recap/attributes.hpp"
#include "recap/captioning.hpp"
#include "recap/evaluation.hpp"
#include "recap/segmentation.hpp"

namespace recap {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An external model command. An empty command selects the built-in
/// realization (fixture files, or the indicator localizer for taps).
struct AdapterSettings {
    std::string command;
    int timeout_ms = 20000;
    int max_parallel = 2;
};

struct PipelineConfig {
    SegmentationConfig segmentation;
    ScrollParams scroll;
    IndicatorParams tap;
    /// Neighbour search radius as a fraction of the frame height.
    double neighbor_fraction = 0.25;
    double min_axis_overlap = 0.3;
    CaptionConfig caption;
    AdapterSettings ocr;
    AdapterSettings detector;
    AdapterSettings captioner;
    AdapterSettings tap_localizer;
    EvalConfig eval;
};

/// Throws ConfigError naming the offending field.
void validate(const PipelineConfig& cfg);

/// Full normalized config with every default spelled out.
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace recap
