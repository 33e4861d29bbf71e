// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/adapters.hpp"
#include "recap/captioning.hpp"
#include "recap/config.hpp"
#include "recap/evaluation.hpp"
#include "recap/segmentation.hpp"

namespace recap {

struct AdapterSet {
    std::unique_ptr<OcrAdapter> ocr;
    std::unique_ptr<ElementDetector> detector;
    std::unique_ptr<IconCaptioner> captioner;
    std::unique_ptr<TapLocalizer> tap_localizer;
};

/// Builds the adapters named by the config. Commands are checked up front
/// and AdapterError(Unavailable) names the first one that cannot run.
/// `jobs` > 0 caps every command's parallelism. `table` backs the fixture
/// adapters for in-memory recordings.
AdapterSet make_adapters(const PipelineConfig& cfg, int jobs = 0,
                         std::shared_ptr<const AnnotationTable> table = nullptr);

struct ClipOutcome {
    ActionClip clip;
    bool kept = true;
    std::string reason;
    std::vector<std::string> notes;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct PipelineResult {
    SimilaritySignal signal;
    SegmentationDiagnostics segmentation;
    KeyboardFlags keyboard;
    /// Every segmented clip and what happened to it.
    std::vector<ClipOutcome> outcomes;
    /// Kept clips and their descriptions, index-aligned.
    std::vector<ActionClip> clips;
    std::vector<StepDescription> steps;

    std::vector<PredictedAction> predictions() const;
};

/// Segmentation, attribute inference, screen understanding and captioning.
/// Per-clip adapter failures drop the clip with a note; an unavailable
/// adapter aborts with AdapterError.
PipelineResult run_pipeline(const Recording& rec, const PipelineConfig& cfg, AdapterSet& adapters);

nlohmann::ordered_json diagnostics_json(const PipelineResult& result, const Recording& rec,
                                        const PipelineConfig& cfg);

/// Writes steps.json, captions.srt and diagnostics.json (and signal.csv when
/// asked) into `out_dir`. Nothing is left behind if a write fails.
void write_outputs(const std::filesystem::path& out_dir, const PipelineResult& result, const Recording& rec,
                   const PipelineConfig& cfg, bool dump_signal = false);

}  // namespace recap
