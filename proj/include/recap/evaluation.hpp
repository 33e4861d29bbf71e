// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/captioning.hpp"
#include "recap/harness.hpp"
#include "recap/segmentation.hpp"

namespace recap {

struct EvalConfig {
    /// Frames added on both sides of every ground-truth interval.
    int broaden = 5;
    int scroll_tolerance_px = 2;
};

/// Overlap F1 between a predicted interval and a truth interval broadened by
/// `broaden` frames. Interval sizes count frames inclusively. Predicted
/// frames that fall inside the broadened margin count as overlap and are
/// added to the truth size, so a prediction that exactly covers the
/// broadened truth scores 1.
double interval_f1(int pred_start, int pred_end, int truth_start, int truth_end, int broaden);

struct ClipMatch {
    int predicted = 0;
    int truth = 0;
    double f1 = 0;
};

/// One-to-one assignment maximizing the summed F1; pairs with F1 = 0 never match.
std::vector<ClipMatch> match_clips(const std::vector<std::pair<int, int>>& predicted,
                                   const std::vector<std::pair<int, int>>& truth, int broaden);

/// Additive counters so several recordings can be pooled.
struct EvalTally {
    int recordings = 0;
    int n_pred = 0;
    int n_truth = 0;
    int matched = 0;
    int kind_correct = 0;
    /// Matched F1 sum and item count (max of predicted and truth clips) overall and per kind.
    double f1_sum = 0;
    int f1_items = 0;
    std::array<double, 3> kind_f1_sum{};
    std::array<int, 3> kind_items{};
    /// Frame-pooled overlap terms.
    long micro_num = 0;
    long micro_den = 0;
    std::array<int, 3> attr_total{};
    std::array<int, 3> attr_correct{};

    void add(const EvalTally& other);

    double vs_f1() const;
    double vs_f1_micro() const;
    double vs_f1_kind(ActionKind k) const;
    double classification_accuracy() const;
    double attribute_accuracy(ActionKind k) const;
};

/// Predicted clip plus the attributes inferred for it.
struct PredictedAction {
    ActionClip clip;
    ActionAttributes attributes;
};

/// Clip overlap only; attributes are ignored.
EvalTally vs_f1(const std::vector<ActionClip>& predicted, const std::vector<TruthAction>& truth, int broaden);

/// Overlap plus attribute accuracy. Attribute accuracies divide by the number
/// of truth actions of each kind, so unmatched or misclassified actions count
/// as wrong.
EvalTally evaluate(const std::vector<PredictedAction>& predicted, const GroundTruthTrace& truth,
                   const EvalConfig& cfg);

/// Single attribute checks used by evaluate().
bool tap_correct(const TapPoint& p, const Box& truth_box, int width, int height);
bool scroll_correct(int predicted_px, int truth_px, int tolerance_px);

struct EvalReport {
    EvalConfig config;
    EvalTally total;
    std::vector<std::pair<std::string, EvalTally>> recordings;
};

nlohmann::ordered_json eval_report_json(const EvalReport& report);
/// Human-readable table with one row per action kind and an overall row.
std::string eval_report_table(const EvalReport& report);

}  // namespace recap
