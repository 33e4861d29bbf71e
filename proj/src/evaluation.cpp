// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace recap {

using nlohmann::ordered_json;

namespace {

long inclusive_overlap(int a0, int a1, int b0, int b1) {
    return std::max(0, std::min(a1, b1) - std::max(a0, b0) + 1);
}

struct OverlapTerms {
    long inter = 0;  // |P ∩ broadened G|
    long extra = 0;  // part of that intersection lying in the margin
    long pred = 0;
    long truth = 0;
};

OverlapTerms overlap_terms(int ps, int pe, int ts, int te, int broaden) {
    OverlapTerms t;
    t.pred = pe - ps + 1;
    t.truth = te - ts + 1;
    t.inter = inclusive_overlap(ps, pe, ts - broaden, te + broaden);
    t.extra = t.inter - inclusive_overlap(ps, pe, ts, te);
    return t;
}

int kind_index(ActionKind k) { return static_cast<int>(k); }

// Hungarian algorithm on a rows x cols cost matrix with rows <= cols.
// Returns, for each row, the assigned column.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    const int m = static_cast<int>(cost[0].size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(m + 1, 0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

double interval_f1(int ps, int pe, int ts, int te, int broaden) {
    const auto t = overlap_terms(ps, pe, ts, te, broaden);
    const long den = t.pred + t.truth + t.extra;
    return den > 0 ? 2.0 * static_cast<double>(t.inter) / static_cast<double>(den) : 0.0;
}

std::vector<ClipMatch> match_clips(const std::vector<std::pair<int, int>>& predicted,
                                   const std::vector<std::pair<int, int>>& truth, int broaden) {
    const int np = static_cast<int>(predicted.size()), nt = static_cast<int>(truth.size());
    if (np == 0 || nt == 0) return {};
    const bool rows_are_pred = np <= nt;
    const int rows = rows_are_pred ? np : nt, cols = rows_are_pred ? nt : np;
    std::vector<std::vector<double>> f1(rows, std::vector<double>(cols));
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto& p = predicted[rows_are_pred ? r : c];
            const auto& t = truth[rows_are_pred ? c : r];
            f1[r][c] = interval_f1(p.first, p.second, t.first, t.second, broaden);
            cost[r][c] = -f1[r][c];
        }
    }
    const auto assign = min_cost_assignment(cost);
    std::vector<ClipMatch> out;
    for (int r = 0; r < rows; ++r) {
        const int c = assign[r];
        if (c < 0 || f1[r][c] <= 0) continue;
        ClipMatch m;
        m.predicted = rows_are_pred ? r : c;
        m.truth = rows_are_pred ? c : r;
        m.f1 = f1[r][c];
        out.push_back(m);
    }
    std::sort(out.begin(), out.end(), [](const ClipMatch& a, const ClipMatch& b) { return a.truth < b.truth; });
    return out;
}

void EvalTally::add(const EvalTally& o) {
    recordings += o.recordings;
    n_pred += o.n_pred;
    n_truth += o.n_truth;
    matched += o.matched;
    kind_correct += o.kind_correct;
    f1_sum += o.f1_sum;
    f1_items += o.f1_items;
    micro_num += o.micro_num;
    micro_den += o.micro_den;
    for (int k = 0; k < 3; ++k) {
        kind_f1_sum[k] += o.kind_f1_sum[k];
        kind_items[k] += o.kind_items[k];
        attr_total[k] += o.attr_total[k];
        attr_correct[k] += o.attr_correct[k];
    }
}

double EvalTally::vs_f1() const { return ratio(f1_sum, f1_items); }
double EvalTally::vs_f1_micro() const { return ratio(static_cast<double>(micro_num), static_cast<double>(micro_den)); }
double EvalTally::vs_f1_kind(ActionKind k) const { return ratio(kind_f1_sum[kind_index(k)], kind_items[kind_index(k)]); }
double EvalTally::classification_accuracy() const { return ratio(kind_correct, n_truth); }
double EvalTally::attribute_accuracy(ActionKind k) const {
    return ratio(attr_correct[kind_index(k)], attr_total[kind_index(k)]);
}

EvalTally vs_f1(const std::vector<ActionClip>& predicted, const std::vector<TruthAction>& truth, int broaden) {
    std::vector<PredictedAction> pa;
    for (const auto& c : predicted) pa.push_back({c, {}});
    GroundTruthTrace t;
    t.actions = truth;
    EvalConfig cfg;
    cfg.broaden = broaden;
    auto tally = evaluate(pa, t, cfg);
    tally.attr_total = {};
    tally.attr_correct = {};
    return tally;
}

bool tap_correct(const TapPoint& p, const Box& truth_box, int width, int height) {
    return truth_box.contains(p.x * width, p.y * height);
}

bool scroll_correct(int predicted_px, int truth_px, int tolerance_px) {
    const bool same_sign = (predicted_px > 0) == (truth_px > 0);
    return same_sign && std::abs(predicted_px - truth_px) <= tolerance_px;
}

EvalTally evaluate(const std::vector<PredictedAction>& predicted, const GroundTruthTrace& truth,
                   const EvalConfig& cfg) {
    if (cfg.broaden < 0) throw std::invalid_argument("broaden must be >= 0");
    std::vector<std::pair<int, int>> pi, ti;
    for (const auto& p : predicted) pi.emplace_back(p.clip.start_frame, p.clip.end_frame);
    for (const auto& t : truth.actions) ti.emplace_back(t.start_frame, t.end_frame);
    const auto matches = match_clips(pi, ti, cfg.broaden);

    EvalTally r;
    r.recordings = 1;
    r.n_pred = static_cast<int>(pi.size());
    r.n_truth = static_cast<int>(ti.size());
    r.matched = static_cast<int>(matches.size());
    r.f1_items = std::max(r.n_pred, r.n_truth);

    std::array<int, 3> pred_kind{}, truth_kind{};
    for (const auto& p : predicted) ++pred_kind[kind_index(p.clip.kind)];
    for (const auto& t : truth.actions) ++truth_kind[kind_index(t.kind)];
    for (int k = 0; k < 3; ++k) {
        r.kind_items[k] = std::max(pred_kind[k], truth_kind[k]);
        r.attr_total[k] = truth_kind[k];
    }

    for (const auto& p : pi) r.micro_den += p.second - p.first + 1;
    for (const auto& t : ti) r.micro_den += t.second - t.first + 1;

    for (const auto& m : matches) {
        const auto& p = predicted[m.predicted];
        const auto& t = truth.actions[m.truth];
        const auto terms = overlap_terms(p.clip.start_frame, p.clip.end_frame, t.start_frame, t.end_frame, cfg.broaden);
        r.micro_num += 2 * terms.inter;
        r.micro_den += terms.extra;
        r.f1_sum += m.f1;
        r.kind_f1_sum[kind_index(t.kind)] += m.f1;
        if (p.clip.kind != t.kind) continue;
        ++r.kind_correct;

        const auto& a = p.attributes;
        bool ok = false;
        switch (t.kind) {
            case ActionKind::Tap:
                ok = a.tap && t.target_box && tap_correct(*a.tap, *t.target_box, truth.width, truth.height);
                break;
            case ActionKind::Scroll:
                ok = a.scroll_px && t.scroll_px && scroll_correct(*a.scroll_px, *t.scroll_px, cfg.scroll_tolerance_px);
                break;
            case ActionKind::Input:
                ok = a.input_text && t.text && *a.input_text == *t.text;
                break;
        }
        if (ok) ++r.attr_correct[kind_index(t.kind)];
    }
    return r;
}

namespace {

ordered_json tally_json(const EvalTally& t) {
    ordered_json j;
    j["recordings"] = t.recordings;
    j["predicted_clips"] = t.n_pred;
    j["truth_actions"] = t.n_truth;
    j["matched"] = t.matched;
    ordered_json vs;
    vs["overall"] = t.vs_f1();
    vs["overall_micro"] = t.vs_f1_micro();
    for (auto k : {ActionKind::Tap, ActionKind::Scroll, ActionKind::Input})
        vs[std::string(to_string(k))] = t.vs_f1_kind(k);
    j["vs_f1"] = vs;
    j["classification_accuracy"] = t.classification_accuracy();
    ordered_json attrs;
    for (auto k : {ActionKind::Tap, ActionKind::Scroll, ActionKind::Input}) {
        const int i = kind_index(k);
        attrs[std::string(to_string(k))] = {{"accuracy", t.attribute_accuracy(k)},
                                            {"correct", t.attr_correct[i]},
                                            {"total", t.attr_total[i]}};
    }
    j["attribute_accuracy"] = attrs;
    return j;
}

}  // namespace

ordered_json eval_report_json(const EvalReport& report) {
    ordered_json j;
    j["schema"] = "1";
    j["config"] = {{"broaden", report.config.broaden}, {"scroll_tolerance_px", report.config.scroll_tolerance_px}};
    j["total"] = tally_json(report.total);
    j["recordings"] = ordered_json::array();
    for (const auto& [name, t] : report.recordings) {
        auto o = tally_json(t);
        o.erase("recordings");
        ordered_json row;
        row["name"] = name;
        row.update(o);
        j["recordings"].push_back(row);
    }
    return j;
}

std::string eval_report_table(const EvalReport& report) {
    const auto& t = report.total;
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "recordings: %d  truth actions: %d  predicted clips: %d  matched: %d\n",
                  t.recordings, t.n_truth, t.n_pred, t.matched);
    out += line;
    std::snprintf(line, sizeof line, "%-8s %8s %8s %10s\n", "action", "VS F1", "Acc", "attribute");
    out += line;
    for (auto k : {ActionKind::Tap, ActionKind::Scroll, ActionKind::Input}) {
        const int i = kind_index(k);
        std::snprintf(line, sizeof line, "%-8s %8.3f %8s %6d/%-3d\n", std::string(to_string(k)).c_str(),
                      t.vs_f1_kind(k), "", t.attr_correct[i], t.attr_total[i]);
        out += line;
    }
    int ac = 0, at = 0;
    for (int k = 0; k < 3; ++k) {
        ac += t.attr_correct[k];
        at += t.attr_total[k];
    }
    std::snprintf(line, sizeof line, "%-8s %8.3f %8.3f %6d/%-3d\n", "overall", t.vs_f1(), t.classification_accuracy(),
                  ac, at);
    out += line;
    std::snprintf(line, sizeof line, "micro-averaged VS F1: %.3f (broaden %d frames, scroll tolerance %d px)\n",
                  t.vs_f1_micro(), report.config.broaden, report.config.scroll_tolerance_px);
    out += line;
    return out;
}

}  // namespace recap
