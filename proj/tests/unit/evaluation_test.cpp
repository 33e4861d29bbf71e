// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "recap/evaluation.hpp"

using namespace recap;

namespace {

TruthAction truth(ActionKind k, int s, int e) {
    TruthAction t;
    t.kind = k;
    t.start_frame = s;
    t.end_frame = e;
    return t;
}

PredictedAction predicted(ActionKind k, int s, int e) {
    PredictedAction p;
    p.clip.kind = k;
    p.clip.start_frame = s;
    p.clip.end_frame = e;
    return p;
}

GroundTruthTrace trace_of(std::vector<TruthAction> actions) {
    GroundTruthTrace t;
    t.width = 360;
    t.height = 640;
    t.frame_count = 1000;
    t.actions = std::move(actions);
    return t;
}

}  // namespace

TEST_CASE("interval F1") {
    CHECK(interval_f1(10, 20, 10, 20, 0) == 1.0);
    CHECK(interval_f1(10, 20, 12, 22, 0) == doctest::Approx(18.0 / 22.0).epsilon(1e-12));
    CHECK(interval_f1(0, 5, 10, 20, 0) == 0.0);
    CHECK(interval_f1(5, 25, 10, 20, 5) == 1.0);
    CHECK(interval_f1(7, 23, 10, 20, 5) == 1.0);
    CHECK(interval_f1(0, 5, 10, 20, 4) == 0.0);
    CHECK(interval_f1(0, 5, 10, 20, 5) > 0.0);
}

TEST_CASE("broadening never lowers F1") {
    std::mt19937 rng(3);
    for (int i = 0; i < 500; ++i) {
        const int ps = static_cast<int>(rng() % 200), pe = ps + static_cast<int>(rng() % 60);
        const int ts = static_cast<int>(rng() % 200), te = ts + static_cast<int>(rng() % 60);
        double prev = interval_f1(ps, pe, ts, te, 0);
        for (int b = 1; b <= 10; ++b) {
            const double cur = interval_f1(ps, pe, ts, te, b);
            CHECK(cur >= prev - 1e-12);
            CHECK(cur <= 1.0);
            prev = cur;
        }
    }
}

TEST_CASE("clip matching is one to one and maximizes total F1") {
    const auto m = match_clips({{0, 10}, {8, 30}}, {{0, 10}, {12, 30}}, 0);
    REQUIRE(m.size() == 2);
    CHECK(m[0].predicted == 0);
    CHECK(m[1].predicted == 1);
    CHECK(match_clips({{0, 10}}, {{50, 60}}, 0).empty());
    CHECK(match_clips({}, {{0, 1}}, 0).empty());
    const auto one = match_clips({{0, 100}}, {{0, 10}, {20, 30}, {40, 90}}, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].truth == 2);
}

TEST_CASE("scores of a perfect and an empty prediction") {
    const auto t = trace_of({truth(ActionKind::Tap, 10, 20), truth(ActionKind::Scroll, 50, 80),
                             truth(ActionKind::Input, 100, 200)});
    std::vector<PredictedAction> same;
    for (const auto& a : t.actions) same.push_back(predicted(a.kind, a.start_frame, a.end_frame));
    const auto perfect = evaluate(same, t, {5, 2});
    CHECK(perfect.vs_f1() == 1.0);
    CHECK(perfect.vs_f1_micro() == 1.0);
    CHECK(perfect.classification_accuracy() == 1.0);
    for (auto k : {ActionKind::Tap, ActionKind::Scroll, ActionKind::Input}) CHECK(perfect.vs_f1_kind(k) == 1.0);

    const auto none = evaluate({}, t, {});
    CHECK(none.vs_f1() == 0.0);
    CHECK(none.classification_accuracy() == 0.0);
    CHECK(none.attribute_accuracy(ActionKind::Tap) == 0.0);
}

TEST_CASE("extra predictions dilute the overlap score") {
    const auto t = trace_of({truth(ActionKind::Tap, 10, 20)});
    const auto r = evaluate({predicted(ActionKind::Tap, 10, 20), predicted(ActionKind::Tap, 300, 320)}, t, {0, 2});
    CHECK(r.vs_f1() == doctest::Approx(0.5));
    CHECK(r.classification_accuracy() == 1.0);
}

TEST_CASE("misclassified clips keep their overlap but lose accuracy") {
    const auto t = trace_of({truth(ActionKind::Scroll, 10, 40)});
    const auto r = evaluate({predicted(ActionKind::Tap, 10, 40)}, t, {});
    CHECK(r.vs_f1() == 1.0);
    CHECK(r.classification_accuracy() == 0.0);
    CHECK(r.attribute_accuracy(ActionKind::Scroll) == 0.0);
}

TEST_CASE("attribute checks") {
    const Box b{100, 200, 50, 40};
    CHECK(tap_correct({125.0 / 360, 220.0 / 640}, b, 360, 640));
    CHECK_FALSE(tap_correct({90.0 / 360, 220.0 / 640}, b, 360, 640));
    CHECK(scroll_correct(-198, -200, 2));
    CHECK_FALSE(scroll_correct(-197, -200, 2));
    CHECK_FALSE(scroll_correct(-198, -200, 0));
    CHECK(scroll_correct(150, 150, 0));
    CHECK_FALSE(scroll_correct(1, -1, 2));

    auto t = trace_of({truth(ActionKind::Tap, 10, 20), truth(ActionKind::Scroll, 50, 80),
                       truth(ActionKind::Input, 100, 200)});
    t.actions[0].target_box = b;
    t.actions[1].scroll_px = -200;
    t.actions[2].text = "John";
    auto p = std::vector<PredictedAction>{predicted(ActionKind::Tap, 10, 20), predicted(ActionKind::Scroll, 50, 80),
                                          predicted(ActionKind::Input, 100, 200)};
    p[0].attributes.tap = TapPoint{125.0 / 360, 220.0 / 640};
    p[1].attributes.scroll_px = -198;
    p[2].attributes.input_text = "Jon";
    const auto r = evaluate(p, t, {5, 2});
    CHECK(r.attribute_accuracy(ActionKind::Tap) == 1.0);
    CHECK(r.attribute_accuracy(ActionKind::Scroll) == 1.0);
    CHECK(r.attribute_accuracy(ActionKind::Input) == 0.0);
}

TEST_CASE("tallies pool across recordings") {
    const auto t = trace_of({truth(ActionKind::Tap, 10, 20)});
    EvalTally total;
    total.add(evaluate({predicted(ActionKind::Tap, 10, 20)}, t, {}));
    total.add(evaluate({}, t, {}));
    CHECK(total.recordings == 2);
    CHECK(total.n_truth == 2);
    CHECK(total.vs_f1() == doctest::Approx(0.5));
    CHECK(total.classification_accuracy() == doctest::Approx(0.5));

    EvalReport report;
    report.total = total;
    const auto j = eval_report_json(report);
    CHECK(j["total"]["recordings"] == 2);
    CHECK_FALSE(eval_report_table(report).empty());
    CHECK_THROWS_AS(evaluate({}, t, {-1, 2}), std::invalid_argument);
}
