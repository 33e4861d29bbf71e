// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <regex>

#include "recap/captioning.hpp"

using namespace recap;

namespace {

// Reference strings are written with TeX-style quotes; rendered text uses plain double quotes.
std::string tex(std::string s) {
    s = std::regex_replace(s, std::regex("``"), "\"");
    return std::regex_replace(s, std::regex("''"), "\"");
}

GuiElement element(ElementClass k, Box b, std::optional<std::string> text = std::nullopt, double confid = 0.95) {
    GuiElement e;
    e.klass = k;
    e.box = b;
    e.text = std::move(text);
    if (e.text) e.ocr_confid = confid;
    return e;
}

Screen screen_of(std::vector<GuiElement> es, double threshold = 160) {
    Screen s;
    s.width = 360;
    s.height = 640;
    s.elements = std::move(es);
    s.graph = build_graph(s.elements, {threshold, 0.3});
    return s;
}

TapPoint at(const Box& b) { return {b.center_x() / 360.0, b.center_y() / 640.0}; }

}  // namespace

TEST_CASE("template rows") {
    SUBCASE("tap a confidently labelled button") {
        const auto s = screen_of({element(ElementClass::Button, {120, 500, 120, 48}, "OK", 0.97)});
        const auto step = caption_tap(s, {at(s.elements[0].box)}, {});
        CHECK(step.template_id == 1);
        CHECK(step.text == tex("Tap ``OK'' button"));
    }
    SUBCASE("tap an icon with a moderately confident caption") {
        auto icon = element(ElementClass::Icon, {8, 28, 40, 40});
        icon.caption = "menu";
        icon.caption_confid = 0.75;
        const auto s = screen_of({icon});
        const auto step = caption_tap(s, {at(icon.box)}, {0.9, 0.5});
        CHECK(step.template_id == 2);
        CHECK(step.text == tex("Tap ``menu'' icon at top left corner"));
    }
    SUBCASE("tap an unlabelled checkbox beside its label") {
        const auto s = screen_of({element(ElementClass::Checkbox, {20, 300, 24, 24}),
                                  element(ElementClass::TextView, {56, 302, 120, 20}, "Dark Mode")});
        const auto step = caption_tap(s, {at(s.elements[0].box)}, {});
        CHECK(step.template_id == 3);
        CHECK(step.text == tex("Tap the checkbox next to ``Dark Mode''"));
    }
    SUBCASE("scroll to revealed text") {
        const auto s = screen_of({element(ElementClass::TextView, {24, 300, 160, 20}, "Advanced Setting")});
        const auto step = caption_scroll({320}, 640, &s, {"General"});
        CHECK(step.template_id == 4);
        CHECK(step.text == tex("Scroll down half of the screen to ``Advanced Setting''"));
    }
    SUBCASE("scroll without a revealed target") {
        const auto s = screen_of({element(ElementClass::TextView, {24, 300, 160, 20}, "General")});
        const auto step = caption_scroll({-160}, 640, &s, {"General"});
        CHECK(step.template_id == 5);
        CHECK(step.text == tex("Scroll up a quarter of the screen"));
        CHECK(caption_scroll({-160}, 640, nullptr, {}).text == step.text);
    }
    SUBCASE("input into a uniquely labelled field") {
        const auto s = screen_of({element(ElementClass::EditText, {24, 200, 300, 44}, "Amount", 0.96)});
        const auto step = caption_input(s, "100", at(s.elements[0].box), {});
        CHECK(step.template_id == 6);
        CHECK(step.text == tex("Input ``100'' in the ``Amount'' edittext"));
    }
    SUBCASE("input into a field whose label is not unique") {
        const auto s = screen_of({element(ElementClass::TextView, {24, 180, 80, 16}, "Name"),
                                  element(ElementClass::EditText, {24, 204, 300, 40}, "Name"),
                                  element(ElementClass::TextView, {24, 400, 80, 16}, "Other")});
        const auto step = caption_input(s, "John", at(s.elements[1].box), {});
        CHECK(step.template_id == 7);
        CHECK(step.text == tex("Input ``John'' in the edittext below ``Name''"));
    }
}

TEST_CASE("template selection thresholds") {
    const CaptionConfig cfg{0.9, 0.5};
    CHECK(select_template(ActionKind::Tap, true, 0.95, cfg) == 1);
    CHECK(select_template(ActionKind::Tap, true, 0.9, cfg) == 2);
    CHECK(select_template(ActionKind::Tap, true, 0.51, cfg) == 2);
    CHECK(select_template(ActionKind::Tap, true, 0.5, cfg) == 3);
    CHECK(select_template(ActionKind::Tap, false, 0.99, cfg) == 3);
    CHECK(select_template(ActionKind::Scroll, true, 0, cfg) == 4);
    CHECK(select_template(ActionKind::Scroll, false, 1, cfg) == 5);
    CHECK(select_template(ActionKind::Input, true, 0.95, cfg) == 6);
    CHECK(select_template(ActionKind::Input, true, 0.9, cfg) == 7);
    CHECK(select_template(ActionKind::Input, false, 0.95, cfg) == 7);
}

TEST_CASE("templates stay within the range of their action kind and never regress with confidence") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 2000; ++i) {
        const double beta = u(rng) * 0.9, alpha = beta + (1 - beta) * std::max(u(rng), 1e-3);
        const CaptionConfig cfg{alpha, beta};
        const double c = u(rng), c2 = std::min(1.0, c + u(rng) * 0.2);
        const bool label = u(rng) < 0.7;
        const int t = select_template(ActionKind::Tap, label, c, cfg);
        CHECK((t >= 1 && t <= 3));
        CHECK(select_template(ActionKind::Tap, label, c2, cfg) <= t);
        const int in = select_template(ActionKind::Input, label, c, cfg);
        CHECK((in == 6 || in == 7));
        const int sc = select_template(ActionKind::Scroll, label, c, cfg);
        CHECK((sc == 4 || sc == 5));
    }
}

TEST_CASE("caption config validation") {
    CHECK_NOTHROW(validate(CaptionConfig{0.9, 0.5}));
    CHECK_THROWS_AS(validate(CaptionConfig{0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CaptionConfig{1.2, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CaptionConfig{0.9, -0.1}), std::invalid_argument);
}

TEST_CASE("scroll distance phrasing") {
    CHECK(phrase_scroll_offset(320, 640) == ScrollPhrase{"half", 0});
    CHECK(phrase_scroll_offset(-320, 640) == ScrollPhrase{"half", 0});
    CHECK(phrase_scroll_offset(150, 640) == ScrollPhrase{"a quarter", 0});
    CHECK(phrase_scroll_offset(10, 640) == ScrollPhrase{"a quarter", 0});
    CHECK(phrase_scroll_offset(480, 640) == ScrollPhrase{"three quarters", 0});
    CHECK(phrase_scroll_offset(640, 640) == ScrollPhrase{"the full", 0});
    CHECK(render_offset(phrase_scroll_offset(1600, 640)) == "the full screen twice");
    CHECK(render_offset(phrase_scroll_offset(2000, 640)) == "the full screen three times");
    CHECK(render_offset(phrase_scroll_offset(700, 640)) == "the full screen");
    CHECK_THROWS_AS(phrase_scroll_offset(10, 0), std::invalid_argument);
}

TEST_CASE("object confidence is zero for duplicated labels") {
    const auto s = screen_of({element(ElementClass::Button, {0, 0, 50, 20}, "OK", 0.97),
                              element(ElementClass::Button, {0, 100, 50, 20}, "OK", 0.99),
                              element(ElementClass::Button, {0, 200, 50, 20}, "Cancel", 0.93),
                              element(ElementClass::Checkbox, {0, 300, 20, 20})});
    CHECK(object_confidence(s, 0) == 0);
    CHECK(object_confidence(s, 1) == 0);
    CHECK(object_confidence(s, 2) == doctest::Approx(0.93));
    CHECK(object_confidence(s, 3) == 0);
}

TEST_CASE("target resolution") {
    const auto s = screen_of({element(ElementClass::ImageView, {0, 100, 360, 300}),
                              element(ElementClass::Button, {100, 200, 80, 40}, "Go"),
                              element(ElementClass::EditText, {20, 500, 300, 40}, "Email"),
                              element(ElementClass::EditText, {20, 450, 300, 40}, "Name")});
    CHECK(resolve_tap_target(s, 140, 220) == 1);
    CHECK(resolve_tap_target(s, 20, 120) == 0);
    CHECK_FALSE(resolve_tap_target(s, 20, 20).has_value());
    CHECK(resolve_input_target(s, std::make_pair(50.0, 520.0)) == 2);
    CHECK(resolve_input_target(s, std::nullopt) == 3);
    CHECK(resolve_input_target(s, std::make_pair(140.0, 220.0)) == 3);
    CHECK(resolve_scroll_target(s, {"Go", "Email", "Name"}) == std::nullopt);
    CHECK(resolve_scroll_target(s, {"Go", "Name"}) == 2);
}

TEST_CASE("rendering requires its slots") {
    CHECK_THROWS_AS(render_description(1, Slots{}), MissingSlot);
    Slots s;
    s.direction = ScrollDirection::Down;
    CHECK_THROWS_AS(render_description(5, s), MissingSlot);
    CHECK_THROWS_AS(render_description(9, s), std::invalid_argument);
    Slots only_text;
    only_text.input_text = "hi";
    CHECK(render_description(7, only_text) == "Input \"hi\"");
}

TEST_CASE("descriptions parse back to their slots") {
    std::vector<std::pair<int, Slots>> cases;
    Slots s1;
    s1.obj_text = "OK";
    s1.obj_class = ElementClass::Button;
    cases.emplace_back(1, s1);
    Slots s2 = s1;
    s2.obj_class = ElementClass::Icon;
    s2.position = "bottom right corner";
    cases.emplace_back(2, s2);
    Slots s3;
    s3.obj_class = ElementClass::Checkbox;
    s3.relation = Relation::NextTo;
    s3.nbr_text = "Dark Mode";
    cases.emplace_back(3, s3);
    Slots s3p;
    s3p.obj_class = ElementClass::Switch;
    s3p.position = "center";
    cases.emplace_back(3, s3p);
    Slots s3a;
    s3a.position = "top";
    cases.emplace_back(3, s3a);
    Slots s4;
    s4.direction = ScrollDirection::Down;
    s4.offset = ScrollPhrase{"the full", 3};
    s4.obj_text = "Wallpaper";
    cases.emplace_back(4, s4);
    Slots s5;
    s5.direction = ScrollDirection::Up;
    s5.offset = ScrollPhrase{"three quarters", 0};
    cases.emplace_back(5, s5);
    Slots s6;
    s6.input_text = "100";
    s6.obj_text = "Amount";
    s6.obj_class = ElementClass::EditText;
    cases.emplace_back(6, s6);
    Slots s7;
    s7.input_text = "John";
    s7.obj_class = ElementClass::EditText;
    s7.relation = Relation::Below;
    s7.nbr_text = "Name";
    cases.emplace_back(7, s7);
    Slots s7c;
    s7c.input_text = "x y";
    s7c.obj_class = ElementClass::EditText;
    cases.emplace_back(7, s7c);
    for (const auto& [id, slots] : cases) {
        const auto text = render_description(id, slots);
        const auto back = parse_description(text);
        REQUIRE_MESSAGE(back.has_value(), text);
        CHECK(back->first == id);
        CHECK_MESSAGE(back->second == slots, text);
    }
    CHECK_FALSE(parse_description("Swipe left").has_value());
}
