// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/captioning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <regex>

namespace recap {

void validate(const CaptionConfig& cfg) {
    if (!(cfg.beta >= 0 && cfg.beta < cfg.alpha && cfg.alpha <= 1))
        throw std::invalid_argument("caption thresholds must satisfy 0 <= beta < alpha <= 1");
}

double object_confidence(const Screen& screen, int element) {
    const GuiElement& e = screen.elements.at(static_cast<std::size_t>(element));
    const auto& label = e.label();
    if (!label) return 0;
    const auto same = std::count_if(screen.elements.begin(), screen.elements.end(),
                                    [&](const GuiElement& o) { return o.label() == label; });
    return same == 1 ? e.label_confid() : 0;
}

const char* relation_words(Relation r) {
    switch (r) {
        case Relation::NextTo: return "next to";
        case Relation::Below: return "below";
        case Relation::Above: return "above";
        case Relation::LeftOf: return "left of";
        case Relation::RightOf: return "right of";
    }
    return "?";
}

namespace {

constexpr std::array<std::pair<double, const char*>, 4> kBuckets = {{
    {0.25, "a quarter"},
    {0.5, "half"},
    {0.75, "three quarters"},
    {1.0, "the full"},
}};

std::string times_word(int n) {
    static constexpr std::array<const char*, 11> kWords = {"",      "once",  "twice", "three", "four", "five",
                                                           "six",   "seven", "eight", "nine",  "ten"};
    if (n == 1) return kWords[1];
    if (n == 2) return kWords[2];
    if (n < static_cast<int>(kWords.size())) return std::string(kWords[n]) + " times";
    return std::to_string(n) + " times";
}

std::optional<int> parse_times(const std::string& s) {
    for (int n = 2; n <= 10; ++n)
        if (times_word(n) == s) return n;
    static const std::regex digits(R"((\d+) times)");
    std::smatch m;
    if (std::regex_match(s, m, digits)) return std::stoi(m[1]);
    return std::nullopt;
}

}  // namespace

ScrollPhrase phrase_scroll_offset(int distance_px, int frame_height) {
    if (frame_height <= 0) throw std::invalid_argument("frame height must be positive");
    const double r = std::abs(static_cast<double>(distance_px)) / frame_height;
    if (r > 1) {
        const int whole = static_cast<int>(std::floor(r));
        return {"the full", whole >= 2 ? whole : 0};
    }
    if (r < 0.125) return {"a quarter", 0};
    std::size_t best = 0;
    for (std::size_t i = 1; i < kBuckets.size(); ++i)
        if (std::abs(r - kBuckets[i].first) < std::abs(r - kBuckets[best].first)) best = i;
    return {kBuckets[best].second, 0};
}

std::string render_offset(const ScrollPhrase& phrase) {
    if (phrase.bucket != "the full") return phrase.bucket + " of the screen";
    std::string out = "the full screen";
    if (phrase.repeat >= 2) out += " " + times_word(phrase.repeat);
    return out;
}

int select_template(ActionKind kind, bool has_label, double confid, const CaptionConfig& cfg) {
    switch (kind) {
        case ActionKind::Tap:
            if (has_label && confid > cfg.alpha) return 1;
            if (has_label && confid > cfg.beta) return 2;
            return 3;
        case ActionKind::Scroll: return has_label ? 4 : 5;
        case ActionKind::Input: return has_label && confid > cfg.alpha ? 6 : 7;
    }
    return 3;
}

namespace {

template <typename T>
const T& need(const std::optional<T>& v, const char* slot, int id) {
    if (!v) throw MissingSlot("template " + std::to_string(id) + " needs slot " + slot);
    return *v;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string word(ElementClass c) { return std::string(class_word(c)); }

}  // namespace

std::string render_description(int id, const Slots& s) {
    switch (id) {
        case 1:
            return "Tap " + quoted(need(s.obj_text, "obj_text", id)) + " " + word(need(s.obj_class, "obj_class", id));
        case 2:
            return "Tap " + quoted(need(s.obj_text, "obj_text", id)) + " " + word(need(s.obj_class, "obj_class", id)) +
                   " at " + need(s.position, "position", id);
        case 3:
            if (!s.obj_class) return "Tap at " + need(s.position, "position", id);
            if (s.relation && s.nbr_text)
                return "Tap the " + word(*s.obj_class) + " " + relation_words(*s.relation) + " " + quoted(*s.nbr_text);
            return "Tap the " + word(*s.obj_class) + " at " + need(s.position, "position", id);
        case 4:
            return "Scroll " + std::string(to_string(need(s.direction, "direction", id))) + " " +
                   render_offset(need(s.offset, "offset", id)) + " to " + quoted(need(s.obj_text, "obj_text", id));
        case 5:
            return "Scroll " + std::string(to_string(need(s.direction, "direction", id))) + " " +
                   render_offset(need(s.offset, "offset", id));
        case 6:
            return "Input " + quoted(need(s.input_text, "input_text", id)) + " in the " +
                   quoted(need(s.obj_text, "obj_text", id)) + " " + word(need(s.obj_class, "obj_class", id));
        case 7: {
            std::string out = "Input " + quoted(need(s.input_text, "input_text", id));
            if (!s.obj_class) return out;
            out += " in the " + word(*s.obj_class);
            if (s.relation && s.nbr_text) out += " " + std::string(relation_words(*s.relation)) + " " + quoted(*s.nbr_text);
            return out;
        }
        default: throw std::invalid_argument("unknown template id " + std::to_string(id));
    }
}

namespace {

std::string class_alternatives() {
    std::string alt;
    for (auto c : kAllElementClasses) {
        if (!alt.empty()) alt += "|";
        alt += class_word(c);
    }
    return "(" + alt + ")";
}

std::optional<ElementClass> class_from_word(const std::string& w) {
    for (auto c : kAllElementClasses)
        if (class_word(c) == w) return c;
    return std::nullopt;
}

std::optional<Relation> relation_from_words(const std::string& w) {
    for (auto r : {Relation::NextTo, Relation::Below, Relation::Above, Relation::LeftOf, Relation::RightOf})
        if (w == relation_words(r)) return r;
    return std::nullopt;
}

std::optional<ScrollPhrase> offset_from_text(const std::string& s) {
    for (const auto& [frac, name] : kBuckets) {
        (void)frac;
        if (std::string(name) == "the full") continue;
        if (s == std::string(name) + " of the screen") return ScrollPhrase{name, 0};
    }
    if (s == "the full screen") return ScrollPhrase{"the full", 0};
    const std::string prefix = "the full screen ";
    if (s.rfind(prefix, 0) == 0) {
        if (auto n = parse_times(s.substr(prefix.size()))) return ScrollPhrase{"the full", *n};
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::pair<int, Slots>> parse_description(const std::string& text) {
    const std::string cls = class_alternatives();
    const std::string q = "\"([^\"]*)\"";
    const std::string rel = "(next to|below|above|left of|right of)";
    const std::string pos = "(.+)";
    static const std::regex t2("Tap " + q + " " + cls + " at " + pos);
    static const std::regex t1("Tap " + q + " " + cls);
    static const std::regex t3n("Tap the " + cls + " " + rel + " " + q);
    static const std::regex t3p("Tap the " + cls + " at " + pos);
    static const std::regex t3a("Tap at " + pos);
    static const std::regex t4("Scroll (up|down) (.+) to " + q);
    static const std::regex t5("Scroll (up|down) (.+)");
    static const std::regex t6("Input " + q + " in the " + q + " " + cls);
    static const std::regex t7n("Input " + q + " in the " + cls + " " + rel + " " + q);
    static const std::regex t7c("Input " + q + " in the " + cls);
    static const std::regex t7("Input " + q);

    std::smatch m;
    Slots s;
    auto position = [](const std::string& p) -> std::optional<std::string> {
        if (parse_position_phrase(p)) return p;
        return std::nullopt;
    };
    auto direction = [](const std::string& d) { return d == "down" ? ScrollDirection::Down : ScrollDirection::Up; };

    if (std::regex_match(text, m, t2) && position(m[3])) {
        s.obj_text = m[1];
        s.obj_class = class_from_word(m[2]);
        s.position = m[3];
        return std::make_pair(2, s);
    }
    if (std::regex_match(text, m, t1)) {
        s.obj_text = m[1];
        s.obj_class = class_from_word(m[2]);
        return std::make_pair(1, s);
    }
    if (std::regex_match(text, m, t3n)) {
        s.obj_class = class_from_word(m[1]);
        s.relation = relation_from_words(m[2]);
        s.nbr_text = m[3];
        return std::make_pair(3, s);
    }
    if (std::regex_match(text, m, t3p) && position(m[2])) {
        s.obj_class = class_from_word(m[1]);
        s.position = m[2];
        return std::make_pair(3, s);
    }
    if (std::regex_match(text, m, t3a) && position(m[1])) {
        s.position = m[1];
        return std::make_pair(3, s);
    }
    if (std::regex_match(text, m, t4)) {
        if (auto off = offset_from_text(m[2])) {
            s.direction = direction(m[1]);
            s.offset = off;
            s.obj_text = m[3];
            return std::make_pair(4, s);
        }
    }
    if (std::regex_match(text, m, t5)) {
        if (auto off = offset_from_text(m[2])) {
            s.direction = direction(m[1]);
            s.offset = off;
            return std::make_pair(5, s);
        }
    }
    if (std::regex_match(text, m, t6)) {
        s.input_text = m[1];
        s.obj_text = m[2];
        s.obj_class = class_from_word(m[3]);
        return std::make_pair(6, s);
    }
    if (std::regex_match(text, m, t7n)) {
        s.input_text = m[1];
        s.obj_class = class_from_word(m[2]);
        s.relation = relation_from_words(m[3]);
        s.nbr_text = m[4];
        return std::make_pair(7, s);
    }
    if (std::regex_match(text, m, t7c)) {
        s.input_text = m[1];
        s.obj_class = class_from_word(m[2]);
        return std::make_pair(7, s);
    }
    if (std::regex_match(text, m, t7)) {
        s.input_text = m[1];
        return std::make_pair(7, s);
    }
    return std::nullopt;
}

// --- targets -----------------------------------------------------------------

std::optional<int> resolve_tap_target(const Screen& screen, double px, double py) {
    std::optional<int> best;
    for (std::size_t i = 0; i < screen.elements.size(); ++i) {
        const Box& b = screen.elements[i].box;
        if (!b.contains(px, py)) continue;
        if (!best || b.area() < screen.elements[*best].box.area()) best = static_cast<int>(i);
    }
    return best;
}

std::optional<int> resolve_input_target(const Screen& screen, std::optional<std::pair<double, double>> tap_px) {
    std::optional<int> topmost;
    for (std::size_t i = 0; i < screen.elements.size(); ++i) {
        const auto& e = screen.elements[i];
        if (e.klass != ElementClass::EditText) continue;
        if (tap_px && e.box.contains(tap_px->first, tap_px->second)) return static_cast<int>(i);
        if (!topmost || e.box.y < screen.elements[*topmost].box.y) topmost = static_cast<int>(i);
    }
    return topmost;
}

std::optional<int> resolve_scroll_target(const Screen& after, const std::vector<std::string>& before_texts) {
    std::optional<int> best;
    double best_d = 0;
    const double cx = after.width / 2.0, cy = after.height / 2.0;
    for (std::size_t i = 0; i < after.elements.size(); ++i) {
        const auto& e = after.elements[i];
        if (!e.text) continue;
        if (std::find(before_texts.begin(), before_texts.end(), *e.text) != before_texts.end()) continue;
        const double d = std::hypot(e.box.center_x() - cx, e.box.center_y() - cy);
        if (!best || d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

TargetChoice describe_neighbor(const Screen& screen, int element) {
    TargetChoice c;
    c.element = element;
    std::optional<Direction> dir;
    double best = 0;
    for (auto d : kAllDirections) {
        const auto& n = screen.graph.neighbor(element, d);
        if (!n || !screen.elements[n->index].label()) continue;
        if (!dir || n->distance < best) {
            dir = d;
            best = n->distance;
            c.neighbor = n->index;
        }
    }
    if (!dir) return c;
    const bool left = screen.graph.neighbor(element, Direction::Left).has_value();
    const bool right = screen.graph.neighbor(element, Direction::Right).has_value();
    switch (*dir) {
        case Direction::Top: c.relation = Relation::Below; break;
        case Direction::Bottom: c.relation = Relation::Above; break;
        case Direction::Left: c.relation = right ? Relation::RightOf : Relation::NextTo; break;
        case Direction::Right: c.relation = left ? Relation::LeftOf : Relation::NextTo; break;
    }
    return c;
}

// --- steps -------------------------------------------------------------------

StepDescription caption_tap(const Screen& screen, const TapContext& tap, const CaptionConfig& cfg) {
    StepDescription step;
    step.kind = ActionKind::Tap;
    const double px = tap.point.x * screen.width, py = tap.point.y * screen.height;
    const auto target = resolve_tap_target(screen, px, py);
    Slots& s = step.slots;
    if (!target) {
        step.template_id = 3;
        const Box at{static_cast<int>(px), static_cast<int>(py), 0, 0};
        s.position = position_phrase(absolute_position(at, screen.width, screen.height));
        step.text = render_description(3, s);
        return step;
    }
    const GuiElement& e = screen.elements[*target];
    step.obj_confid = object_confidence(screen, *target);
    if (e.label()) step.label_confid = e.label_confid();
    step.template_id = select_template(ActionKind::Tap, e.label().has_value(), step.obj_confid, cfg);
    s.obj_class = e.klass;
    const std::string pos = position_phrase(absolute_position(e.box, screen.width, screen.height));
    if (step.template_id <= 2) {
        s.obj_text = *e.label();
        if (step.template_id == 2) s.position = pos;
    } else {
        const auto nb = describe_neighbor(screen, *target);
        if (nb.neighbor) {
            s.relation = nb.relation;
            s.nbr_text = *screen.elements[*nb.neighbor].label();
        } else {
            s.position = pos;
        }
    }
    step.text = render_description(step.template_id, s);
    return step;
}

StepDescription caption_scroll(const ScrollOffset& offset, int frame_height, const Screen* after,
                               const std::vector<std::string>& before_texts) {
    StepDescription step;
    step.kind = ActionKind::Scroll;
    Slots& s = step.slots;
    s.direction = offset.direction();
    s.offset = phrase_scroll_offset(offset.distance_px, frame_height);
    std::optional<int> target;
    if (after) target = resolve_scroll_target(*after, before_texts);
    step.template_id = select_template(ActionKind::Scroll, target.has_value(), 0, {});
    if (target) {
        s.obj_text = *after->elements[*target].text;
        step.label_confid = after->elements[*target].ocr_confid;
    }
    step.text = render_description(step.template_id, s);
    return step;
}

StepDescription caption_input(const Screen& screen, const std::string& text, std::optional<TapPoint> field_tap,
                              const CaptionConfig& cfg) {
    StepDescription step;
    step.kind = ActionKind::Input;
    Slots& s = step.slots;
    s.input_text = text;
    std::optional<std::pair<double, double>> tap_px;
    if (field_tap) tap_px = std::make_pair(field_tap->x * screen.width, field_tap->y * screen.height);
    const auto target = resolve_input_target(screen, tap_px);
    if (!target) {
        step.template_id = 7;
        step.text = render_description(7, s);
        return step;
    }
    const GuiElement& e = screen.elements[*target];
    step.obj_confid = object_confidence(screen, *target);
    if (e.label()) step.label_confid = e.label_confid();
    step.template_id = select_template(ActionKind::Input, e.label().has_value(), step.obj_confid, cfg);
    s.obj_class = e.klass;
    if (step.template_id == 6) {
        s.obj_text = *e.label();
    } else {
        const auto nb = describe_neighbor(screen, *target);
        if (nb.neighbor) {
            s.relation = nb.relation;
            s.nbr_text = *screen.elements[*nb.neighbor].label();
        }
    }
    step.text = render_description(step.template_id, s);
    return step;
}

}  // namespace recap
