// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace recap {

/// The closed set of detectable GUI element classes.
enum class ElementClass {
    Button,
    Checkbox,
    Icon,
    ImageView,
    TextView,
    RadioButton,
    Spinner,
    Switch,
    ToggleButton,
    EditText,
    Chronometer,
};

inline constexpr std::array<ElementClass, 11> kAllElementClasses = {
    ElementClass::Button,   ElementClass::Checkbox,     ElementClass::Icon,
    ElementClass::ImageView, ElementClass::TextView,    ElementClass::RadioButton,
    ElementClass::Spinner,  ElementClass::Switch,       ElementClass::ToggleButton,
    ElementClass::EditText, ElementClass::Chronometer,
};

/// Annotation name ("button", "radio button", ...).
std::string_view class_name(ElementClass c);
/// Word used in rendered descriptions.
std::string_view class_word(ElementClass c);
std::optional<ElementClass> parse_element_class(std::string_view name);

}  // namespace recap
