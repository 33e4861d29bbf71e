// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

// Model adapters. Each model the pipeline depends on (OCR, element
// detection, icon captioning, tap localization) sits behind an interface
// with two realizations: a fixture reader for sibling annotation files and
// a subprocess speaking the one-line JSON protocol in docs/adapters.md.

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/element_class.hpp"
#include "recap/frame_io.hpp"
#include "recap/image.hpp"

namespace recap {

inline constexpr const char* kAdapterSchema = "1";

class AdapterError : public std::runtime_error {
public:
    enum class Kind { Unavailable, Timeout, MalformedOutput, Failed };

    AdapterError(Kind kind, std::string adapter, const std::string& what)
        : std::runtime_error(adapter + ": " + what), kind_(kind), adapter_(std::move(adapter)) {}

    Kind kind() const { return kind_; }
    const std::string& adapter() const { return adapter_; }

private:
    Kind kind_;
    std::string adapter_;
};

const char* to_string(AdapterError::Kind kind);

struct OcrItem {
    std::string text;
    Box box;
    double confidence = 0;
    bool operator==(const OcrItem&) const = default;
};

struct DetectedElement {
    ElementClass klass = ElementClass::TextView;
    Box box;
    double confidence = 1.0;
};

struct IconCaption {
    std::string text;
    double confidence = 0;
};

/// Normalized point in [0,1]^2 relative to frame width/height.
struct TapPoint {
    double x = 0.5;
    double y = 0.5;
};

class OcrAdapter {
public:
    virtual ~OcrAdapter() = default;
    virtual std::vector<OcrItem> recognize(const Frame& frame) = 0;
};

class ElementDetector {
public:
    virtual ~ElementDetector() = default;
    virtual std::vector<DetectedElement> detect(const Frame& frame) = 0;
};

class IconCaptioner {
public:
    virtual ~IconCaptioner() = default;
    virtual std::optional<IconCaption> caption(const Frame& frame, const Box& crop) = 0;
};

/// Clip -> tap point contract. `sample` holds the 16 sampled frame indices.
class TapLocalizer {
public:
    virtual ~TapLocalizer() = default;
    virtual std::optional<TapPoint> locate(const Recording& rec, std::span<const int> sample) = 0;
};

/// Reading order: row bands (items whose tops lie within half the median
/// box height of the band's first item) top to bottom, then left to right.
std::vector<OcrItem> reading_order(std::vector<OcrItem> items);

// --- fixtures ---------------------------------------------------------------

/// Everything a fixture adapter can answer for one frame.
struct FrameAnnotations {
    std::vector<OcrItem> ocr;
    struct Element {
        ElementClass klass = ElementClass::TextView;
        Box box;
        std::optional<std::string> text;
        double text_confid = 0;
        std::optional<std::string> caption;
        double caption_confid = 0;
    };
    std::vector<Element> elements;
};

/// In-memory annotations indexed by frame index; used when frames have no
/// backing files (e.g. recordings rendered directly by the harness).
using AnnotationTable = std::vector<FrameAnnotations>;

nlohmann::ordered_json ocr_to_json(const std::vector<OcrItem>& items);
std::vector<OcrItem> ocr_from_json(const nlohmann::json& j, const std::string& adapter);
nlohmann::ordered_json elements_to_json(const std::vector<FrameAnnotations::Element>& elements);
std::vector<FrameAnnotations::Element> elements_from_json(const nlohmann::json& j,
                                                          const std::string& adapter);

/// Path of the sibling fixture `<frame stem>.<kind>.json`.
std::filesystem::path fixture_path(const std::filesystem::path& frame_path, const std::string& kind);

/// Shared lookup used by all fixture adapters: sibling files when the frame
/// has a source path, else the in-memory table.
class FixtureStore {
public:
    explicit FixtureStore(std::shared_ptr<const AnnotationTable> table = nullptr)
        : table_(std::move(table)) {}

    std::vector<OcrItem> ocr(const Frame& frame) const;
    std::vector<FrameAnnotations::Element> elements(const Frame& frame) const;

private:
    std::shared_ptr<const AnnotationTable> table_;
};

class FixtureOcr final : public OcrAdapter {
public:
    explicit FixtureOcr(FixtureStore store = FixtureStore()) : store_(std::move(store)) {}
    std::vector<OcrItem> recognize(const Frame& frame) override { return store_.ocr(frame); }

private:
    FixtureStore store_;
};

class FixtureDetector final : public ElementDetector {
public:
    explicit FixtureDetector(FixtureStore store = FixtureStore()) : store_(std::move(store)) {}
    std::vector<DetectedElement> detect(const Frame& frame) override;

private:
    FixtureStore store_;
};

/// Answers with the caption annotated on the icon whose box best overlaps the crop.
class FixtureCaptioner final : public IconCaptioner {
public:
    explicit FixtureCaptioner(FixtureStore store = FixtureStore()) : store_(std::move(store)) {}
    std::optional<IconCaption> caption(const Frame& frame, const Box& crop) override;

private:
    FixtureStore store_;
};

// --- subprocess protocol -----------------------------------------------------

struct CommandSpec {
    std::string name;                   // adapter role, used in messages
    std::vector<std::string> argv;      // argv[0] resolved via PATH
    std::chrono::milliseconds timeout{20000};
    int max_parallel = 2;
};

/// Splits a command line on whitespace (no quoting rules).
std::vector<std::string> split_command(const std::string& command);

/// Spawns the command per call, writes one request line, reads one reply line.
class CommandChannel {
public:
    explicit CommandChannel(CommandSpec spec);

    /// Throws AdapterError(Unavailable) if argv[0] cannot be executed.
    void check_available() const;
    nlohmann::json call(const nlohmann::json& request);
    const CommandSpec& spec() const { return spec_; }

private:
    CommandSpec spec_;
    std::counting_semaphore<256> slots_;
};

class CommandOcr final : public OcrAdapter {
public:
    explicit CommandOcr(std::shared_ptr<CommandChannel> ch) : ch_(std::move(ch)) {}
    std::vector<OcrItem> recognize(const Frame& frame) override;

private:
    std::shared_ptr<CommandChannel> ch_;
};

class CommandDetector final : public ElementDetector {
public:
    explicit CommandDetector(std::shared_ptr<CommandChannel> ch) : ch_(std::move(ch)) {}
    std::vector<DetectedElement> detect(const Frame& frame) override;

private:
    std::shared_ptr<CommandChannel> ch_;
};

class CommandCaptioner final : public IconCaptioner {
public:
    explicit CommandCaptioner(std::shared_ptr<CommandChannel> ch) : ch_(std::move(ch)) {}
    std::optional<IconCaption> caption(const Frame& frame, const Box& crop) override;

private:
    std::shared_ptr<CommandChannel> ch_;
};

class CommandTapLocalizer final : public TapLocalizer {
public:
    explicit CommandTapLocalizer(std::shared_ptr<CommandChannel> ch) : ch_(std::move(ch)) {}
    std::optional<TapPoint> locate(const Recording& rec, std::span<const int> sample) override;

private:
    std::shared_ptr<CommandChannel> ch_;
};

}  // namespace recap
