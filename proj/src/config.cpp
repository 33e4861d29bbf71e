// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

namespace recap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Field {
    const char* key;
    std::function<ordered_json(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const json&)> set;
};

#define RECAP_FIELD(T, key, expr)                                                                       \
    Field {                                                                                             \
        key, [](const PipelineConfig& c) { return ordered_json(c.expr); },                            \
            [](PipelineConfig& c, const json& v) { c.expr = v.get<T>(); }                                \
    }

// Every config key, grouped by section, with its getter and setter.
using Section = std::pair<const char*, std::vector<Field>>;

std::vector<Field> adapter_fields(AdapterSettings PipelineConfig::*which) {
    return {
        {"command", [which](const PipelineConfig& c) { return ordered_json((c.*which).command); },
         [which](PipelineConfig& c, const json& v) { (c.*which).command = v.get<std::string>(); }},
        {"timeout_ms", [which](const PipelineConfig& c) { return ordered_json((c.*which).timeout_ms); },
         [which](PipelineConfig& c, const json& v) { (c.*which).timeout_ms = v.get<int>(); }},
        {"max_parallel", [which](const PipelineConfig& c) { return ordered_json((c.*which).max_parallel); },
         [which](PipelineConfig& c, const json& v) { (c.*which).max_parallel = v.get<int>(); }},
    };
}

const std::vector<Section>& sections() {
    static const std::vector<Section> table = {
        {"segmentation",
         {
             RECAP_FIELD(double, "drop_threshold", segmentation.drop_threshold),
             RECAP_FIELD(double, "steady_gap_max_s", segmentation.steady_gap_max_s),
             RECAP_FIELD(double, "scroll_min_s", segmentation.scroll_min_s),
             RECAP_FIELD(int, "input_min_oscillations", segmentation.input_min_oscillations),
             RECAP_FIELD(int, "keyboard_stride", segmentation.keyboard_stride),
             RECAP_FIELD(double, "clip_pad_s", segmentation.clip_pad_s),
             RECAP_FIELD(double, "activity_margin", segmentation.activity_margin),
             RECAP_FIELD(double, "activity_noise_k", segmentation.activity_noise_k),
             RECAP_FIELD(int, "downsample_factor", segmentation.downsample_factor),
             RECAP_FIELD(int, "ssim_window", segmentation.ssim.window),
         }},
        {"scroll",
         {
             RECAP_FIELD(int, "folds", scroll.folds),
             RECAP_FIELD(double, "min_correlation", scroll.min_correlation),
             RECAP_FIELD(int, "search_radius", scroll.search_radius),
             RECAP_FIELD(double, "chrome_correlation", scroll.chrome_correlation),
             RECAP_FIELD(double, "chrome_fraction", scroll.chrome_fraction),
         }},
        {"tap",
         {
             RECAP_FIELD(int, "change_threshold", tap.change_threshold),
             RECAP_FIELD(int, "min_blob_pixels", tap.min_blob_pixels),
             RECAP_FIELD(double, "max_box_fraction", tap.max_box_fraction),
             RECAP_FIELD(double, "min_fill", tap.min_fill),
             RECAP_FIELD(double, "max_aspect", tap.max_aspect),
         }},
        {"gui",
         {
             RECAP_FIELD(double, "neighbor_fraction", neighbor_fraction),
             RECAP_FIELD(double, "min_axis_overlap", min_axis_overlap),
         }},
        {"caption",
         {
             RECAP_FIELD(double, "alpha", caption.alpha),
             RECAP_FIELD(double, "beta", caption.beta),
         }},
        {"ocr", adapter_fields(&PipelineConfig::ocr)},
        {"detector", adapter_fields(&PipelineConfig::detector)},
        {"captioner", adapter_fields(&PipelineConfig::captioner)},
        {"tap_localizer", adapter_fields(&PipelineConfig::tap_localizer)},
        {"eval",
         {
             RECAP_FIELD(int, "broaden", eval.broaden),
             RECAP_FIELD(int, "scroll_tolerance_px", eval.scroll_tolerance_px),
         }},
    };
    return table;
}

#undef RECAP_FIELD

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void validate(const PipelineConfig& c) {
    const auto& s = c.segmentation;
    require(s.drop_threshold > 0 && s.drop_threshold < 1, "segmentation.drop_threshold must lie in (0, 1)");
    require(s.steady_gap_max_s >= 0, "segmentation.steady_gap_max_s must be >= 0");
    require(s.scroll_min_s > 0, "segmentation.scroll_min_s must be > 0");
    require(s.input_min_oscillations >= 1, "segmentation.input_min_oscillations must be >= 1");
    require(s.keyboard_stride >= 1, "segmentation.keyboard_stride must be >= 1");
    require(s.clip_pad_s >= 0, "segmentation.clip_pad_s must be >= 0");
    require(s.activity_margin >= 0, "segmentation.activity_margin must be >= 0");
    require(s.activity_noise_k >= 0, "segmentation.activity_noise_k must be >= 0");
    require(s.downsample_factor >= 0, "segmentation.downsample_factor must be >= 0 (0 = automatic)");
    require(s.ssim.window >= 3 && s.ssim.window % 2 == 1, "segmentation.ssim_window must be odd and >= 3");
    require(c.scroll.folds >= 2, "scroll.folds (K) must be >= 2");
    require(c.scroll.min_correlation >= -1 && c.scroll.min_correlation <= 1, "scroll.min_correlation must lie in [-1, 1]");
    require(c.scroll.search_radius >= 0, "scroll.search_radius must be >= 0 (0 = a third of the height)");
    require(c.scroll.chrome_fraction > 0 && c.scroll.chrome_fraction <= 1, "scroll.chrome_fraction must lie in (0, 1]");
    require(c.tap.change_threshold >= 0 && c.tap.change_threshold < 255, "tap.change_threshold must lie in [0, 255)");
    require(c.tap.min_blob_pixels >= 1, "tap.min_blob_pixels must be >= 1");
    require(c.tap.max_box_fraction > 0 && c.tap.max_box_fraction <= 1, "tap.max_box_fraction must lie in (0, 1]");
    require(c.tap.min_fill >= 0 && c.tap.min_fill <= 1, "tap.min_fill must lie in [0, 1]");
    require(c.tap.max_aspect >= 1, "tap.max_aspect must be >= 1");
    require(c.neighbor_fraction > 0, "gui.neighbor_fraction must be > 0");
    require(c.min_axis_overlap >= 0 && c.min_axis_overlap <= 1, "gui.min_axis_overlap must lie in [0, 1]");
    require(c.caption.beta >= 0 && c.caption.beta < c.caption.alpha && c.caption.alpha <= 1,
            "caption thresholds need 0 <= beta < alpha <= 1");
    for (const auto* a : {&c.ocr, &c.detector, &c.captioner, &c.tap_localizer}) {
        require(a->timeout_ms > 0, "adapter timeout_ms must be > 0");
        require(a->max_parallel >= 1, "adapter max_parallel must be >= 1");
    }
    require(c.eval.broaden >= 0, "eval.broaden must be >= 0");
    require(c.eval.scroll_tolerance_px >= 0, "eval.scroll_tolerance_px must be >= 0");
}

ordered_json config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["schema"] = "1";
    for (const auto& [name, fields] : sections()) {
        ordered_json s;
        for (const auto& f : fields) s[f.key] = f.get(cfg);
        j[name] = s;
    }
    return j;
}

PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    PipelineConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "schema") {
            if (value != "1") throw ConfigError("unsupported config schema " + value.dump());
            continue;
        }
        const auto sec = std::find_if(sections().begin(), sections().end(),
                                      [&](const Section& s) { return key == s.first; });
        if (sec == sections().end()) throw ConfigError("unknown config section '" + key + "'");
        if (!value.is_object()) throw ConfigError("config section '" + key + "' must be an object");
        for (const auto& [fk, fv] : value.items()) {
            const auto f = std::find_if(sec->second.begin(), sec->second.end(),
                                        [&](const Field& x) { return fk == x.key; });
            if (f == sec->second.end()) throw ConfigError("unknown config key '" + key + "." + fk + "'");
            try {
                f->set(cfg, fv);
            } catch (const json::exception&) {
                throw ConfigError("config key '" + key + "." + fk + "' has the wrong type");
            }
        }
    }
    validate(cfg);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace recap
