// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "recap/config.hpp"
#include "recap/evaluation.hpp"
#include "recap/frame_io.hpp"
#include "recap/harness.hpp"
#include "recap/pipeline.hpp"
#include "recap/subtitles.hpp"

namespace fs = std::filesystem;
using namespace recap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitAdapter = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PipelineConfig resolve_config(const std::string& flag) {
    if (!flag.empty()) return load_config(flag);
    if (const char* env = std::getenv("RECAP_CONFIG"); env && *env) return load_config(env);
    return {};
}

void refuse_inside(const fs::path& out, const fs::path& input) {
    const auto o = fs::weakly_canonical(out), i = fs::weakly_canonical(input);
    auto [mi, mo] = std::mismatch(i.begin(), i.end(), o.begin(), o.end());
    if (mi == i.end()) throw UsageError("--out must not lie inside the input directory " + input.string());
}

bool is_recording_dir(const fs::path& p) { return fs::is_regular_file(p / "manifest.json"); }

struct EvalItem {
    std::string name;
    fs::path recording;
    fs::path trace;
};

std::vector<EvalItem> eval_items(const fs::path& input, const std::string& trace_flag) {
    if (is_recording_dir(input)) {
        const fs::path trace = trace_flag.empty() ? input / "trace.json" : fs::path(trace_flag);
        return {{input.filename().string(), input, trace}};
    }
    if (!trace_flag.empty()) throw UsageError("--trace applies to a single recording, not a batch directory");
    std::vector<EvalItem> items;
    if (fs::is_directory(input)) {
        for (const auto& e : fs::directory_iterator(input))
            if (e.is_directory() && is_recording_dir(e.path()) && fs::is_regular_file(e.path() / "trace.json"))
                items.push_back({e.path().filename().string(), e.path(), e.path() / "trace.json"});
    }
    std::sort(items.begin(), items.end(), [](const EvalItem& a, const EvalItem& b) { return a.name < b.name; });
    if (items.empty())
        throw RecordingError(input.string() + " is neither a recording nor a directory of recordings with traces");
    return items;
}

void check_trace(const GroundTruthTrace& t, const Recording& rec, const fs::path& trace_path) {
    if (t.frame_count != rec.size() || t.width != rec.width() || t.height != rec.height())
        throw ScriptError(trace_path.string() + " does not describe this recording (" + std::to_string(t.frame_count) +
                          " frames " + std::to_string(t.width) + "x" + std::to_string(t.height) + " vs " +
                          std::to_string(rec.size()) + " frames " + std::to_string(rec.width()) + "x" +
                          std::to_string(rec.height()) + ")");
}

int cmd_caption(const std::string& input, const std::string& out, const std::string& config, bool dump_signal,
                int jobs) {
    refuse_inside(out, input);
    const auto cfg = resolve_config(config);
    const Recording rec = load_recording(input);
    auto adapters = make_adapters(cfg, jobs);
    const auto result = run_pipeline(rec, cfg, adapters);
    write_outputs(out, result, rec, cfg, dump_signal);
    std::cout << result.steps.size() << " steps written to " << out << "\n";
    return kExitOk;
}

int cmd_gen(const std::string& script_path, int random_count, int batch_count, double noise, std::uint64_t seed,
            const std::string& out) {
    const int modes = !script_path.empty() + (random_count > 0) + (batch_count > 0);
    if (modes != 1) throw UsageError("gen needs exactly one of --script, --random or --batch");
    auto emit = [](const fs::path& dir, const SessionScript& s, std::uint64_t sd) {
        const auto session = generate_recording(s, sd);
        write_session(dir, session, s);
        return session.trace.frame_count;
    };
    if (!script_path.empty()) {
        auto script = load_script(script_path);
        if (noise > 0) script.noise_sigma = noise;
        const int n = emit(out, script, seed);
        std::cout << n << " frames written to " << out << "\n";
        return kExitOk;
    }
    std::vector<SessionScript> scripts;
    if (batch_count > 0) {
        scripts = standard_batch(noise, batch_count);
    } else {
        RandomScriptOptions o;
        o.noise_sigma = noise;
        for (int i = 0; i < random_count; ++i) scripts.push_back(random_script(seed + static_cast<std::uint64_t>(i), o));
    }
    for (std::size_t i = 0; i < scripts.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "rec_%03zu", i);
        emit(fs::path(out) / name, scripts[i], seed + i);
    }
    std::cout << scripts.size() << " recordings written to " << out << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& input, const std::string& trace, const std::string& out, const std::string& config,
             bool json_only, int jobs) {
    if (!out.empty()) refuse_inside(out, input);
    const auto cfg = resolve_config(config);
    EvalReport report;
    report.config = cfg.eval;
    for (const auto& item : eval_items(input, trace)) {
        const Recording rec = load_recording(item.recording);
        const auto truth = load_trace(item.trace);
        check_trace(truth, rec, item.trace);
        auto adapters = make_adapters(cfg, jobs);
        const auto result = run_pipeline(rec, cfg, adapters);
        if (!out.empty()) write_outputs(fs::path(out) / item.name, result, rec, cfg);
        const auto tally = evaluate(result.predictions(), truth, cfg.eval);
        report.recordings.emplace_back(item.name, tally);
        report.total.add(tally);
    }
    const auto j = eval_report_json(report);
    if (!out.empty()) write_text_file(fs::path(out) / "eval.json", j.dump(2) + "\n");
    if (json_only) std::cout << j.dump(2) << "\n";
    else std::cout << eval_report_table(report);
    return kExitOk;
}

int cmd_dump_signal(const std::string& input, const std::string& out, const std::string& config) {
    const auto cfg = resolve_config(config);
    const Recording rec = load_recording(input);
    if (rec.size() < 2) throw RecordingError("need at least two frames for a similarity signal");
    const int factor =
        cfg.segmentation.downsample_factor > 0 ? cfg.segmentation.downsample_factor : auto_downsample_factor(rec.width());
    const auto csv = signal_csv(compute_signal(rec, factor, cfg.segmentation.ssim));
    if (out.empty() || out == "-") std::cout << csv;
    else write_text_file(out, csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recap: captions for GUI screen recordings"};
    app.require_subcommand(1);

    std::string input, out, config, trace, script;
    bool dump_signal = false, json_only = false;
    int jobs = 0, random_count = 0, batch_count = 0;
    double noise = 0;
    std::uint64_t seed = 1;

    auto* caption = app.add_subcommand("caption", "Segment and caption a recording");
    caption->add_option("--input", input, "Recording directory (manifest.json + frames)")->required();
    caption->add_option("--out", out, "Output directory")->required();
    caption->add_option("--config", config, "Config JSON (default: $RECAP_CONFIG, then built-in defaults)");
    caption->add_flag("--dump-signal", dump_signal, "Also write signal.csv");
    caption->add_option("--jobs", jobs, "Upper bound on concurrent external adapter processes")->check(CLI::NonNegativeNumber);

    auto* gen = app.add_subcommand("gen", "Render synthetic recordings with ground truth");
    gen->add_option("--script", script, "Session script JSON");
    gen->add_option("--random", random_count, "Number of random scripts")->check(CLI::NonNegativeNumber);
    gen->add_option("--batch", batch_count, "Size of the standard evaluation batch")->check(CLI::NonNegativeNumber);
    gen->add_option("--noise", noise, "Gaussian luminance noise sigma")->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", seed, "Seed for noise and random scripts");
    gen->add_option("--out", out, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Caption recordings and score them against their traces");
    eval->add_option("--input", input, "Recording directory, or a directory of recordings")->required();
    eval->add_option("--trace", trace, "Ground-truth trace (default: <input>/trace.json)");
    eval->add_option("--out", out, "Directory for per-recording outputs and eval.json");
    eval->add_option("--config", config, "Config JSON");
    eval->add_flag("--json", json_only, "Print the machine-readable report only");
    eval->add_option("--jobs", jobs, "Upper bound on concurrent external adapter processes")->check(CLI::NonNegativeNumber);

    auto* dump = app.add_subcommand("dump-signal", "Write the frame similarity signal as CSV");
    dump->add_option("--input", input, "Recording directory")->required();
    dump->add_option("--out", out, "CSV path (default: stdout)");
    dump->add_option("--config", config, "Config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*caption) return cmd_caption(input, out, config, dump_signal, jobs);
        if (*gen) return cmd_gen(script, random_count, batch_count, noise, seed, out);
        if (*eval) return cmd_eval(input, trace, out, config, json_only, jobs);
        if (*dump) return cmd_dump_signal(input, out, config);
    } catch (const UsageError& e) {
        std::cerr << "recap: " << e.what() << "\n";
        return kExitUsage;
    } catch (const AdapterError& e) {
        std::cerr << "recap: adapter '" << e.adapter() << "' " << to_string(e.kind()) << ": " << e.what() << "\n";
        return kExitAdapter;
    } catch (const RecordingError& e) {
        std::cerr << "recap: recording error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ScriptError& e) {
        std::cerr << "recap: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "recap: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "recap: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
