// Copyright (C) 2026 The recap authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/adapters.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace recap {

const char* to_string(AdapterError::Kind kind) {
    switch (kind) {
        case AdapterError::Kind::Unavailable: return "AdapterUnavailable";
        case AdapterError::Kind::Timeout: return "AdapterTimeout";
        case AdapterError::Kind::MalformedOutput: return "AdapterMalformedOutput";
        case AdapterError::Kind::Failed: return "AdapterFailed";
    }
    return "AdapterError";
}

namespace {

[[noreturn]] void malformed(const std::string& adapter, const std::string& what) {
    throw AdapterError(AdapterError::Kind::MalformedOutput, adapter, what);
}

Box box_from_json(const json& j, const std::string& adapter) {
    if (!j.is_array() || j.size() != 4) malformed(adapter, "box must be [x, y, w, h]");
    Box b;
    try {
        b = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
    } catch (const json::exception&) {
        malformed(adapter, "box entries must be integers");
    }
    if (b.w < 0 || b.h < 0) malformed(adapter, "box has negative extent");
    return b;
}

json box_to_json(const Box& b) { return json::array({b.x, b.y, b.w, b.h}); }

double confidence_from_json(const json& obj, const char* key, const std::string& adapter) {
    if (!obj.contains(key)) return 0.0;
    if (!obj[key].is_number()) malformed(adapter, std::string(key) + " must be a number");
    const double c = obj[key].get<double>();
    if (c < 0 || c > 1) malformed(adapter, std::string(key) + " outside [0,1]");
    return c;
}

// Accepts either a bare array or {"schema":"1", <key>: [...]}.
const json& unwrap_list(const json& j, const char* key, const std::string& adapter) {
    if (j.is_array()) return j;
    if (!j.is_object()) malformed(adapter, "expected an object or array");
    if (j.contains("schema") && j["schema"] != kAdapterSchema)
        malformed(adapter, "unsupported schema " + j["schema"].dump());
    if (!j.contains(key) || !j[key].is_array()) malformed(adapter, std::string("missing array '") + key + "'");
    return j[key];
}

std::optional<json> read_json_file(const fs::path& path, const std::string& adapter) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        malformed(adapter, path.string() + ": " + e.what());
    }
}

}  // namespace

nlohmann::ordered_json ocr_to_json(const std::vector<OcrItem>& items) {
    nlohmann::ordered_json out;
    out["schema"] = kAdapterSchema;
    out["items"] = nlohmann::ordered_json::array();
    for (const auto& it : items) {
        nlohmann::ordered_json o;
        o["text"] = it.text;
        o["box"] = {it.box.x, it.box.y, it.box.w, it.box.h};
        o["confidence"] = it.confidence;
        out["items"].push_back(std::move(o));
    }
    return out;
}

std::vector<OcrItem> ocr_from_json(const json& j, const std::string& adapter) {
    std::vector<OcrItem> items;
    for (const auto& o : unwrap_list(j, "items", adapter)) {
        if (!o.is_object() || !o.contains("text") || !o["text"].is_string())
            malformed(adapter, "OCR item needs a string 'text'");
        if (!o.contains("box")) malformed(adapter, "OCR item needs 'box'");
        items.push_back({o["text"].get<std::string>(), box_from_json(o["box"], adapter),
                         confidence_from_json(o, "confidence", adapter)});
    }
    return items;
}

nlohmann::ordered_json elements_to_json(const std::vector<FrameAnnotations::Element>& elements) {
    nlohmann::ordered_json out;
    out["schema"] = kAdapterSchema;
    out["elements"] = nlohmann::ordered_json::array();
    for (const auto& e : elements) {
        nlohmann::ordered_json o;
        o["class"] = std::string(class_name(e.klass));
        o["box"] = {e.box.x, e.box.y, e.box.w, e.box.h};
        if (e.text) {
            o["text"] = *e.text;
            o["text_confid"] = e.text_confid;
        }
        if (e.caption) {
            o["caption"] = *e.caption;
            o["caption_confid"] = e.caption_confid;
        }
        out["elements"].push_back(std::move(o));
    }
    return out;
}

std::vector<FrameAnnotations::Element> elements_from_json(const json& j, const std::string& adapter) {
    std::vector<FrameAnnotations::Element> out;
    for (const auto& o : unwrap_list(j, "elements", adapter)) {
        if (!o.is_object() || !o.contains("class") || !o["class"].is_string())
            malformed(adapter, "element needs a string 'class'");
        const auto name = o["class"].get<std::string>();
        const auto klass = parse_element_class(name);
        if (!klass) malformed(adapter, "unknown element class '" + name + "'");
        FrameAnnotations::Element e;
        e.klass = *klass;
        if (!o.contains("box")) malformed(adapter, "element needs 'box'");
        e.box = box_from_json(o["box"], adapter);
        if (o.contains("text") && o["text"].is_string()) e.text = o["text"].get<std::string>();
        e.text_confid = confidence_from_json(o, "text_confid", adapter);
        if (o.contains("caption") && o["caption"].is_string()) e.caption = o["caption"].get<std::string>();
        e.caption_confid = confidence_from_json(o, "caption_confid", adapter);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<OcrItem> reading_order(std::vector<OcrItem> items) {
    if (items.size() < 2) return items;
    std::vector<int> heights;
    for (const auto& it : items) heights.push_back(it.box.h);
    std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
    const double band = 0.5 * heights[heights.size() / 2];

    std::stable_sort(items.begin(), items.end(), [](const OcrItem& a, const OcrItem& b) {
        return a.box.y != b.box.y ? a.box.y < b.box.y : a.box.x < b.box.x;
    });
    std::vector<OcrItem> out;
    out.reserve(items.size());
    std::size_t i = 0;
    while (i < items.size()) {
        const int top = items[i].box.y;
        std::size_t j = i;
        while (j < items.size() && items[j].box.y - top <= band) ++j;
        std::stable_sort(items.begin() + static_cast<long>(i), items.begin() + static_cast<long>(j),
                         [](const OcrItem& a, const OcrItem& b) { return a.box.x < b.box.x; });
        for (std::size_t k = i; k < j; ++k) out.push_back(std::move(items[k]));
        i = j;
    }
    return out;
}

fs::path fixture_path(const fs::path& frame_path, const std::string& kind) {
    return frame_path.parent_path() / (frame_path.stem().string() + "." + kind + ".json");
}

std::vector<OcrItem> FixtureStore::ocr(const Frame& frame) const {
    if (!frame.source.empty()) {
        const auto j = read_json_file(fixture_path(frame.source, "ocr"), "ocr");
        return j ? ocr_from_json(*j, "ocr") : std::vector<OcrItem>{};
    }
    if (table_ && frame.index < static_cast<int>(table_->size())) return (*table_)[frame.index].ocr;
    return {};
}

std::vector<FrameAnnotations::Element> FixtureStore::elements(const Frame& frame) const {
    if (!frame.source.empty()) {
        const auto j = read_json_file(fixture_path(frame.source, "elements"), "element-detector");
        return j ? elements_from_json(*j, "element-detector") : std::vector<FrameAnnotations::Element>{};
    }
    if (table_ && frame.index < static_cast<int>(table_->size())) return (*table_)[frame.index].elements;
    return {};
}

std::vector<DetectedElement> FixtureDetector::detect(const Frame& frame) {
    std::vector<DetectedElement> out;
    for (const auto& e : store_.elements(frame)) out.push_back({e.klass, e.box, 1.0});
    return out;
}

std::optional<IconCaption> FixtureCaptioner::caption(const Frame& frame, const Box& crop) {
    std::optional<IconCaption> best;
    long best_overlap = 0;
    for (const auto& e : store_.elements(frame)) {
        if (!e.caption) continue;
        const int x0 = std::max(e.box.x, crop.x), y0 = std::max(e.box.y, crop.y);
        const int x1 = std::min(e.box.right(), crop.right()), y1 = std::min(e.box.bottom(), crop.bottom());
        const long overlap = x1 > x0 && y1 > y0 ? static_cast<long>(x1 - x0) * (y1 - y0) : 0;
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = IconCaption{*e.caption, e.caption_confid};
        }
    }
    return best;
}

// --- subprocess ---------------------------------------------------------------

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

namespace {

bool executable_exists(const std::string& name) {
    if (name.find('/') != std::string::npos) return ::access(name.c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    if (!path) return false;
    std::istringstream dirs(path);
    for (std::string dir; std::getline(dirs, dir, ':');) {
        if (dir.empty()) dir = ".";
        if (::access((dir + "/" + name).c_str(), X_OK) == 0) return true;
    }
    return false;
}

struct Fd {
    int fd = -1;
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
};

}  // namespace

CommandChannel::CommandChannel(CommandSpec spec)
    : spec_(std::move(spec)), slots_(std::clamp(spec_.max_parallel, 1, 256)) {
    ::signal(SIGPIPE, SIG_IGN);
}

void CommandChannel::check_available() const {
    if (spec_.argv.empty() || !executable_exists(spec_.argv.front()))
        throw AdapterError(AdapterError::Kind::Unavailable, spec_.name,
                           "command not found: " + (spec_.argv.empty() ? std::string("<empty>") : spec_.argv.front()));
}

json CommandChannel::call(const json& request) {
    check_available();
    slots_.acquire();
    struct Release {
        std::counting_semaphore<256>& s;
        ~Release() { s.release(); }
    } release{slots_};

    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0) throw AdapterError(AdapterError::Kind::Failed, spec_.name, "pipe failed");
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw AdapterError(AdapterError::Kind::Failed, spec_.name, "pipe failed");
    }
    Fd child_in{in_pipe[1]}, child_out{out_pipe[0]};

    std::vector<char*> argv;
    for (auto& a : spec_.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        throw AdapterError(AdapterError::Kind::Failed, spec_.name, "fork failed");
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);

    const std::string line = request.dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(child_in.fd, line.data() + written, line.size() - written);
        if (n <= 0) break;  // child closed stdin; its reply (or lack of one) decides
        written += static_cast<std::size_t>(n);
    }
    child_in.reset();

    const auto deadline = std::chrono::steady_clock::now() + spec_.timeout;
    std::string reply;
    bool timed_out = false;
    char buf[4096];
    while (reply.find('\n') == std::string::npos) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd p{child_out.fd, POLLIN, 0};
        const int r = ::poll(&p, 1, static_cast<int>(left.count()));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) {
            timed_out = r == 0;
            break;
        }
        const ssize_t n = ::read(child_out.fd, buf, sizeof buf);
        if (n <= 0) break;
        reply.append(buf, static_cast<std::size_t>(n));
    }
    child_out.reset();
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);

    if (timed_out)
        throw AdapterError(AdapterError::Kind::Timeout, spec_.name,
                           "no reply within " + std::to_string(spec_.timeout.count()) + " ms");
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && reply.empty())
        throw AdapterError(AdapterError::Kind::Unavailable, spec_.name, "could not execute " + spec_.argv.front());
    const auto eol = reply.find('\n');
    if (eol == std::string::npos) malformed(spec_.name, "no reply line");
    json out;
    try {
        out = json::parse(reply.substr(0, eol));
    } catch (const json::exception& e) {
        malformed(spec_.name, std::string("reply is not JSON: ") + e.what());
    }
    if (!out.is_object()) malformed(spec_.name, "reply must be a JSON object");
    if (out.contains("schema") && out["schema"] != kAdapterSchema)
        malformed(spec_.name, "unsupported schema " + out["schema"].dump());
    if (out.contains("error"))
        throw AdapterError(AdapterError::Kind::Failed, spec_.name, out["error"].dump());
    return out;
}

namespace {

std::string require_path(const Frame& frame, const std::string& adapter) {
    if (frame.source.empty())
        throw AdapterError(AdapterError::Kind::Failed, adapter, "frame has no file on disk");
    return frame.source.string();
}

json request(const char* op) {
    json r;
    r["schema"] = kAdapterSchema;
    r["op"] = op;
    return r;
}

}  // namespace

std::vector<OcrItem> CommandOcr::recognize(const Frame& frame) {
    auto req = request("ocr");
    req["frame_path"] = require_path(frame, ch_->spec().name);
    return ocr_from_json(ch_->call(req), ch_->spec().name);
}

std::vector<DetectedElement> CommandDetector::detect(const Frame& frame) {
    auto req = request("detect_elements");
    req["frame_path"] = require_path(frame, ch_->spec().name);
    const auto reply = ch_->call(req);
    std::vector<DetectedElement> out;
    for (const auto& o : unwrap_list(reply, "elements", ch_->spec().name)) {
        if (!o.is_object() || !o.contains("class") || !o["class"].is_string())
            malformed(ch_->spec().name, "element needs a string 'class'");
        const auto name = o["class"].get<std::string>();
        const auto klass = parse_element_class(name);
        if (!klass) malformed(ch_->spec().name, "unknown element class '" + name + "'");
        if (!o.contains("box")) malformed(ch_->spec().name, "element needs 'box'");
        out.push_back({*klass, box_from_json(o["box"], ch_->spec().name),
                       o.contains("confidence") ? confidence_from_json(o, "confidence", ch_->spec().name) : 1.0});
    }
    return out;
}

std::optional<IconCaption> CommandCaptioner::caption(const Frame& frame, const Box& crop) {
    auto req = request("caption_icon");
    req["frame_path"] = require_path(frame, ch_->spec().name);
    req["crop_box"] = box_to_json(crop);
    const auto reply = ch_->call(req);
    if (!reply.contains("caption") || reply["caption"].is_null()) return std::nullopt;
    if (!reply["caption"].is_string()) malformed(ch_->spec().name, "caption must be a string");
    return IconCaption{reply["caption"].get<std::string>(), confidence_from_json(reply, "confidence", ch_->spec().name)};
}

std::optional<TapPoint> CommandTapLocalizer::locate(const Recording& rec, std::span<const int> sample) {
    auto req = request("locate_tap");
    req["frame_paths"] = json::array();
    for (int i : sample) req["frame_paths"].push_back(require_path(rec.frame(i), ch_->spec().name));
    const auto reply = ch_->call(req);
    if (reply.value("found", true) == false) return std::nullopt;
    if (!reply.contains("x") || !reply.contains("y") || !reply["x"].is_number() || !reply["y"].is_number())
        malformed(ch_->spec().name, "reply needs numeric x and y");
    const double x = reply["x"].get<double>(), y = reply["y"].get<double>();
    if (x < 0 || x > 1 || y < 0 || y > 1) malformed(ch_->spec().name, "tap point outside [0,1]");
    return TapPoint{x, y};
}

}  // namespace recap
