// SPDX-License-Identifier: Apache-2.0
#include "mvtal/io_formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mvtal {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(path + ": write failed");
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    size_t pos = 0;
    for (;;) {
        size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

[[noreturn]] void fail_format(const std::string& path, size_t line_no, const std::string& what) {
    throw FormatError(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double_field(const std::string& field, const std::string& path, size_t line_no,
                          const char* what) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail_format(path, line_no, std::string(what) + ": not a finite number: '" + field + "'");
    return v;
}

long long parse_int_field(const std::string& field, const std::string& path, size_t line_no,
                          const char* what) {
    long long v = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        fail_format(path, line_no, std::string(what) + ": not an integer: '" + field + "'");
    return v;
}

// Splits file content into lines; requires LF endings, tolerates a missing
// final newline.
std::vector<std::string> split_lines(const std::string& content) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos < content.size()) {
        size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(content.substr(pos));
            break;
        }
        lines.push_back(content.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return std::string(buf, ptr);
}

ElectionConfig ElectionConfig::uniform(int num_classes, int num_views, double fps,
                                       double threshold, double merge_gap_s) {
    ElectionConfig cfg;
    cfg.tb = TimeBase(fps);
    cfg.num_classes = num_classes;
    cfg.num_views = num_views;
    cfg.weights.assign(static_cast<size_t>(num_classes) * num_views, 1.0 / num_views);
    cfg.thresholds.assign(static_cast<size_t>(num_classes), threshold);
    cfg.merge_gap_s = merge_gap_s;
    cfg.normalize_and_check();
    return cfg;
}

void ElectionConfig::normalize_and_check() {
    if (num_classes < 1) throw ConfigError("num_classes: must be >= 1");
    if (num_views < 1) throw ConfigError("num_views: must be >= 1");
    if (weights.size() != static_cast<size_t>(num_classes) * num_views)
        throw ConfigError("weights: expected a " + std::to_string(num_classes) + "x" +
                          std::to_string(num_views) + " matrix");
    if (thresholds.size() != static_cast<size_t>(num_classes))
        throw ConfigError("thresholds: expected " + std::to_string(num_classes) + " values");
    if (!(merge_gap_s >= 0.0) || !std::isfinite(merge_gap_s))
        throw ConfigError("merge_gap_s: must be >= 0");

    for (int c = 0; c < num_classes; ++c) {
        double sum = 0.0;
        for (int m = 0; m < num_views; ++m) {
            double w = weight(c, m);
            if (!std::isfinite(w) || w < 0.0)
                throw ConfigError("weights[" + std::to_string(c) + "][" + std::to_string(m) +
                                  "]: must be a non-negative number");
            sum += w;
        }
        if (sum <= 0.0)
            throw ConfigError("weights[" + std::to_string(c) + "]: row sums to zero");
        if (std::abs(sum - 1.0) > 1e-9) {
            for (int m = 0; m < num_views; ++m) weight(c, m) /= sum;
        }
    }
    for (int c = 0; c < num_classes; ++c) {
        double t = thresholds[static_cast<size_t>(c)];
        if (!std::isfinite(t) || !(t > 0.0) || !(t < 1.0))
            throw ConfigError("thresholds[" + std::to_string(c) + "]: must lie strictly in (0,1)");
    }
}

// ---------------------------------------------------------------------------
// Tensor CSV

std::string tensor_csv_string(const ProbabilityTensor& tensor) {
    std::string out = "frame,view";
    for (int c = 0; c < tensor.num_classes(); ++c) {
        out += ",p";
        out += std::to_string(c);
    }
    out += '\n';
    for (int t = 0; t < tensor.num_frames(); ++t) {
        for (int m = 0; m < tensor.num_views(); ++m) {
            out += std::to_string(t);
            out += ',';
            out += std::to_string(m);
            for (int c = 0; c < tensor.num_classes(); ++c) {
                out += ',';
                out += format_double(tensor.at(t, c, m));
            }
            out += '\n';
        }
    }
    return out;
}

void write_tensor_csv(const ProbabilityTensor& tensor, const std::string& path) {
    tensor.validate();
    write_file(path, tensor_csv_string(tensor));
}

ProbabilityTensor read_tensor_csv(const std::string& path, int expected_num_classes,
                                  int expected_num_views) {
    if (expected_num_classes < 1 || expected_num_views < 1)
        throw ShapeError("read_tensor_csv: expected dimensions must be >= 1");
    const std::string content = read_file(path);
    const std::vector<std::string> lines = split_lines(content);
    if (lines.empty()) fail_format(path, 1, "empty file, expected tensor header");

    std::string expected_header = "frame,view";
    for (int c = 0; c < expected_num_classes; ++c)
        expected_header += ",p" + std::to_string(c);
    if (lines[0] != expected_header)
        fail_format(path, 1, "bad header, expected '" + expected_header + "'");

    const size_t num_rows = lines.size() - 1;
    if (num_rows == 0) fail_format(path, 2, "tensor has no rows");
    if (num_rows % static_cast<size_t>(expected_num_views) != 0)
        fail_format(path, lines.size(),
                    "row count " + std::to_string(num_rows) + " is not a multiple of num_views " +
                        std::to_string(expected_num_views));

    const int num_frames = static_cast<int>(num_rows / expected_num_views);
    ProbabilityTensor tensor(num_frames, expected_num_classes, expected_num_views);

    for (size_t i = 0; i < num_rows; ++i) {
        const size_t line_no = i + 2;
        const auto fields = split_fields(lines[i + 1]);
        if (fields.size() != static_cast<size_t>(2 + expected_num_classes))
            fail_format(path, line_no,
                        "expected " + std::to_string(2 + expected_num_classes) + " fields, found " +
                            std::to_string(fields.size()));
        const long long expected_frame = static_cast<long long>(i) / expected_num_views;
        const long long expected_view = static_cast<long long>(i) % expected_num_views;
        const long long frame = parse_int_field(fields[0], path, line_no, "frame");
        const long long view = parse_int_field(fields[1], path, line_no, "view");
        if (frame != expected_frame || view != expected_view)
            fail_format(path, line_no,
                        "expected row (frame " + std::to_string(expected_frame) + ", view " +
                            std::to_string(expected_view) + "), found (frame " +
                            std::to_string(frame) + ", view " + std::to_string(view) + ")");
        for (int c = 0; c < expected_num_classes; ++c) {
            double v = parse_double_field(fields[static_cast<size_t>(2 + c)], path, line_no, "probability");
            if (v < 0.0 || v > 1.0)
                fail_format(path, line_no,
                            "probability " + format_double(v) + " outside [0, 1]");
            tensor.at(static_cast<int>(frame), c, static_cast<int>(view)) = v;
        }
    }
    return tensor;
}

// ---------------------------------------------------------------------------
// Segments CSV

std::string segments_csv_string(const std::vector<SegmentSet>& sets) {
    struct Row {
        std::string video_id;
        ActionSegment seg;
    };
    std::vector<Row> rows;
    for (const auto& set : sets)
        for (const auto& seg : set.segments) rows.push_back({set.video_id, seg});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.video_id != b.video_id) return a.video_id < b.video_id;
        if (a.seg.start_s != b.seg.start_s) return a.seg.start_s < b.seg.start_s;
        return a.seg.class_id < b.seg.class_id;
    });

    std::string out = "video_id,class_id,start_s,end_s\n";
    for (const auto& row : rows) {
        out += row.video_id;
        out += ',';
        out += std::to_string(row.seg.class_id);
        out += ',';
        out += format_double(row.seg.start_s);
        out += ',';
        out += format_double(row.seg.end_s);
        out += '\n';
    }
    return out;
}

void write_segments_csv(const std::vector<SegmentSet>& sets, const std::string& path) {
    for (const auto& set : sets) {
        if (set.video_id.find(',') != std::string::npos ||
            set.video_id.find('\n') != std::string::npos)
            throw FormatError("write_segments_csv: video_id '" + set.video_id +
                              "' contains a delimiter");
    }
    write_file(path, segments_csv_string(sets));
}

std::vector<SegmentSet> read_segments_csv(const std::string& path, const LabelSet* labels) {
    const std::string content = read_file(path);
    const std::vector<std::string> lines = split_lines(content);
    if (lines.empty()) fail_format(path, 1, "empty file, expected segments header");
    if (lines[0] != "video_id,class_id,start_s,end_s")
        fail_format(path, 1, "bad header, expected 'video_id,class_id,start_s,end_s'");

    std::vector<SegmentSet> sets;
    std::map<std::string, size_t> index_of;
    for (size_t i = 1; i < lines.size(); ++i) {
        const size_t line_no = i + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 4)
            fail_format(path, line_no, "expected 4 fields, found " + std::to_string(fields.size()));
        const std::string& video_id = fields[0];
        if (video_id.empty()) fail_format(path, line_no, "empty video_id");
        const long long class_id = parse_int_field(fields[1], path, line_no, "class_id");
        const double start_s = parse_double_field(fields[2], path, line_no, "start_s");
        const double end_s = parse_double_field(fields[3], path, line_no, "end_s");
        if (class_id < 0) fail_format(path, line_no, "class_id must be >= 0");
        if (labels && !labels->contains(static_cast<int>(class_id)))
            fail_format(path, line_no, "unknown class_id " + std::to_string(class_id));
        if (start_s < 0.0) fail_format(path, line_no, "start_s must be >= 0");
        if (!(start_s < end_s)) fail_format(path, line_no, "start_s must be < end_s");

        auto it = index_of.find(video_id);
        if (it == index_of.end()) {
            index_of.emplace(video_id, sets.size());
            sets.push_back({video_id, {}});
            it = index_of.find(video_id);
        }
        sets[it->second].segments.emplace_back(static_cast<int>(class_id), start_s, end_s);
    }
    return sets;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

const char* fallback_name(Fallback f) {
    return f == Fallback::kNone ? "none" : "argmax_peak";
}

}  // namespace

std::string config_json_string(const ElectionConfig& config) {
    nlohmann::json j;
    j["num_classes"] = config.num_classes;
    j["num_views"] = config.num_views;
    j["fps"] = config.tb.fps;
    nlohmann::json weights = nlohmann::json::array();
    for (int c = 0; c < config.num_classes; ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (int m = 0; m < config.num_views; ++m) row.push_back(config.weight(c, m));
        weights.push_back(std::move(row));
    }
    j["weights"] = std::move(weights);
    j["thresholds"] = config.thresholds;
    j["merge_gap_s"] = config.merge_gap_s;
    j["fallback"] = fallback_name(config.fallback);
    return j.dump(2) + "\n";
}

void write_config(const ElectionConfig& config, const std::string& path) {
    write_file(path, config_json_string(config));
}

ElectionConfig parse_config_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": top-level value must be an object");

    auto require_int = [&](const char* key) -> int {
        if (!j.contains(key)) throw ConfigError(std::string(key) + ": missing required key");
        if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + ": must be an integer");
        return j[key].get<int>();
    };

    ElectionConfig cfg;
    cfg.num_classes = require_int("num_classes");
    cfg.num_views = require_int("num_views");
    if (cfg.num_classes < 1) throw ConfigError("num_classes: must be >= 1");
    if (cfg.num_views < 1) throw ConfigError("num_views: must be >= 1");

    double fps = 30.0;
    if (j.contains("fps")) {
        if (!j["fps"].is_number()) throw ConfigError("fps: must be a number");
        fps = j["fps"].get<double>();
    }
    try {
        cfg.tb = TimeBase(fps);
    } catch (const RangeError&) {
        throw ConfigError("fps: must be > 0");
    }

    cfg.weights.assign(static_cast<size_t>(cfg.num_classes) * cfg.num_views, 1.0 / cfg.num_views);
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (!w.is_array() || w.size() != static_cast<size_t>(cfg.num_classes))
            throw ConfigError("weights: must be an array of num_classes rows");
        for (int c = 0; c < cfg.num_classes; ++c) {
            const auto& row = w[static_cast<size_t>(c)];
            if (!row.is_array() || row.size() != static_cast<size_t>(cfg.num_views))
                throw ConfigError("weights[" + std::to_string(c) +
                                  "]: must be an array of num_views numbers");
            for (int m = 0; m < cfg.num_views; ++m) {
                const auto& cell = row[static_cast<size_t>(m)];
                if (!cell.is_number())
                    throw ConfigError("weights[" + std::to_string(c) + "][" + std::to_string(m) +
                                      "]: must be a number");
                cfg.weight(c, m) = cell.get<double>();
            }
        }
    }

    cfg.thresholds.assign(static_cast<size_t>(cfg.num_classes), 0.5);
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        if (t.is_number()) {
            cfg.thresholds.assign(static_cast<size_t>(cfg.num_classes), t.get<double>());
        } else if (t.is_array()) {
            if (t.size() != static_cast<size_t>(cfg.num_classes))
                throw ConfigError("thresholds: array must have num_classes entries");
            for (int c = 0; c < cfg.num_classes; ++c) {
                const auto& cell = t[static_cast<size_t>(c)];
                if (!cell.is_number())
                    throw ConfigError("thresholds[" + std::to_string(c) + "]: must be a number");
                cfg.thresholds[static_cast<size_t>(c)] = cell.get<double>();
            }
        } else {
            throw ConfigError("thresholds: must be a number or an array of numbers");
        }
    }

    if (j.contains("merge_gap_s")) {
        if (!j["merge_gap_s"].is_number()) throw ConfigError("merge_gap_s: must be a number");
        cfg.merge_gap_s = j["merge_gap_s"].get<double>();
    }

    if (j.contains("fallback")) {
        if (!j["fallback"].is_string()) throw ConfigError("fallback: must be a string");
        const std::string f = j["fallback"].get<std::string>();
        if (f == "none")
            cfg.fallback = Fallback::kNone;
        else if (f == "argmax_peak")
            cfg.fallback = Fallback::kArgmaxPeak;
        else
            throw ConfigError("fallback: must be 'none' or 'argmax_peak'");
    }

    cfg.normalize_and_check();
    return cfg;
}

ElectionConfig read_config(const std::string& path) {
    return parse_config_json(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Clip extraction

std::vector<ClipSample> extract_clips(const SegmentSet& annotations, const TimeBase& tb,
                                      long long num_frames) {
    if (num_frames < 1) throw RangeError("extract_clips: num_frames must be >= 1");
    const double video_end_s = static_cast<double>(num_frames) / tb.fps;
    std::vector<ClipSample> clips;
    clips.reserve(annotations.segments.size());
    for (const auto& seg : annotations.segments) {
        if (seg.start_s < 0.0 || seg.end_s > video_end_s)
            throw RangeError("extract_clips: segment [" + format_double(seg.start_s) + ", " +
                             format_double(seg.end_s) + ") lies outside the video extent [0, " +
                             format_double(video_end_s) + ")");
        long long start_frame = round_half_away(seg.start_s * tb.fps);
        long long end_frame = round_half_away(seg.end_s * tb.fps) - 1;
        // A segment shorter than one frame period still yields one sample.
        if (end_frame < start_frame) end_frame = start_frame;
        clips.push_back({annotations.video_id, seg.class_id, start_frame, end_frame});
    }
    return clips;
}

}  // namespace mvtal
