// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvtal/domain.hpp"

namespace mvtal {

enum class Fallback {
    kNone,        // classes without candidates are simply absent
    kArgmaxPeak,  // emit a 1 s segment centered on the per-class signal peak
};

// Everything the election pipeline needs besides the tensor itself.
// Weight rows are convex (sum to 1); loading normalizes them when needed.
// All second rounding downstream is half away from zero; that rule is
// fixed, not configurable.
struct ElectionConfig {
    TimeBase tb{30.0};
    int num_classes = 1;
    int num_views = 1;
    std::vector<double> weights;     // K*M, row-major (class, view)
    std::vector<double> thresholds;  // K values, each strictly in (0,1)
    double merge_gap_s = 0.5;
    Fallback fallback = Fallback::kArgmaxPeak;

    double weight(int c, int m) const {
        return weights[static_cast<size_t>(c) * num_views + m];
    }
    double& weight(int c, int m) {
        return weights[static_cast<size_t>(c) * num_views + m];
    }

    // Uniform-weight, uniform-threshold config for K classes over M views.
    static ElectionConfig uniform(int num_classes, int num_views, double fps = 30.0,
                                  double threshold = 0.5, double merge_gap_s = 0.5);

    // Normalizes each weight row to sum 1 and checks every invariant.
    // Rows already within 1e-9 of unit sum are left untouched so a load
    // of previously normalized weights is bit-exact.
    void normalize_and_check();
};

// Frame range of one annotated training clip.
struct ClipSample {
    std::string video_id;
    int class_id = 0;
    long long start_frame = 0;
    long long end_frame = 0;

    friend bool operator==(const ClipSample& a, const ClipSample& b) {
        return a.video_id == b.video_id && a.class_id == b.class_id &&
               a.start_frame == b.start_frame && a.end_frame == b.end_frame;
    }
};

// Canonical float text: shortest representation that parses back to the
// same double ("0.5", "1", "0.0625").
std::string format_double(double v);

// Fixed-point text with the given number of decimals, locale independent.
std::string format_fixed(double v, int decimals);

// Tensor CSV: header `frame,view,p0,...,p{K-1}`, one row per (frame, view),
// frames ascending, views 0..M-1 ascending within a frame, LF endings.
ProbabilityTensor read_tensor_csv(const std::string& path, int expected_num_classes,
                                  int expected_num_views);
void write_tensor_csv(const ProbabilityTensor& tensor, const std::string& path);
std::string tensor_csv_string(const ProbabilityTensor& tensor);

// Segments CSV: header `video_id,class_id,start_s,end_s`. Reading groups
// rows by video_id (order of first appearance, file order within a group);
// writing sorts rows by (video_id, start_s, class_id).
std::vector<SegmentSet> read_segments_csv(const std::string& path,
                                          const LabelSet* labels = nullptr);
void write_segments_csv(const std::vector<SegmentSet>& sets, const std::string& path);
std::string segments_csv_string(const std::vector<SegmentSet>& sets);

// Config JSON with keys num_classes, num_views and optional fps, weights,
// thresholds (array or single number broadcast), merge_gap_s, fallback.
ElectionConfig read_config(const std::string& path);
ElectionConfig parse_config_json(const std::string& text, const std::string& origin);
void write_config(const ElectionConfig& config, const std::string& path);
std::string config_json_string(const ElectionConfig& config);

// One clip per annotated segment, frames [round(start*fps), round(end*fps)-1].
// Unannotated regions produce nothing. Segments must lie within [0, T/fps].
std::vector<ClipSample> extract_clips(const SegmentSet& annotations, const TimeBase& tb,
                                      long long num_frames);

}  // namespace mvtal
