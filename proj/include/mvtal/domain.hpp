// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mvtal/errors.hpp"

namespace mvtal {

// Ordered label map. Class ids are 0..K-1, contiguous and unique.
struct LabelSet {
    struct Entry {
        int class_id;
        std::string name;
    };

    std::vector<Entry> labels;

    int size() const { return static_cast<int>(labels.size()); }

    bool contains(int class_id) const {
        return class_id >= 0 && class_id < size();
    }

    const std::string& name_of(int class_id) const {
        if (!contains(class_id)) throw RangeError("label set: unknown class_id " + std::to_string(class_id));
        return labels[static_cast<size_t>(class_id)].name;
    }

    // K generic classes named "class_0".."class_{K-1}".
    static LabelSet generic(int num_classes);

    // The 16 distracted-driving actions used by the naturalistic driving
    // action recognition task this toolkit targets.
    static LabelSet driver_actions();
};

// Frame clock of a video. fps > 0.
struct TimeBase {
    double fps = 30.0;

    explicit TimeBase(double fps_ = 30.0) : fps(fps_) {
        if (!(fps > 0.0) || !std::isfinite(fps))
            throw RangeError("TimeBase: fps must be a positive finite number");
    }
};

// One labeled temporal interval in seconds. start_s < end_s.
struct ActionSegment {
    int class_id = 0;
    double start_s = 0.0;
    double end_s = 0.0;

    ActionSegment() = default;
    ActionSegment(int class_id_, double start_s_, double end_s_)
        : class_id(class_id_), start_s(start_s_), end_s(end_s_) {
        if (!(start_s < end_s))
            throw RangeError("ActionSegment: start_s must be < end_s");
    }

    double duration() const { return end_s - start_s; }

    friend bool operator==(const ActionSegment& a, const ActionSegment& b) {
        return a.class_id == b.class_id && a.start_s == b.start_s && a.end_s == b.end_s;
    }
};

// All segments of one video, in load order.
struct SegmentSet {
    std::string video_id;
    std::vector<ActionSegment> segments;

    friend bool operator==(const SegmentSet& a, const SegmentSet& b) {
        return a.video_id == b.video_id && a.segments == b.segments;
    }
};

// Frame-level class scores per camera view, indexed (t, c, m).
// All values finite and within [0, 1].
class ProbabilityTensor {
public:
    ProbabilityTensor() = default;
    ProbabilityTensor(int num_frames, int num_classes, int num_views)
        : T_(num_frames), K_(num_classes), M_(num_views),
          values_(static_cast<size_t>(num_frames) * num_classes * num_views, 0.0) {
        if (T_ < 1 || K_ < 1 || M_ < 1)
            throw ShapeError("ProbabilityTensor: dimensions must be >= 1");
    }

    int num_frames() const { return T_; }
    int num_classes() const { return K_; }
    int num_views() const { return M_; }

    double at(int t, int c, int m) const { return values_[index(t, c, m)]; }
    double& at(int t, int c, int m) { return values_[index(t, c, m)]; }

    const std::vector<double>& values() const { return values_; }

    // Throws RangeError if any value is non-finite or outside [0, 1].
    void validate() const;

    friend bool operator==(const ProbabilityTensor& a, const ProbabilityTensor& b) {
        return a.T_ == b.T_ && a.K_ == b.K_ && a.M_ == b.M_ && a.values_ == b.values_;
    }

private:
    size_t index(int t, int c, int m) const {
        return (static_cast<size_t>(t) * K_ + c) * M_ + m;
    }

    int T_ = 0, K_ = 0, M_ = 0;
    std::vector<double> values_;
};

// Per-frame, per-class signal after view aggregation, indexed (t, c).
// Values finite and >= 0.
class AggregatedSignal {
public:
    AggregatedSignal() = default;
    AggregatedSignal(int num_frames, int num_classes)
        : T_(num_frames), K_(num_classes),
          values_(static_cast<size_t>(num_frames) * num_classes, 0.0) {
        if (T_ < 1 || K_ < 1)
            throw ShapeError("AggregatedSignal: dimensions must be >= 1");
    }

    int num_frames() const { return T_; }
    int num_classes() const { return K_; }

    double at(int t, int c) const { return values_[static_cast<size_t>(t) * K_ + c]; }
    double& at(int t, int c) { return values_[static_cast<size_t>(t) * K_ + c]; }

private:
    int T_ = 0, K_ = 0;
    std::vector<double> values_;
};

// A maximal super-threshold run of frames for one class.
// Frame bounds are inclusive; mean_score is the mean of the aggregated
// signal over [start_frame, end_frame] and is recomputed on merge.
struct Candidate {
    int class_id = 0;
    int start_frame = 0;
    int end_frame = 0;
    double mean_score = 0.0;

    int num_frames() const { return end_frame - start_frame + 1; }

    friend bool operator==(const Candidate& a, const Candidate& b) {
        return a.class_id == b.class_id && a.start_frame == b.start_frame &&
               a.end_frame == b.end_frame && a.mean_score == b.mean_score;
    }
};

// Rounds half away from zero, the one rounding rule used throughout.
inline long long round_half_away(double x) { return std::llround(x); }

// Frame index -> seconds, in double arithmetic. Frame times are exact
// multiples of 1/fps; this is the only frame->second bridge.
inline double frames_to_seconds(long long frame, const TimeBase& tb) {
    if (frame < 0) throw RangeError("frames_to_seconds: frame must be >= 0");
    return static_cast<double>(frame) / tb.fps;
}

struct IntervalOverlap {
    double intersection_s = 0.0;
    double union_s = 0.0;
};

// Intersection and union lengths of two intervals given as (start, end)
// seconds. Intersection clamps at zero for disjoint intervals; the union
// is the hull length, so intersection <= union always.
IntervalOverlap interval_overlap_seconds(double a_start, double a_end,
                                         double b_start, double b_end);

}  // namespace mvtal
