// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvtal/domain.hpp"

namespace mvtal {

// Sliding-window geometry: each inference window spans frames_per_clip *
// sample_rate frames and advances by a quarter span.
struct WindowSpec {
    int frames_per_clip = 16;  // S
    int sample_rate = 4;       // tau

    WindowSpec() = default;
    WindowSpec(int frames_per_clip_, int sample_rate_)
        : frames_per_clip(frames_per_clip_), sample_rate(sample_rate_) {
        if (frames_per_clip < 1 || sample_rate < 1)
            throw RangeError("WindowSpec: frames_per_clip and sample_rate must be >= 1");
        if ((frames_per_clip * sample_rate) % 4 != 0)
            throw RangeError("WindowSpec: span must be divisible by 4 for an integral stride");
    }

    int span() const { return frames_per_clip * sample_rate; }
    int stride() const { return span() / 4; }
};

// Stand-in for the clip-level recognition backbone: maps one (view, window)
// to a class-probability vector summing to 1 within 1e-6. Implementations
// must be deterministic for fixed inputs; short clips (window extending past
// the video end) are handled by the scorer through clamped frame sampling.
class ClipScorer {
public:
    virtual ~ClipScorer() = default;
    virtual std::vector<double> score(const std::string& video_id, int view, int start_frame,
                                      const WindowSpec& spec) const = 0;
};

// Window start frames covering a T-frame video: 0, stride, 2*stride, ...
// while start+span <= T, plus one clamped tail window at T-span when the
// end is not stride aligned. Videos shorter than one span get the single
// window at 0.
std::vector<int> schedule_windows(int num_frames, const WindowSpec& spec);

// Runs the scorer over every (view, window) pair and averages per frame:
// each window's vector is broadcast to the frames it covers, then every
// frame divides by the number of covering windows. Windows are accumulated
// in ascending start order per view, so output is bitwise deterministic.
ProbabilityTensor accumulate_scores(const std::string& video_id, int num_frames, int num_views,
                                    int num_classes, const WindowSpec& spec,
                                    const ClipScorer& scorer);

}  // namespace mvtal
