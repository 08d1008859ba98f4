// SPDX-License-Identifier: Apache-2.0
#include "mvtal/windowing.hpp"

#include <algorithm>
#include <cmath>

namespace mvtal {

std::vector<int> schedule_windows(int num_frames, const WindowSpec& spec) {
    if (num_frames < 1) throw RangeError("schedule_windows: num_frames must be >= 1");
    const int span = spec.span();
    const int stride = spec.stride();
    if (num_frames <= span) return {0};

    std::vector<int> starts;
    for (int start = 0; start + span <= num_frames; start += stride) starts.push_back(start);
    if ((num_frames - span) % stride != 0) starts.push_back(num_frames - span);
    return starts;
}

ProbabilityTensor accumulate_scores(const std::string& video_id, int num_frames, int num_views,
                                    int num_classes, const WindowSpec& spec,
                                    const ClipScorer& scorer) {
    ProbabilityTensor tensor(num_frames, num_classes, num_views);
    const std::vector<int> starts = schedule_windows(num_frames, spec);
    const int span = spec.span();

    std::vector<int> coverage(static_cast<size_t>(num_frames), 0);
    for (int m = 0; m < num_views; ++m) {
        std::fill(coverage.begin(), coverage.end(), 0);
        for (int start : starts) {
            std::vector<double> scores;
            try {
                scores = scorer.score(video_id, m, start, spec);
            } catch (const std::exception& e) {
                throw Error("clip scorer failed at (view " + std::to_string(m) + ", start " +
                            std::to_string(start) + "): " + e.what());
            }
            if (scores.size() != static_cast<size_t>(num_classes))
                throw ShapeError("clip scorer returned " + std::to_string(scores.size()) +
                                 " scores, expected " + std::to_string(num_classes));
            const int lo = std::max(start, 0);
            const int hi = std::min(start + span - 1, num_frames - 1);
            for (int t = lo; t <= hi; ++t) {
                ++coverage[static_cast<size_t>(t)];
                for (int c = 0; c < num_classes; ++c) tensor.at(t, c, m) += scores[static_cast<size_t>(c)];
            }
        }
        for (int t = 0; t < num_frames; ++t) {
            const int n = coverage[static_cast<size_t>(t)];
            if (n == 0)
                throw Error("window schedule left frame " + std::to_string(t) + " uncovered");
            for (int c = 0; c < num_classes; ++c) tensor.at(t, c, m) /= n;
        }
    }
    return tensor;
}

}  // namespace mvtal
