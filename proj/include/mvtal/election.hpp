// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvtal/domain.hpp"
#include "mvtal/io_formats.hpp"

namespace mvtal {

// Step 1, aggregation: per-class convex combination of the per-view scores,
// signal[t][c] = sum_m weights[c][m] * tensor[t][c][m]. Weight rows must be
// convex, so output values stay within [0, 1].
AggregatedSignal aggregate(const ProbabilityTensor& tensor, const std::vector<double>& weights,
                           int num_classes, int num_views);
AggregatedSignal aggregate(const ProbabilityTensor& tensor, const ElectionConfig& config);

// Step 2, filtering: per class, maximal runs of consecutive frames whose
// aggregated score strictly exceeds that class's threshold. Runs come back
// in ascending start order with their span mean.
std::vector<std::vector<Candidate>> filter_candidates(const AggregatedSignal& signal,
                                                      const std::vector<double>& thresholds);

// Step 3, merging: adjacent candidates of one class whose separating frame
// count is below gap_frames collapse into one candidate spanning both, with
// the mean recomputed over the merged span (gap frames included). Iterated
// until stable. Input must be sorted and non-overlapping.
std::vector<Candidate> merge_candidates(std::vector<Candidate> candidates, int gap_frames,
                                        const AggregatedSignal& signal);

// Step 4, selection: per class the candidate with the highest mean wins
// (ties: earlier start, then longer span). Frame bounds round to integer
// seconds, half away from zero; a collapsed segment gets one extra second.
// With the argmax-peak fallback, a class without candidates emits the
// one-second segment centered on its signal peak, clamped to the video.
struct Selection {
    ActionSegment segment;
    bool from_fallback = false;
    double mean_score = 0.0;
};
std::vector<std::optional<Selection>> select_segments(
    const std::vector<std::vector<Candidate>>& candidates_per_class,
    const AggregatedSignal& signal, const TimeBase& tb, Fallback fallback);

// The full four-step pipeline. Deterministic; at most one segment per class,
// exactly num_classes segments under the argmax-peak fallback.
SegmentSet elect(const ProbabilityTensor& tensor, const ElectionConfig& config,
                 const std::string& video_id = "video");

// Same pipeline but also reporting per-class selection detail (for the CLI
// summary and the SVG report).
struct ElectionOutcome {
    SegmentSet segments;
    AggregatedSignal signal;
    std::vector<std::vector<Candidate>> merged_candidates;  // per class
    std::vector<std::optional<Selection>> selections;       // per class
};
ElectionOutcome elect_detailed(const ProbabilityTensor& tensor, const ElectionConfig& config,
                               const std::string& video_id = "video");

}  // namespace mvtal
