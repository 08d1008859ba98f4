// SPDX-License-Identifier: Apache-2.0
#include "mvtal/election.hpp"

#include <algorithm>
#include <cmath>

namespace mvtal {

namespace {

double span_mean(const AggregatedSignal& signal, int class_id, int start_frame, int end_frame) {
    double sum = 0.0;
    for (int t = start_frame; t <= end_frame; ++t) sum += signal.at(t, class_id);
    return sum / (end_frame - start_frame + 1);
}

}  // namespace

AggregatedSignal aggregate(const ProbabilityTensor& tensor, const std::vector<double>& weights,
                           int num_classes, int num_views) {
    if (tensor.num_classes() != num_classes || tensor.num_views() != num_views ||
        weights.size() != static_cast<size_t>(num_classes) * num_views)
        throw ShapeError("aggregate: weight matrix does not match tensor dimensions (" +
                         std::to_string(tensor.num_classes()) + " classes, " +
                         std::to_string(tensor.num_views()) + " views)");

    AggregatedSignal signal(tensor.num_frames(), num_classes);
    for (int t = 0; t < tensor.num_frames(); ++t) {
        for (int c = 0; c < num_classes; ++c) {
            double acc = 0.0;
            for (int m = 0; m < num_views; ++m)
                acc += weights[static_cast<size_t>(c) * num_views + m] * tensor.at(t, c, m);
            signal.at(t, c) = acc;
        }
    }
    return signal;
}

AggregatedSignal aggregate(const ProbabilityTensor& tensor, const ElectionConfig& config) {
    return aggregate(tensor, config.weights, config.num_classes, config.num_views);
}

std::vector<std::vector<Candidate>> filter_candidates(const AggregatedSignal& signal,
                                                      const std::vector<double>& thresholds) {
    if (thresholds.size() != static_cast<size_t>(signal.num_classes()))
        throw ShapeError("filter_candidates: expected one threshold per class");

    std::vector<std::vector<Candidate>> out(static_cast<size_t>(signal.num_classes()));
    for (int c = 0; c < signal.num_classes(); ++c) {
        const double threshold = thresholds[static_cast<size_t>(c)];
        int run_start = -1;
        for (int t = 0; t <= signal.num_frames(); ++t) {
            const bool above = t < signal.num_frames() && signal.at(t, c) > threshold;
            if (above && run_start < 0) {
                run_start = t;
            } else if (!above && run_start >= 0) {
                Candidate cand;
                cand.class_id = c;
                cand.start_frame = run_start;
                cand.end_frame = t - 1;
                cand.mean_score = span_mean(signal, c, run_start, t - 1);
                out[static_cast<size_t>(c)].push_back(cand);
                run_start = -1;
            }
        }
    }
    return out;
}

std::vector<Candidate> merge_candidates(std::vector<Candidate> candidates, int gap_frames,
                                        const AggregatedSignal& signal) {
    for (size_t i = 0; i + 1 < candidates.size(); ++i) {
        if (candidates[i + 1].start_frame <= candidates[i].end_frame)
            throw ContractError("merge_candidates: input must be sorted and non-overlapping");
    }
    if (gap_frames < 0) throw RangeError("merge_candidates: gap_frames must be >= 0");

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Candidate> next;
        next.reserve(candidates.size());
        for (const Candidate& cand : candidates) {
            if (!next.empty()) {
                Candidate& prev = next.back();
                const int frames_between = cand.start_frame - prev.end_frame - 1;
                if (frames_between < gap_frames) {
                    prev.end_frame = cand.end_frame;
                    prev.mean_score = span_mean(signal, prev.class_id, prev.start_frame, prev.end_frame);
                    changed = true;
                    continue;
                }
            }
            next.push_back(cand);
        }
        candidates = std::move(next);
    }
    return candidates;
}

std::vector<std::optional<Selection>> select_segments(
    const std::vector<std::vector<Candidate>>& candidates_per_class,
    const AggregatedSignal& signal, const TimeBase& tb, Fallback fallback) {
    const int num_classes = static_cast<int>(candidates_per_class.size());
    const double video_end_s = static_cast<double>(signal.num_frames()) / tb.fps;
    std::vector<std::optional<Selection>> out(static_cast<size_t>(num_classes));

    for (int c = 0; c < num_classes; ++c) {
        const auto& candidates = candidates_per_class[static_cast<size_t>(c)];
        double start_s = 0.0, end_s = 0.0;
        Selection sel;

        if (!candidates.empty()) {
            const Candidate* best = &candidates.front();
            for (const Candidate& cand : candidates) {
                if (cand.mean_score > best->mean_score ||
                    (cand.mean_score == best->mean_score &&
                     (cand.start_frame < best->start_frame ||
                      (cand.start_frame == best->start_frame &&
                       cand.num_frames() > best->num_frames()))))
                    best = &cand;
            }
            start_s = frames_to_seconds(best->start_frame, tb);
            end_s = frames_to_seconds(best->end_frame, tb);
            sel.mean_score = best->mean_score;
            sel.from_fallback = false;
        } else if (fallback == Fallback::kArgmaxPeak) {
            int peak = 0;
            for (int t = 1; t < signal.num_frames(); ++t)
                if (signal.at(t, c) > signal.at(peak, c)) peak = t;
            const double peak_s = frames_to_seconds(peak, tb);
            start_s = std::max(peak_s - 0.5, 0.0);
            end_s = std::min(peak_s + 0.5, video_end_s);
            sel.mean_score = signal.at(peak, c);
            sel.from_fallback = true;
        } else {
            continue;
        }

        long long start_sec = round_half_away(start_s);
        long long end_sec = round_half_away(end_s);
        if (end_sec == start_sec) end_sec += 1;
        sel.segment = ActionSegment(c, static_cast<double>(start_sec), static_cast<double>(end_sec));
        out[static_cast<size_t>(c)] = sel;
    }
    return out;
}

ElectionOutcome elect_detailed(const ProbabilityTensor& tensor, const ElectionConfig& config,
                               const std::string& video_id) {
    ElectionOutcome outcome;
    outcome.signal = aggregate(tensor, config);

    auto candidates = filter_candidates(outcome.signal, config.thresholds);
    const int gap_frames = static_cast<int>(round_half_away(config.merge_gap_s * config.tb.fps));
    outcome.merged_candidates.reserve(candidates.size());
    for (auto& class_candidates : candidates)
        outcome.merged_candidates.push_back(
            merge_candidates(std::move(class_candidates), gap_frames, outcome.signal));

    outcome.selections =
        select_segments(outcome.merged_candidates, outcome.signal, config.tb, config.fallback);

    outcome.segments.video_id = video_id;
    for (const auto& sel : outcome.selections)
        if (sel) outcome.segments.segments.push_back(sel->segment);
    return outcome;
}

SegmentSet elect(const ProbabilityTensor& tensor, const ElectionConfig& config,
                 const std::string& video_id) {
    return elect_detailed(tensor, config, video_id).segments;
}

}  // namespace mvtal
