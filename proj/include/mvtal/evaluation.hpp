// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvtal/domain.hpp"

namespace mvtal {

// Optimal ground-truth / prediction assignment for one video.
// average_score = sum of pair scores / (pairs + unmatched on both sides);
// when both sets are empty the score is 0 by convention.
struct MatchResult {
    struct Pair {
        int gt_index = 0;
        int pred_index = 0;
        double overlap = 0.0;
    };

    std::vector<Pair> pairs;          // ascending gt_index
    std::vector<int> unmatched_gt;    // ascending
    std::vector<int> unmatched_pred;  // ascending
    double total_score = 0.0;         // sum of pair overlaps, ascending gt order
    double average_score = 0.0;
};

// Intersection-over-union of the two segments' time intervals. Class ids
// are not consulted here.
double pairwise_os(const ActionSegment& gt, const ActionSegment& pred);

// A prediction may match a ground-truth activity only when the classes
// agree and both endpoints land within 10 seconds (inclusive) of the
// ground truth's.
bool eligible(const ActionSegment& gt, const ActionSegment& pred);

// Exhaustive assignment oracle: considers every injective assignment over
// eligible pairs and returns one maximizing the total overlap score, ties
// broken by the lexicographically smallest pair list. Guarded to at most
// 9 segments per side.
MatchResult match_bruteforce(const SegmentSet& gt, const SegmentSet& pred);

// Maximum-weight bipartite matching over the eligibility-masked overlap
// matrix (shortest-augmenting-path Hungarian), any sizes. Total score and
// tie-break rule agree with match_bruteforce. Note the protocol itself is
// stated for equal-size sets (one prediction per class); the partial
// matching over unequal sets is this library's extension, with leftovers
// reported in the unmatched lists.
MatchResult match_optimal(const SegmentSet& gt, const SegmentSet& pred);

struct VideoEvaluation {
    std::string video_id;
    MatchResult result;
    int gt_count = 0;
    int pred_count = 0;
};

struct CorpusEvaluation {
    std::vector<VideoEvaluation> videos;  // ascending video_id
    double corpus_score = 0.0;            // pooled numerator / pooled denominator
};

// Matches predictions to ground truth video by video and pools the
// per-video numerators and denominators into one corpus score. Every
// prediction video_id must exist in the ground truth.
CorpusEvaluation evaluate_sets(const std::vector<SegmentSet>& gt,
                               const std::vector<SegmentSet>& pred);

// File-level wrapper over segments CSVs.
CorpusEvaluation evaluate_files(const std::string& gt_path, const std::string& pred_path);

// JSON report: corpus score plus per-video pairs and unmatched lists.
std::string evaluation_report_json(const CorpusEvaluation& evaluation);

}  // namespace mvtal
