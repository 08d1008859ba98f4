// SPDX-License-Identifier: Apache-2.0
#include "mvtal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mvtal/io_formats.hpp"

namespace mvtal {

namespace {

// Eligibility-masked overlap matrix; ineligible entries are exactly 0 and
// can never be matched.
struct ScoreMatrix {
    int num_gt = 0;
    int num_pred = 0;
    std::vector<double> scores;      // num_gt * num_pred
    std::vector<char> eligible_at;   // num_gt * num_pred

    double score(int i, int j) const { return scores[static_cast<size_t>(i) * num_pred + j]; }
    bool ok(int i, int j) const { return eligible_at[static_cast<size_t>(i) * num_pred + j] != 0; }
};

ScoreMatrix build_matrix(const SegmentSet& gt, const SegmentSet& pred) {
    ScoreMatrix m;
    m.num_gt = static_cast<int>(gt.segments.size());
    m.num_pred = static_cast<int>(pred.segments.size());
    m.scores.assign(static_cast<size_t>(m.num_gt) * m.num_pred, 0.0);
    m.eligible_at.assign(static_cast<size_t>(m.num_gt) * m.num_pred, 0);
    for (int i = 0; i < m.num_gt; ++i) {
        for (int j = 0; j < m.num_pred; ++j) {
            if (eligible(gt.segments[static_cast<size_t>(i)], pred.segments[static_cast<size_t>(j)])) {
                m.eligible_at[static_cast<size_t>(i) * m.num_pred + j] = 1;
                m.scores[static_cast<size_t>(i) * m.num_pred + j] =
                    pairwise_os(gt.segments[static_cast<size_t>(i)], pred.segments[static_cast<size_t>(j)]);
            }
        }
    }
    return m;
}

// Total of a pair list, summed in ascending gt order. Both matchers report
// totals through this one fold so equal pair lists give bit-equal totals.
double fold_total(const std::vector<MatchResult::Pair>& pairs) {
    double total = 0.0;
    for (const auto& p : pairs) total += p.overlap;
    return total;
}

MatchResult finalize(const ScoreMatrix& m, std::vector<MatchResult::Pair> pairs) {
    MatchResult result;
    result.pairs = std::move(pairs);
    std::vector<char> gt_used(static_cast<size_t>(m.num_gt), 0);
    std::vector<char> pred_used(static_cast<size_t>(m.num_pred), 0);
    for (const auto& p : result.pairs) {
        gt_used[static_cast<size_t>(p.gt_index)] = 1;
        pred_used[static_cast<size_t>(p.pred_index)] = 1;
    }
    for (int i = 0; i < m.num_gt; ++i)
        if (!gt_used[static_cast<size_t>(i)]) result.unmatched_gt.push_back(i);
    for (int j = 0; j < m.num_pred; ++j)
        if (!pred_used[static_cast<size_t>(j)]) result.unmatched_pred.push_back(j);

    result.total_score = fold_total(result.pairs);
    const size_t denominator =
        result.pairs.size() + result.unmatched_gt.size() + result.unmatched_pred.size();
    result.average_score =
        denominator == 0 ? 0.0 : result.total_score / static_cast<double>(denominator);
    return result;
}

// Exact max-total over injective eligible assignments via exhaustive
// search with memoization on (gt index, used-prediction mask).
struct ExhaustiveSolver {
    const ScoreMatrix& m;
    std::vector<double> memo;
    std::vector<char> known;

    explicit ExhaustiveSolver(const ScoreMatrix& matrix)
        : m(matrix),
          memo(static_cast<size_t>(matrix.num_gt + 1) << matrix.num_pred, 0.0),
          known(static_cast<size_t>(matrix.num_gt + 1) << matrix.num_pred, 0) {}

    double best_from(int i, unsigned mask) {
        if (i == m.num_gt) return 0.0;
        const size_t key = (static_cast<size_t>(i) << m.num_pred) | mask;
        if (known[key]) return memo[key];
        double best = best_from(i + 1, mask);  // leave gt i unmatched
        for (int j = 0; j < m.num_pred; ++j) {
            if ((mask >> j) & 1u) continue;
            if (!m.ok(i, j)) continue;
            const double candidate = m.score(i, j) + best_from(i + 1, mask | (1u << j));
            if (candidate > best) best = candidate;
        }
        known[key] = 1;
        memo[key] = best;
        return best;
    }

    // Reconstructs the lexicographically smallest pair list among all
    // maximum-total assignments: stop as soon as nothing more can be
    // gained, otherwise match the current gt to the smallest workable
    // prediction, otherwise skip it.
    std::vector<MatchResult::Pair> reconstruct() {
        std::vector<MatchResult::Pair> pairs;
        unsigned mask = 0;
        int i = 0;
        while (i < m.num_gt) {
            const double remaining = best_from(i, mask);
            if (remaining == 0.0) break;
            bool matched = false;
            for (int j = 0; j < m.num_pred && !matched; ++j) {
                if ((mask >> j) & 1u) continue;
                if (!m.ok(i, j)) continue;
                if (m.score(i, j) + best_from(i + 1, mask | (1u << j)) == remaining) {
                    pairs.push_back({i, j, m.score(i, j)});
                    mask |= 1u << j;
                    matched = true;
                }
            }
            ++i;
        }
        return pairs;
    }
};

// Shortest-augmenting-path assignment on a square cost matrix
// (minimizing). Returns row -> column.
std::vector<int> solve_square_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
    std::vector<int> col_to_row(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        col_to_row[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(static_cast<size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<size_t>(n) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = col_to_row[static_cast<size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double reduced = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                                       u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (reduced < min_slack[static_cast<size_t>(j)]) {
                    min_slack[static_cast<size_t>(j)] = reduced;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (min_slack[static_cast<size_t>(j)] < delta) {
                    delta = min_slack[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(col_to_row[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    min_slack[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            col_to_row[static_cast<size_t>(j0)] = col_to_row[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (col_to_row[static_cast<size_t>(j)] != 0)
            row_to_col[static_cast<size_t>(col_to_row[static_cast<size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

// Maximum-weight assignment over an eligibility-masked submatrix: rows are
// gt indices > first_gt, columns the predictions not in used_mask. Padding
// and masked entries carry weight 0; only positive-weight matched pairs are
// reported. Returns pairs in ascending gt order.
std::vector<MatchResult::Pair> hungarian_max_pairs(const ScoreMatrix& m, int first_gt,
                                                   const std::vector<char>& pred_used) {
    std::vector<int> gt_ids, pred_ids;
    for (int i = first_gt; i < m.num_gt; ++i) gt_ids.push_back(i);
    for (int j = 0; j < m.num_pred; ++j)
        if (!pred_used[static_cast<size_t>(j)]) pred_ids.push_back(j);

    const int n = static_cast<int>(std::max(gt_ids.size(), pred_ids.size()));
    if (n == 0) return {};

    std::vector<std::vector<double>> cost(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(n), 0.0));
    for (size_t a = 0; a < gt_ids.size(); ++a)
        for (size_t b = 0; b < pred_ids.size(); ++b)
            if (m.ok(gt_ids[a], pred_ids[b])) cost[a][b] = -m.score(gt_ids[a], pred_ids[b]);

    const std::vector<int> row_to_col = solve_square_assignment(cost);
    std::vector<MatchResult::Pair> pairs;
    for (size_t a = 0; a < gt_ids.size(); ++a) {
        const int b = row_to_col[a];
        if (b < 0 || static_cast<size_t>(b) >= pred_ids.size()) continue;
        if (!m.ok(gt_ids[a], pred_ids[static_cast<size_t>(b)])) continue;
        const double w = m.score(gt_ids[a], pred_ids[static_cast<size_t>(b)]);
        if (w > 0.0) pairs.push_back({gt_ids[a], pred_ids[static_cast<size_t>(b)], w});
    }
    return pairs;
}

}  // namespace

double pairwise_os(const ActionSegment& gt, const ActionSegment& pred) {
    const IntervalOverlap o =
        interval_overlap_seconds(gt.start_s, gt.end_s, pred.start_s, pred.end_s);
    return o.intersection_s / o.union_s;
}

bool eligible(const ActionSegment& gt, const ActionSegment& pred) {
    return gt.class_id == pred.class_id && std::abs(pred.start_s - gt.start_s) <= 10.0 &&
           std::abs(pred.end_s - gt.end_s) <= 10.0;
}

MatchResult match_bruteforce(const SegmentSet& gt, const SegmentSet& pred) {
    if (gt.segments.size() > 9 || pred.segments.size() > 9)
        throw CapacityError("match_bruteforce: limited to 9 segments per side, got " +
                            std::to_string(gt.segments.size()) + " gt and " +
                            std::to_string(pred.segments.size()) + " predictions");
    const ScoreMatrix m = build_matrix(gt, pred);
    ExhaustiveSolver solver(m);
    return finalize(m, solver.reconstruct());
}

MatchResult match_optimal(const SegmentSet& gt, const SegmentSet& pred) {
    const ScoreMatrix m = build_matrix(gt, pred);
    std::vector<char> pred_used(static_cast<size_t>(m.num_pred), 0);

    double best_total = fold_total(hungarian_max_pairs(m, 0, pred_used));

    // Lexicographic refinement: walk gt indices in order and keep the
    // smallest prediction choice that still extends to a maximum-total
    // assignment; stop once the fixed pairs already reach it.
    std::vector<MatchResult::Pair> fixed;
    for (int i = 0; i < m.num_gt; ++i) {
        if (fold_total(fixed) == best_total) break;
        for (int j = 0; j < m.num_pred; ++j) {
            if (pred_used[static_cast<size_t>(j)]) continue;
            if (!m.ok(i, j)) continue;
            std::vector<char> pred_used_after = pred_used;
            pred_used_after[static_cast<size_t>(j)] = 1;
            std::vector<MatchResult::Pair> candidate = fixed;
            candidate.push_back({i, j, m.score(i, j)});
            const auto completion = hungarian_max_pairs(m, i + 1, pred_used_after);
            candidate.insert(candidate.end(), completion.begin(), completion.end());
            const double candidate_total = fold_total(candidate);
            if (candidate_total >= best_total) {
                best_total = candidate_total;
                fixed.push_back({i, j, m.score(i, j)});
                pred_used = std::move(pred_used_after);
                break;
            }
        }
    }
    return finalize(m, std::move(fixed));
}

CorpusEvaluation evaluate_sets(const std::vector<SegmentSet>& gt,
                               const std::vector<SegmentSet>& pred) {
    std::map<std::string, const SegmentSet*> gt_by_id;
    for (const auto& set : gt) {
        if (!gt_by_id.emplace(set.video_id, &set).second)
            throw ValidationError("evaluate: duplicate ground-truth video_id '" + set.video_id + "'");
    }
    std::map<std::string, const SegmentSet*> pred_by_id;
    for (const auto& set : pred) {
        if (gt_by_id.find(set.video_id) == gt_by_id.end())
            throw ValidationError("evaluate: prediction for unknown video '" + set.video_id + "'");
        if (!pred_by_id.emplace(set.video_id, &set).second)
            throw ValidationError("evaluate: duplicate prediction video_id '" + set.video_id + "'");
    }

    CorpusEvaluation evaluation;
    double pooled_numerator = 0.0;
    long long pooled_denominator = 0;
    for (const auto& [video_id, gt_set] : gt_by_id) {
        static const SegmentSet kEmpty;
        const auto pred_it = pred_by_id.find(video_id);
        const SegmentSet& pred_set = pred_it == pred_by_id.end() ? kEmpty : *pred_it->second;

        VideoEvaluation video;
        video.video_id = video_id;
        video.gt_count = static_cast<int>(gt_set->segments.size());
        video.pred_count = static_cast<int>(pred_set.segments.size());
        video.result = match_optimal(*gt_set, pred_set);
        pooled_numerator += video.result.total_score;
        pooled_denominator += static_cast<long long>(video.result.pairs.size()) +
                              static_cast<long long>(video.result.unmatched_gt.size()) +
                              static_cast<long long>(video.result.unmatched_pred.size());
        evaluation.videos.push_back(std::move(video));
    }
    evaluation.corpus_score =
        pooled_denominator == 0 ? 0.0 : pooled_numerator / static_cast<double>(pooled_denominator);
    return evaluation;
}

CorpusEvaluation evaluate_files(const std::string& gt_path, const std::string& pred_path) {
    return evaluate_sets(read_segments_csv(gt_path), read_segments_csv(pred_path));
}

std::string evaluation_report_json(const CorpusEvaluation& evaluation) {
    std::string out = "{\n  \"corpus_score\": " + format_double(evaluation.corpus_score) +
                      ",\n  \"videos\": [";
    for (size_t v = 0; v < evaluation.videos.size(); ++v) {
        const auto& video = evaluation.videos[v];
        out += v == 0 ? "\n" : ",\n";
        out += "    {\n      \"video_id\": \"" + video.video_id + "\",\n";
        out += "      \"average_score\": " + format_double(video.result.average_score) + ",\n";
        out += "      \"pairs\": [";
        for (size_t p = 0; p < video.result.pairs.size(); ++p) {
            const auto& pair = video.result.pairs[p];
            out += p == 0 ? "" : ", ";
            out += "{\"gt_index\": " + std::to_string(pair.gt_index) +
                   ", \"pred_index\": " + std::to_string(pair.pred_index) +
                   ", \"os\": " + format_double(pair.overlap) + "}";
        }
        out += "],\n      \"unmatched_gt\": [";
        for (size_t i = 0; i < video.result.unmatched_gt.size(); ++i)
            out += (i == 0 ? "" : ", ") + std::to_string(video.result.unmatched_gt[i]);
        out += "],\n      \"unmatched_pred\": [";
        for (size_t i = 0; i < video.result.unmatched_pred.size(); ++i)
            out += (i == 0 ? "" : ", ") + std::to_string(video.result.unmatched_pred[i]);
        out += "]\n    }";
    }
    out += evaluation.videos.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

}  // namespace mvtal
