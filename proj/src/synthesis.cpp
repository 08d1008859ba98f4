// SPDX-License-Identifier: Apache-2.0
#include "mvtal/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mvtal/election.hpp"
#include "mvtal/evaluation.hpp"

namespace mvtal {

namespace {

constexpr double kMinActionGapS = 1.0;   // schedule guarantee between actions
constexpr double kPauseMarginS = 0.5;    // pause keeps this far from action edges
constexpr double kRestConcentration = 6.0;  // exponent tying resting mass to d
constexpr double kRestFloor = 0.10;      // baseline resting affinity per class
// Distractor strength: aggregated under uniform weights this lands well
// below every tier's in-action mean, so bursts threaten selection only
// when a focused weight row amplifies their view.
constexpr double kBurstLevel = 0.7;

void run_indexed(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

double SplitMix64::normal() {
    // Box-Muller; the first uniform is shifted into (0, 1] to keep the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

void Scenario::check() const {
    if (num_classes() < 1) throw ConfigError("scenario.num_classes: must be >= 1");
    if (num_views < 1) throw ConfigError("scenario.num_views: must be >= 1");
    if (!(video_len_s > 0.0)) throw ConfigError("scenario.video_len_s: must be > 0");
    if (!discriminability.empty() &&
        discriminability.size() != static_cast<size_t>(num_classes()) * num_views)
        throw ConfigError("scenario.discriminability: expected a num_classes x num_views matrix");
    for (double d : discriminability)
        if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("scenario.discriminability: values must lie in [0,1]");
    if (!(noise_sigma >= 0.0)) throw ConfigError("scenario.noise_sigma: must be >= 0");
    if (!(pause_prob >= 0.0 && pause_prob <= 1.0))
        throw ConfigError("scenario.pause_prob: must lie in [0,1]");
    if (!(distractor_prob >= 0.0 && distractor_prob <= 1.0))
        throw ConfigError("scenario.distractor_prob: must lie in [0,1]");
    if (!(pause_len_s.lo <= pause_len_s.hi) || pause_len_s.lo < 0.0)
        throw ConfigError("scenario.pause_len_s: range must be ordered and non-negative");
    if (!(duration_s.lo <= duration_s.hi) || !(duration_s.lo > 0.0))
        throw ConfigError("scenario.duration_s: range must be ordered and positive");
}

std::vector<double> Scenario::skewed_discriminability(int num_classes, int num_views) {
    // One informative view per class (round robin); its strength cycles
    // strong / medium / weak / hard every num_views classes so tiers and
    // views stay decorrelated. Hard classes barely register off their one
    // usable view, the regime where view weighting decides recoverability.
    constexpr double kTierStrength[4] = {0.95, 0.62, 0.5, 0.35};
    constexpr double kTierOffView[4] = {0.25, 0.25, 0.25, 0.08};
    std::vector<double> d(static_cast<size_t>(num_classes) * num_views, 0.0);
    for (int c = 0; c < num_classes; ++c) {
        const int good_view = c % num_views;
        const int tier = (c / num_views) % 4;
        for (int m = 0; m < num_views; ++m)
            d[static_cast<size_t>(c) * num_views + m] =
                m == good_view ? kTierStrength[tier] : kTierOffView[tier];
    }
    return d;
}

Scenario Scenario::noiseless(int num_classes, int num_views) {
    Scenario s;
    s.labels = num_classes == 16 ? LabelSet::driver_actions() : LabelSet::generic(num_classes);
    s.num_views = num_views;
    s.discriminability.assign(static_cast<size_t>(num_classes) * num_views, 1.0);
    s.noise_sigma = 0.0;
    s.pause_prob = 0.0;
    s.distractor_prob = 0.0;
    return s;
}

GeneratedScenario gen_scenario(const Scenario& params, const std::string& video_id) {
    params.check();
    const int num_classes = params.num_classes();
    SplitMix64 rng(params.seed);

    std::vector<double> durations(static_cast<size_t>(num_classes), 0.0);
    bool feasible = false;
    for (int attempt = 0; attempt < 100 && !feasible; ++attempt) {
        double total = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            durations[static_cast<size_t>(c)] = rng.uniform(params.duration_s.lo, params.duration_s.hi);
            total += durations[static_cast<size_t>(c)];
        }
        feasible = total + kMinActionGapS * (num_classes - 1) <= params.video_len_s;
    }
    if (!feasible)
        throw GenerationError("gen_scenario: durations in [" + format_double(params.duration_s.lo) +
                              ", " + format_double(params.duration_s.hi) + "] for " +
                              std::to_string(num_classes) + " classes cannot fit a " +
                              format_double(params.video_len_s) + " s video after 100 attempts");

    // Shuffled class order along the timeline (Fisher-Yates).
    std::vector<int> order(static_cast<size_t>(num_classes));
    std::iota(order.begin(), order.end(), 0);
    for (int i = num_classes - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }

    // Spread the leftover time over the K+1 gaps around the actions.
    const double total_duration =
        std::accumulate(durations.begin(), durations.end(), 0.0);
    const double slack = params.video_len_s - total_duration - kMinActionGapS * (num_classes - 1);
    std::vector<double> gap_weights(static_cast<size_t>(num_classes) + 1, 0.0);
    double weight_sum = 0.0;
    for (double& w : gap_weights) {
        w = rng.uniform01();
        weight_sum += w;
    }

    GeneratedScenario out;
    out.ground_truth.video_id = video_id;
    double cursor = weight_sum > 0.0 ? slack * gap_weights[0] / weight_sum : 0.0;
    for (int i = 0; i < num_classes; ++i) {
        const int class_id = order[static_cast<size_t>(i)];
        const double duration = durations[static_cast<size_t>(class_id)];
        TimelineEntry entry;
        entry.segment = ActionSegment(class_id, cursor, cursor + duration);
        out.timeline.push_back(entry);
        out.ground_truth.segments.push_back(entry.segment);
        cursor += duration;
        if (i + 1 < num_classes) {
            const double extra =
                weight_sum > 0.0 ? slack * gap_weights[static_cast<size_t>(i) + 1] / weight_sum : 0.0;
            cursor += kMinActionGapS + extra;
        }
    }

    // Mid-action pauses, recorded only in the hidden timeline.
    for (auto& entry : out.timeline) {
        const bool wants_pause = rng.uniform01() < params.pause_prob;
        const double len = rng.uniform(params.pause_len_s.lo, params.pause_len_s.hi);
        if (!wants_pause) continue;
        const double start_lo = entry.segment.start_s + kPauseMarginS;
        const double start_hi = entry.segment.end_s - kPauseMarginS - len;
        if (start_hi <= start_lo) continue;  // action too short to pause
        entry.pause = Pause{rng.uniform(start_lo, start_hi), len};
    }
    return out;
}

namespace {

struct Burst {
    int view = 0;
    int target_class = 0;
    double start_s = 0.0;
    double end_s = 0.0;
};

// Frame t covers the instant t/fps; an interval [a, b) owns the frames in
// [ceil(a*fps), ceil(b*fps) - 1].
int first_frame_at_or_after(double time_s, double fps) {
    return static_cast<int>(std::ceil(time_s * fps - 1e-9));
}

}  // namespace

ProbabilityTensor emit_probabilities(const GeneratedScenario& generated, const Scenario& params) {
    params.check();
    const int num_classes = params.num_classes();
    const int num_views = params.num_views;
    const int num_frames = params.num_frames();
    const double fps = params.tb.fps;
    const std::vector<double> disc = params.discriminability.empty()
                                         ? Scenario::skewed_discriminability(num_classes, num_views)
                                         : params.discriminability;

    SplitMix64 rng(params.seed ^ 0x517cc1b727220a95ull);  // distinct stream from gen_scenario

    // In-action score noise is temporally correlated (moving average of iid
    // normals, rescaled to unit marginal variance), matching the smoothness
    // of window-averaged recognizer outputs. Half window of ~half a second
    // at 30 fps.
    const int half_window = std::max(1, static_cast<int>(params.tb.fps / 2.0));
    std::vector<std::vector<double>> smooth_noise(static_cast<size_t>(num_views));
    {
        std::vector<double> raw(static_cast<size_t>(num_frames), 0.0);
        std::vector<double> prefix(static_cast<size_t>(num_frames) + 1, 0.0);
        for (int m = 0; m < num_views; ++m) {
            for (int t = 0; t < num_frames; ++t) raw[static_cast<size_t>(t)] = rng.normal();
            for (int t = 0; t < num_frames; ++t)
                prefix[static_cast<size_t>(t) + 1] = prefix[static_cast<size_t>(t)] + raw[static_cast<size_t>(t)];
            auto& out = smooth_noise[static_cast<size_t>(m)];
            out.assign(static_cast<size_t>(num_frames), 0.0);
            for (int t = 0; t < num_frames; ++t) {
                const int lo = std::max(t - half_window, 0);
                const int hi = std::min(t + half_window, num_frames - 1);
                const double sum = prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)];
                out[static_cast<size_t>(t)] = sum / std::sqrt(static_cast<double>(hi - lo + 1));
            }
        }
    }

    // Resting affinity: how much of the non-true-class mass a class soaks up
    // in a given view. Tied to discriminability so a view "sees" its own
    // classes everywhere, the texture the aggregation step must suppress.
    std::vector<double> rest_affinity(static_cast<size_t>(num_classes) * num_views, 0.0);
    for (int c = 0; c < num_classes; ++c)
        for (int m = 0; m < num_views; ++m)
            rest_affinity[static_cast<size_t>(c) * num_views + m] =
                std::pow(disc[static_cast<size_t>(c) * num_views + m], kRestConcentration) + kRestFloor;

    // Distractor bursts, decided up front per (action, view). Spurious
    // detections go to weakly-expressed classes when the matrix has any
    // (max discriminability <= 0.4), mirroring how recognizers misfire on
    // the classes they barely see; otherwise any wrong class qualifies.
    std::vector<int> burst_pool;
    for (int c = 0; c < num_classes; ++c) {
        double best = 0.0;
        for (int m = 0; m < num_views; ++m)
            best = std::max(best, disc[static_cast<size_t>(c) * num_views + m]);
        if (best <= 0.4) burst_pool.push_back(c);
    }
    if (burst_pool.empty())
        for (int c = 0; c < num_classes; ++c) burst_pool.push_back(c);

    std::vector<Burst> bursts;
    for (const auto& entry : generated.timeline) {
        for (int m = 0; m < num_views; ++m) {
            const bool wants_burst = rng.uniform01() < params.distractor_prob;
            const double len = rng.uniform(1.0, 3.0);
            const size_t pick = static_cast<size_t>(
                rng.uniform_int(0, static_cast<long long>(burst_pool.size()) - 1));
            if (!wants_burst || num_classes < 2) continue;
            int target = burst_pool[pick];
            if (target == entry.segment.class_id)
                target = burst_pool[(pick + 1) % burst_pool.size()];
            if (target == entry.segment.class_id) continue;  // pool held only the true class
            const double start_lo = entry.segment.start_s;
            const double start_hi = entry.segment.end_s - len;
            if (start_hi <= start_lo) continue;
            const double start = rng.uniform(start_lo, start_hi);
            bursts.push_back({m, target, start, start + len});
        }
    }

    // Per-frame ownership maps.
    std::vector<int> owner(static_cast<size_t>(num_frames), -1);     // class id or -1 for gaps
    std::vector<char> paused(static_cast<size_t>(num_frames), 0);
    for (const auto& entry : generated.timeline) {
        const int lo = std::max(first_frame_at_or_after(entry.segment.start_s, fps), 0);
        const int hi = std::min(first_frame_at_or_after(entry.segment.end_s, fps) - 1, num_frames - 1);
        for (int t = lo; t <= hi; ++t) owner[static_cast<size_t>(t)] = entry.segment.class_id;
        if (entry.pause) {
            const int plo = std::max(first_frame_at_or_after(entry.pause->start_s, fps), 0);
            const int phi = std::min(
                first_frame_at_or_after(entry.pause->start_s + entry.pause->len_s, fps) - 1,
                num_frames - 1);
            for (int t = plo; t <= phi; ++t) paused[static_cast<size_t>(t)] = 1;
        }
    }
    std::vector<int> burst_target(static_cast<size_t>(num_frames) * num_views, -1);
    for (const auto& burst : bursts) {
        const int lo = std::max(first_frame_at_or_after(burst.start_s, fps), 0);
        const int hi = std::min(first_frame_at_or_after(burst.end_s, fps) - 1, num_frames - 1);
        for (int t = lo; t <= hi; ++t)
            burst_target[static_cast<size_t>(t) * num_views + burst.view] = burst.target_class;
    }

    ProbabilityTensor tensor(num_frames, num_classes, num_views);
    std::vector<double> vec(static_cast<size_t>(num_classes), 0.0);
    for (int t = 0; t < num_frames; ++t) {
        const int action_class = owner[static_cast<size_t>(t)];
        const bool in_pause = paused[static_cast<size_t>(t)] != 0;
        for (int m = 0; m < num_views; ++m) {
            if (action_class >= 0 && !in_pause) {
                // True class near its discriminability, remainder spread by
                // resting affinity with multiplicative jitter.
                const double x = std::clamp(
                    disc[static_cast<size_t>(action_class) * num_views + m] +
                        params.noise_sigma * smooth_noise[static_cast<size_t>(m)][static_cast<size_t>(t)],
                    0.0, 1.0);
                double share_sum = 0.0;
                for (int c = 0; c < num_classes; ++c) {
                    if (c == action_class) {
                        vec[static_cast<size_t>(c)] = 0.0;
                        continue;
                    }
                    const double jitter = std::abs(1.0 + 0.5 * rng.normal());
                    vec[static_cast<size_t>(c)] =
                        rest_affinity[static_cast<size_t>(c) * num_views + m] * jitter;
                    share_sum += vec[static_cast<size_t>(c)];
                }
                const double remainder = 1.0 - x;
                for (int c = 0; c < num_classes; ++c) {
                    if (c == action_class)
                        vec[static_cast<size_t>(c)] = x;
                    else
                        vec[static_cast<size_t>(c)] =
                            share_sum > 0.0 ? remainder * vec[static_cast<size_t>(c)] / share_sum
                                            : remainder / (num_classes - 1);
                }
            } else {
                // Pause or gap: near-uniform noise.
                double sum = 0.0;
                for (int c = 0; c < num_classes; ++c) {
                    vec[static_cast<size_t>(c)] =
                        std::max(1.0 + 2.0 * params.noise_sigma * rng.normal(), 0.05);
                    sum += vec[static_cast<size_t>(c)];
                }
                for (int c = 0; c < num_classes; ++c) vec[static_cast<size_t>(c)] /= sum;
            }

            const int target = burst_target[static_cast<size_t>(t) * num_views + m];
            if (target >= 0) {
                const double level =
                    std::clamp(kBurstLevel + params.noise_sigma * rng.normal(), 0.0, 1.0);
                for (int c = 0; c < num_classes; ++c) vec[static_cast<size_t>(c)] *= 1.0 - level;
                vec[static_cast<size_t>(target)] += level;
            }

            for (int c = 0; c < num_classes; ++c) tensor.at(t, c, m) = vec[static_cast<size_t>(c)];
        }
    }
    return tensor;
}

std::vector<SyntheticVideo> generate_corpus(const Scenario& base, int num_videos, int threads) {
    if (num_videos < 1) throw ConfigError("num_videos: must be >= 1");
    base.check();

    // Stable zero-padded ids keep lexicographic and numeric order aligned.
    int width = 1;
    for (int v = num_videos - 1; v >= 10; v /= 10) ++width;

    std::vector<SyntheticVideo> corpus(static_cast<size_t>(num_videos));
    std::vector<std::string> errors(static_cast<size_t>(num_videos));
    run_indexed(num_videos, threads, [&](int i) {
        try {
            Scenario scenario = base;
            scenario.seed = base.seed ^ static_cast<uint64_t>(i);
            std::string id = std::to_string(i);
            id.insert(0, static_cast<size_t>(width) - id.size(), '0');
            id.insert(0, "video_");
            SyntheticVideo video;
            video.video_id = id;
            video.seed = scenario.seed;
            video.fps = scenario.tb.fps;
            video.scenario = gen_scenario(scenario, id);
            video.tensor = emit_probabilities(video.scenario, scenario);
            corpus[static_cast<size_t>(i)] = std::move(video);
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(i)] = e.what();
        }
    });
    for (const auto& err : errors)
        if (!err.empty()) throw GenerationError(err);
    return corpus;
}

std::vector<double> TensorClipScorer::score(const std::string&, int view, int start_frame,
                                            const WindowSpec& spec) const {
    const int lo = std::clamp(start_frame, 0, tensor_->num_frames() - 1);
    const int hi = std::clamp(start_frame + spec.span() - 1, 0, tensor_->num_frames() - 1);
    std::vector<double> out(static_cast<size_t>(tensor_->num_classes()), 0.0);
    for (int t = lo; t <= hi; ++t)
        for (int c = 0; c < tensor_->num_classes(); ++c)
            out[static_cast<size_t>(c)] += tensor_->at(t, c, view);
    for (double& v : out) v /= (hi - lo + 1);
    return out;
}

// ---------------------------------------------------------------------------
// Ablation harness

namespace {

constexpr double kThresholdGrid[] = {0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6};
constexpr double kGapGrid[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
// A per-class tuning choice replaces its simpler baseline only when it wins
// by this much on the tuning split, so split noise (pooled-mean s.e. is a
// few hundredths at desk scale) cannot trigger a switch. Rescuing a lost
// class gains an order of magnitude more than this.
constexpr double kTuneMargin = 0.12;

struct ClassScore {
    double numerator = 0.0;
    long long denominator = 0;
};

// Aggregates one class slice of a tensor under a single weight row.
void aggregate_class_slice(const ProbabilityTensor& tensor, int class_id,
                           const std::vector<double>& row, AggregatedSignal& signal) {
    for (int t = 0; t < tensor.num_frames(); ++t) {
        double acc = 0.0;
        for (int m = 0; m < tensor.num_views(); ++m) acc += row[static_cast<size_t>(m)] * tensor.at(t, class_id, m);
        signal.at(t, 0) = acc;
    }
}

// Filter / merge / select one class of an aggregated one-class signal.
std::optional<ActionSegment> elect_single_class(const AggregatedSignal& signal, int class_id,
                                                double threshold, int gap_frames,
                                                const TimeBase& tb) {
    auto candidates = filter_candidates(signal, {threshold});
    auto merged = merge_candidates(std::move(candidates[0]), gap_frames, signal);
    const auto selections = select_segments({merged}, signal, tb, Fallback::kArgmaxPeak);
    if (!selections[0]) return std::nullopt;
    ActionSegment seg = selections[0]->segment;
    seg.class_id = class_id;
    return seg;
}

double pooled(const std::vector<ClassScore>& scores) {
    double num = 0.0;
    long long den = 0;
    for (const auto& s : scores) {
        num += s.numerator;
        den += s.denominator;
    }
    return den == 0 ? 0.0 : num / static_cast<double>(den);
}

// Corpus score of a config over a list of videos.
double score_config(const std::vector<const SyntheticVideo*>& videos, const ElectionConfig& cfg) {
    std::vector<SegmentSet> gt, pred;
    for (const auto* video : videos) {
        gt.push_back(video->scenario.ground_truth);
        pred.push_back(elect(video->tensor, cfg, video->video_id));
    }
    return evaluate_sets(gt, pred).corpus_score;
}

}  // namespace

AblationResult ablation_run(const std::vector<SyntheticVideo>& corpus) {
    if (corpus.empty()) throw ConfigError("ablation: corpus must not be empty");
    const int num_classes = corpus.front().tensor.num_classes();
    const int num_views = corpus.front().tensor.num_views();
    const double fps = corpus.front().fps;
    const TimeBase tb(fps);

    AblationResult result;
    std::vector<const SyntheticVideo*> tuning, test;
    for (size_t i = 0; i < corpus.size(); ++i)
        (i % 2 == 0 ? tuning : test).push_back(&corpus[i]);
    if (test.empty()) {
        test = tuning;
        result.small_sample = true;
    }
    result.tuning_videos = static_cast<int>(tuning.size());
    result.test_videos = static_cast<int>(test.size());

    // Shared precomputation: per (video, class) one-class slices of the
    // uniform-weight aggregation, plus per-class ground truth.
    const std::vector<double> uniform_weights(
        static_cast<size_t>(num_classes) * num_views, 1.0 / num_views);
    const std::vector<double> uniform_row(static_cast<size_t>(num_views), 1.0 / num_views);
    std::vector<std::vector<AggregatedSignal>> tuning_slices(tuning.size());
    std::vector<std::vector<SegmentSet>> tuning_gt(tuning.size());
    for (size_t v = 0; v < tuning.size(); ++v) {
        tuning_slices[v].reserve(static_cast<size_t>(num_classes));
        tuning_gt[v].resize(static_cast<size_t>(num_classes),
                            SegmentSet{tuning[v]->video_id, {}});
        for (int c = 0; c < num_classes; ++c) {
            AggregatedSignal one(tuning[v]->tensor.num_frames(), 1);
            aggregate_class_slice(tuning[v]->tensor, c, uniform_row, one);
            tuning_slices[v].push_back(std::move(one));
        }
        for (const auto& s : tuning[v]->scenario.ground_truth.segments)
            tuning_gt[v][static_cast<size_t>(s.class_id)].segments.push_back(s);
    }

    // Pooled tuning-split contribution of one class under one (threshold,
    // gap) choice, through the same per-class pipeline the variants use.
    auto class_scores_for = [&](double threshold, int class_id, int gap_frames) {
        ClassScore total;
        for (size_t v = 0; v < tuning.size(); ++v) {
            const auto seg = elect_single_class(tuning_slices[v][static_cast<size_t>(class_id)],
                                                class_id, threshold, gap_frames, tb);
            SegmentSet pred{tuning[v]->video_id, {}};
            if (seg) pred.segments.push_back(*seg);
            const MatchResult r =
                match_optimal(tuning_gt[v][static_cast<size_t>(class_id)], pred);
            total.numerator += r.total_score;
            total.denominator += static_cast<long long>(r.pairs.size() + r.unmatched_gt.size() +
                                                        r.unmatched_pred.size());
        }
        return total;
    };

    // Variant 1: single uniform threshold, no merging, uniform weights.
    double best_single = kThresholdGrid[0];
    double best_single_score = -1.0;
    for (double threshold : kThresholdGrid) {
        std::vector<ClassScore> scores;
        for (int c = 0; c < num_classes; ++c) scores.push_back(class_scores_for(threshold, c, 0));
        const double s = pooled(scores);
        if (s > best_single_score) {
            best_single_score = s;
            best_single = threshold;
        }
    }
    result.tuned_single_threshold = best_single;

    // Variants 2 and 3: per-class thresholds tuned jointly with the merge
    // gap. A class departs from the shared single threshold only when that
    // wins by kTuneMargin. The gap 0 column is variant 2's operating point;
    // the best column overall (ties favor no merge) is variant 3's.
    double best_gap = kGapGrid[0];
    double best_gap_score = -1.0;
    for (double gap_s : kGapGrid) {
        const int gap_frames = static_cast<int>(round_half_away(gap_s * fps));
        std::vector<double> thresholds(static_cast<size_t>(num_classes), best_single);
        std::vector<ClassScore> scores;
        for (int c = 0; c < num_classes; ++c) {
            ClassScore class_score = class_scores_for(best_single, c, gap_frames);
            double class_best =
                (class_score.denominator == 0
                     ? 0.0
                     : class_score.numerator / static_cast<double>(class_score.denominator)) +
                kTuneMargin;
            for (double threshold : kThresholdGrid) {
                if (threshold == best_single) continue;
                const ClassScore s = class_scores_for(threshold, c, gap_frames);
                const double value =
                    s.denominator == 0 ? 0.0 : s.numerator / static_cast<double>(s.denominator);
                if (value > class_best) {
                    class_best = value;
                    class_score = s;
                    thresholds[static_cast<size_t>(c)] = threshold;
                }
            }
            scores.push_back(class_score);
        }
        const double s = pooled(scores);
        if (gap_s == 0.0) result.tuned_thresholds = thresholds;
        if (s > best_gap_score) {
            best_gap_score = s;
            best_gap = gap_s;
            result.tuned_merge_thresholds = thresholds;
        }
    }
    result.tuned_merge_gap_s = best_gap;
    const int tuned_gap_frames = static_cast<int>(round_half_away(best_gap * fps));

    // Variant 4: per-class weight rows over a coarse simplex grid
    // (uniform, vertices, pairwise midpoints), thresholds and gap fixed.
    std::vector<std::vector<double>> weight_options;
    weight_options.push_back(std::vector<double>(static_cast<size_t>(num_views), 1.0 / num_views));
    for (int m = 0; m < num_views; ++m) {
        std::vector<double> row(static_cast<size_t>(num_views), 0.0);
        row[static_cast<size_t>(m)] = 1.0;
        weight_options.push_back(row);
    }
    for (int a = 0; a < num_views; ++a) {
        for (int b = a + 1; b < num_views; ++b) {
            std::vector<double> row(static_cast<size_t>(num_views), 0.0);
            row[static_cast<size_t>(a)] = 0.5;
            row[static_cast<size_t>(b)] = 0.5;
            weight_options.push_back(row);
        }
    }

    // A non-uniform row must beat uniform aggregation by kTuneMargin on the
    // tuning split; uniform is option 0.
    result.tuned_weights = uniform_weights;
    for (int c = 0; c < num_classes; ++c) {
        const double threshold = result.tuned_merge_thresholds[static_cast<size_t>(c)];
        double best_score = -1.0;
        size_t best_option = 0;
        for (size_t option = 0; option < weight_options.size(); ++option) {
            ClassScore total;
            for (size_t v = 0; v < tuning.size(); ++v) {
                AggregatedSignal one(tuning[v]->tensor.num_frames(), 1);
                aggregate_class_slice(tuning[v]->tensor, c, weight_options[option], one);
                const auto seg = elect_single_class(one, c, threshold, tuned_gap_frames, tb);
                SegmentSet pred{tuning[v]->video_id, {}};
                if (seg) pred.segments.push_back(*seg);
                const MatchResult r =
                    match_optimal(tuning_gt[v][static_cast<size_t>(c)], pred);
                total.numerator += r.total_score;
                total.denominator += static_cast<long long>(r.pairs.size() + r.unmatched_gt.size() +
                                                            r.unmatched_pred.size());
            }
            const double value = total.denominator == 0
                                     ? 0.0
                                     : total.numerator / static_cast<double>(total.denominator);
            if (value > best_score) {
                best_score = value;
                best_option = option;
            }
            if (option == 0) best_score += kTuneMargin;
        }
        for (int m = 0; m < num_views; ++m)
            result.tuned_weights[static_cast<size_t>(c) * num_views + m] =
                weight_options[best_option][static_cast<size_t>(m)];
    }

    // Score the four cumulative variants on the test split.
    ElectionConfig cfg = ElectionConfig::uniform(num_classes, num_views, fps, best_single, 0.0);
    result.scores[0] = score_config(test, cfg);

    cfg.thresholds = result.tuned_thresholds;
    result.scores[1] = score_config(test, cfg);

    cfg.thresholds = result.tuned_merge_thresholds;
    cfg.merge_gap_s = result.tuned_merge_gap_s;
    result.scores[2] = score_config(test, cfg);

    cfg.weights = result.tuned_weights;
    result.scores[3] = score_config(test, cfg);
    return result;
}

AblationResult ablation_run(const std::vector<Scenario>& corpus) {
    if (corpus.empty()) throw ConfigError("ablation: corpus must not be empty");
    std::vector<SyntheticVideo> videos(corpus.size());
    int width = 1;
    for (size_t v = corpus.size() - 1; v >= 10; v /= 10) ++width;
    for (size_t i = 0; i < corpus.size(); ++i) {
        std::string id = std::to_string(i);
        id.insert(0, static_cast<size_t>(width) - id.size(), '0');
        id.insert(0, "video_");
        videos[i].video_id = id;
        videos[i].seed = corpus[i].seed;
        videos[i].fps = corpus[i].tb.fps;
        videos[i].scenario = gen_scenario(corpus[i], id);
        videos[i].tensor = emit_probabilities(videos[i].scenario, corpus[i]);
    }
    return ablation_run(videos);
}

// ---------------------------------------------------------------------------
// Scenario JSON

CorpusSpec parse_scenario_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("scenario") || !j["scenario"].is_object())
        throw ConfigError(origin + ": expected an object with a 'scenario' key");
    const auto& s = j["scenario"];

    auto number = [&](const char* key, double fallback) {
        if (!s.contains(key)) return fallback;
        if (!s[key].is_number()) throw ConfigError(std::string("scenario.") + key + ": must be a number");
        return s[key].get<double>();
    };
    auto range = [&](const char* key, SecondsRange fallback) {
        if (!s.contains(key)) return fallback;
        const auto& r = s[key];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
            throw ConfigError(std::string("scenario.") + key + ": must be a [lo, hi] number pair");
        return SecondsRange{r[0].get<double>(), r[1].get<double>()};
    };

    CorpusSpec spec;
    if (s.contains("seed")) {
        if (!s["seed"].is_number_integer() && !s["seed"].is_number_unsigned())
            throw ConfigError("scenario.seed: must be an integer");
        spec.base.seed = s["seed"].get<uint64_t>();
    }
    if (s.contains("num_videos")) {
        if (!s["num_videos"].is_number_integer())
            throw ConfigError("scenario.num_videos: must be an integer");
        spec.num_videos = s["num_videos"].get<int>();
        if (spec.num_videos < 1) throw ConfigError("scenario.num_videos: must be >= 1");
    }
    int num_classes = 16;
    if (s.contains("num_classes")) {
        if (!s["num_classes"].is_number_integer())
            throw ConfigError("scenario.num_classes: must be an integer");
        num_classes = s["num_classes"].get<int>();
        if (num_classes < 1) throw ConfigError("scenario.num_classes: must be >= 1");
    }
    spec.base.labels =
        num_classes == 16 ? LabelSet::driver_actions() : LabelSet::generic(num_classes);
    if (s.contains("num_views")) {
        if (!s["num_views"].is_number_integer())
            throw ConfigError("scenario.num_views: must be an integer");
        spec.base.num_views = s["num_views"].get<int>();
    }
    spec.base.video_len_s = number("video_len_s", spec.base.video_len_s);
    const double fps = number("fps", 30.0);
    try {
        spec.base.tb = TimeBase(fps);
    } catch (const RangeError&) {
        throw ConfigError("scenario.fps: must be > 0");
    }
    spec.base.noise_sigma = number("noise_sigma", spec.base.noise_sigma);
    spec.base.pause_prob = number("pause_prob", spec.base.pause_prob);
    spec.base.distractor_prob = number("distractor_prob", spec.base.distractor_prob);
    spec.base.pause_len_s = range("pause_len_s", spec.base.pause_len_s);
    spec.base.duration_s = range("duration_s", spec.base.duration_s);

    if (s.contains("discriminability")) {
        const auto& d = s["discriminability"];
        if (!d.is_array() || d.size() != static_cast<size_t>(num_classes))
            throw ConfigError("scenario.discriminability: must be an array of num_classes rows");
        spec.base.discriminability.clear();
        for (const auto& row : d) {
            if (!row.is_array() || row.size() != static_cast<size_t>(spec.base.num_views))
                throw ConfigError("scenario.discriminability: rows must hold num_views numbers");
            for (const auto& cell : row) {
                if (!cell.is_number())
                    throw ConfigError("scenario.discriminability: values must be numbers");
                spec.base.discriminability.push_back(cell.get<double>());
            }
        }
    }
    spec.base.check();
    return spec;
}

CorpusSpec read_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str(), path);
}

}  // namespace mvtal
