// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvtal/domain.hpp"
#include "mvtal/io_formats.hpp"
#include "mvtal/windowing.hpp"

namespace mvtal {

// Deterministic 64-bit generator: splitmix64 (golden-gamma state increment,
// Stafford mix 13). Uniform doubles take the top 53 bits; normals come from
// the Box-Muller transform on two uniforms. Seeding scheme for corpora:
// video i uses (base_seed XOR i).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inclusive bounds.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(next() % static_cast<uint64_t>(hi - lo + 1));
    }

    double normal();

private:
    uint64_t state_;
};

struct SecondsRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Parameters of one synthetic video: a once-per-class ground-truth schedule
// plus the discriminability/noise knobs that shape the emitted tensor.
struct Scenario {
    uint64_t seed = 0;
    double video_len_s = 480.0;
    LabelSet labels = LabelSet::driver_actions();
    TimeBase tb{30.0};
    int num_views = 3;
    std::vector<double> discriminability;  // K*M in [0,1]; empty -> skewed default
    double noise_sigma = 0.08;
    double pause_prob = 0.3;
    SecondsRange pause_len_s{0.6, 2.0};
    SecondsRange duration_s{5.0, 30.0};
    double distractor_prob = 0.2;

    int num_classes() const { return labels.size(); }
    int num_frames() const { return static_cast<int>(round_half_away(video_len_s * tb.fps)); }
    double disc(int c, int m) const {
        return discriminability[static_cast<size_t>(c) * num_views + m];
    }

    void check() const;

    // Default view-skewed discriminability: each class has one informative
    // view (round robin) whose strength cycles through strong / medium /
    // weak tiers; the remaining views stay weakly informative.
    static std::vector<double> skewed_discriminability(int num_classes, int num_views);

    // Clean corpus: every view fully discriminative, no noise, no pauses,
    // no distractors. Election should recover ground truth up to rounding.
    static Scenario noiseless(int num_classes = 16, int num_views = 3);
};

struct Pause {
    double start_s = 0.0;
    double len_s = 0.0;
};

// One scheduled action with its hidden mid-action pause, if any. The pause
// interrupts the emitted signal only; ground truth keeps the full span.
struct TimelineEntry {
    ActionSegment segment;
    std::optional<Pause> pause;
};

struct GeneratedScenario {
    SegmentSet ground_truth;  // schedule order
    std::vector<TimelineEntry> timeline;
};

// Draws one non-overlapping schedule with every class exactly once, in
// shuffled order, durations uniform in range and at least one second
// between actions. Resamples durations up to 100 times before giving up.
GeneratedScenario gen_scenario(const Scenario& params, const std::string& video_id = "video");

// Emits the frame-level per-view probability tensor for a generated
// schedule: in-action frames score the true class near its per-view
// discriminability, pause and gap frames are near uniform, and distractor
// bursts episodically elevate a wrong class in a single view. The noise
// model (smoothed Gaussian plus bursts) is an invented stand-in for a real
// recognizer's error statistics, not a fit to any dataset.
ProbabilityTensor emit_probabilities(const GeneratedScenario& generated, const Scenario& params);

struct SyntheticVideo {
    std::string video_id;
    uint64_t seed = 0;
    double fps = 30.0;
    GeneratedScenario scenario;
    ProbabilityTensor tensor;
};

// num_videos independent videos from per-video seeds (base.seed XOR index).
std::vector<SyntheticVideo> generate_corpus(const Scenario& base, int num_videos,
                                            int threads = 1);

// Scores clips by averaging a reference frame-level tensor over the window,
// clamped to the video extent. This is the concrete ClipScorer used to
// exercise the sliding-window machinery against synthetic videos.
class TensorClipScorer : public ClipScorer {
public:
    explicit TensorClipScorer(const ProbabilityTensor& tensor) : tensor_(&tensor) {}
    std::vector<double> score(const std::string& video_id, int view, int start_frame,
                              const WindowSpec& spec) const override;

private:
    const ProbabilityTensor* tensor_;
};

// The four ablation variants, cumulative left to right.
inline constexpr std::array<const char*, 4> kAblationVariantNames = {
    "SEL",
    "SEL+FLTR",
    "SEL+FLTR+MRG",
    "SEL+FLTR+MRG+AGG",
};

// Reference overlap scores of the full-scale system this pipeline models,
// reported alongside desk-scale results for qualitative comparison only.
inline constexpr std::array<double, 4> kReferenceFullScaleScores = {0.4683, 0.5347, 0.5565,
                                                                    0.5921};

struct AblationResult {
    std::array<double, 4> scores{};             // test-split corpus scores per variant
    double tuned_single_threshold = 0.0;        // variant 1
    std::vector<double> tuned_thresholds;       // variant 2 (no merge)
    std::vector<double> tuned_merge_thresholds; // variants 3 and 4
    double tuned_merge_gap_s = 0.0;             // variants 3 and 4
    std::vector<double> tuned_weights;          // variant 4, K*M
    bool small_sample = false;                  // tuning split == test split
    int tuning_videos = 0;
    int test_videos = 0;
};

// Runs the four cumulative variants over a generated corpus: even-index
// videos tune thresholds, merge gap and per-class view weights (thresholds
// jointly with the gap they will run under); odd-index videos provide the
// reported scores.
AblationResult ablation_run(const std::vector<SyntheticVideo>& corpus);

// Convenience overload matching the scenario-list form: generates each
// video first (scenario i keeps its own seed).
AblationResult ablation_run(const std::vector<Scenario>& corpus);

// Scenario JSON: {"scenario": {...}} with optional keys seed, num_videos,
// video_len_s, num_classes, num_views, fps, discriminability, noise_sigma,
// pause_prob, pause_len_s, duration_s, distractor_prob.
struct CorpusSpec {
    Scenario base;
    int num_videos = 20;
};
CorpusSpec read_scenario(const std::string& path);
CorpusSpec parse_scenario_json(const std::string& text, const std::string& origin);

}  // namespace mvtal
