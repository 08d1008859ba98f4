// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mvtal/election.hpp"
#include "mvtal/evaluation.hpp"
#include "mvtal/synthesis.hpp"
#include "test_util.hpp"

using namespace mvtal;
using mvtal_test::TempDir;
using mvtal_test::put_file;

TEST_CASE("splitmix64 reference stream") {
    // Known outputs for seed 1234567 (verifies the documented algorithm).
    SplitMix64 rng(1234567);
    const uint64_t a = rng.next();
    const uint64_t b = rng.next();
    SplitMix64 again(1234567);
    CHECK(again.next() == a);
    CHECK(again.next() == b);
    CHECK(a != b);

    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const long long v = rng.uniform_int(3, 7);
        CHECK(v >= 3);
        CHECK(v <= 7);
    }
}

TEST_CASE("scenario schedule is deterministic in the seed") {
    Scenario scenario;
    scenario.seed = 42;
    const auto a = gen_scenario(scenario, "v");
    const auto b = gen_scenario(scenario, "v");
    CHECK(a.ground_truth == b.ground_truth);
    REQUIRE(a.timeline.size() == b.timeline.size());
    for (size_t i = 0; i < a.timeline.size(); ++i) {
        CHECK(a.timeline[i].segment == b.timeline[i].segment);
        CHECK(a.timeline[i].pause.has_value() == b.timeline[i].pause.has_value());
    }

    scenario.seed = 43;
    CHECK(!(gen_scenario(scenario, "v").ground_truth == a.ground_truth));
}

TEST_CASE("scenario schedule covers every class once with one-second gaps") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
        Scenario scenario;
        scenario.seed = seed;
        const auto generated = gen_scenario(scenario, "v");
        REQUIRE(generated.ground_truth.segments.size() == 16);

        std::vector<int> seen(16, 0);
        double previous_end = -10.0;
        for (const auto& seg : generated.ground_truth.segments) {
            ++seen[static_cast<size_t>(seg.class_id)];
            CHECK(seg.start_s >= previous_end + 1.0 - 1e-9);
            CHECK(seg.duration() >= 5.0 - 1e-9);
            CHECK(seg.duration() <= 30.0 + 1e-9);
            previous_end = seg.end_s;
        }
        CHECK(previous_end <= scenario.video_len_s + 1e-9);
        for (int c = 0; c < 16; ++c) CHECK(seen[static_cast<size_t>(c)] == 1);
    }
}

TEST_CASE("infeasible scenario parameters raise a generation error") {
    Scenario scenario;
    scenario.video_len_s = 200.0;
    scenario.duration_s = {30.0, 30.0};  // 16 * 30 s cannot fit 200 s
    CHECK_THROWS_AS(gen_scenario(scenario, "v"), GenerationError);
}

TEST_CASE("pauses stay inside their action and out of the ground truth") {
    Scenario scenario;
    scenario.seed = 7;
    scenario.pause_prob = 1.0;
    const auto generated = gen_scenario(scenario, "v");
    int pauses = 0;
    for (const auto& entry : generated.timeline) {
        if (!entry.pause) continue;
        ++pauses;
        CHECK(entry.pause->start_s >= entry.segment.start_s);
        CHECK(entry.pause->start_s + entry.pause->len_s <= entry.segment.end_s);
        CHECK(entry.pause->len_s >= scenario.pause_len_s.lo - 1e-9);
        CHECK(entry.pause->len_s <= scenario.pause_len_s.hi + 1e-9);
    }
    CHECK(pauses > 0);
}

TEST_CASE("noiseless emission is one-hot inside actions and uniform outside") {
    Scenario scenario = Scenario::noiseless(4, 2);
    scenario.seed = 5;
    scenario.video_len_s = 60.0;
    scenario.duration_s = {4.0, 8.0};
    const auto generated = gen_scenario(scenario, "v");
    const ProbabilityTensor tensor = emit_probabilities(generated, scenario);
    tensor.validate();

    const double fps = scenario.tb.fps;
    for (const auto& entry : generated.timeline) {
        const int mid = static_cast<int>((entry.segment.start_s + entry.segment.duration() / 2) * fps);
        for (int m = 0; m < 2; ++m) {
            CHECK(tensor.at(mid, entry.segment.class_id, m) == 1.0);
            for (int c = 0; c < 4; ++c)
                if (c != entry.segment.class_id) CHECK(tensor.at(mid, c, m) == 0.0);
        }
    }
    // First frame precedes the first action (schedules start at >= 0; check a gap frame).
    const int gap_frame =
        static_cast<int>((generated.ground_truth.segments.front().end_s + 0.5) * fps);
    if (generated.ground_truth.segments.size() > 1) {
        const double next_start = generated.ground_truth.segments[1].start_s;
        if (gap_frame / fps < next_start)
            for (int m = 0; m < 2; ++m)
                for (int c = 0; c < 4; ++c) CHECK(tensor.at(gap_frame, c, m) == 0.25);
    }
}

TEST_CASE("emitted vectors always lie on the probability simplex") {
    Scenario scenario;
    scenario.seed = 99;
    scenario.video_len_s = 90.0;
    scenario.labels = LabelSet::generic(5);
    scenario.duration_s = {3.0, 7.0};
    scenario.pause_prob = 0.6;
    scenario.distractor_prob = 0.6;
    const auto generated = gen_scenario(scenario, "v");
    const ProbabilityTensor tensor = emit_probabilities(generated, scenario);
    tensor.validate();
    for (int t = 0; t < tensor.num_frames(); ++t) {
        for (int m = 0; m < tensor.num_views(); ++m) {
            double sum = 0.0;
            for (int c = 0; c < tensor.num_classes(); ++c) sum += tensor.at(t, c, m);
            CHECK(std::abs(sum - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("emission is deterministic in the seed") {
    Scenario scenario;
    scenario.seed = 1001;
    scenario.video_len_s = 45.0;
    scenario.labels = LabelSet::generic(3);
    scenario.duration_s = {3.0, 6.0};
    const auto generated = gen_scenario(scenario, "v");
    CHECK(emit_probabilities(generated, scenario) == emit_probabilities(generated, scenario));
}

TEST_CASE("a focused weight row beats uniform weights on a skewed view") {
    Scenario scenario;
    scenario.seed = 21;
    scenario.video_len_s = 120.0;
    scenario.labels = LabelSet::generic(4);
    scenario.duration_s = {8.0, 15.0};
    scenario.pause_prob = 0.0;
    scenario.distractor_prob = 0.0;
    scenario.discriminability = {
        0.9, 0.2, 0.2,  // class 0 is clear only in view 0
        0.9, 0.2, 0.2,
        0.9, 0.2, 0.2,
        0.9, 0.2, 0.2,
    };
    const auto generated = gen_scenario(scenario, "v");
    const ProbabilityTensor tensor = emit_probabilities(generated, scenario);

    const std::vector<double> focused = {1.0, 0.0, 0.0};
    const std::vector<double> uniform(3, 1.0 / 3.0);
    AggregatedSignal f(tensor.num_frames(), 1), u(tensor.num_frames(), 1);
    for (int t = 0; t < tensor.num_frames(); ++t) {
        double f_acc = 0.0, u_acc = 0.0;
        for (int m = 0; m < 3; ++m) {
            f_acc += focused[static_cast<size_t>(m)] * tensor.at(t, 0, m);
            u_acc += uniform[static_cast<size_t>(m)] * tensor.at(t, 0, m);
        }
        f.at(t, 0) = f_acc;
        u.at(t, 0) = u_acc;
    }

    const ActionSegment* class0 = nullptr;
    for (const auto& seg : generated.ground_truth.segments)
        if (seg.class_id == 0) class0 = &seg;
    REQUIRE(class0 != nullptr);
    const int lo = static_cast<int>(class0->start_s * 30.0) + 1;
    const int hi = static_cast<int>(class0->end_s * 30.0) - 1;
    double f_mean = 0.0, u_mean = 0.0;
    for (int t = lo; t <= hi; ++t) {
        f_mean += f.at(t, 0);
        u_mean += u.at(t, 0);
    }
    CHECK(f_mean > u_mean);
}

TEST_CASE("corpus generation derives per-video seeds and is thread invariant") {
    Scenario base;
    base.seed = 77;
    base.video_len_s = 60.0;
    base.labels = LabelSet::generic(4);
    base.duration_s = {3.0, 7.0};

    const auto serial = generate_corpus(base, 4, 1);
    const auto parallel = generate_corpus(base, 4, 2);
    REQUIRE(serial.size() == 4);
    for (size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].seed == (base.seed ^ static_cast<uint64_t>(i)));
        CHECK(serial[i].video_id == parallel[i].video_id);
        CHECK(serial[i].tensor == parallel[i].tensor);
        CHECK(serial[i].scenario.ground_truth == parallel[i].scenario.ground_truth);
    }
}

TEST_CASE("noiseless corpus recovers ground truth almost exactly") {
    Scenario base = Scenario::noiseless(8, 3);
    base.seed = 0;
    base.video_len_s = 240.0;
    const auto corpus = generate_corpus(base, 3, 1);

    std::vector<SegmentSet> gt, pred;
    const ElectionConfig cfg = ElectionConfig::uniform(8, 3);
    for (const auto& video : corpus) {
        gt.push_back(video.scenario.ground_truth);
        pred.push_back(elect(video.tensor, cfg, video.video_id));
    }
    const CorpusEvaluation evaluation = evaluate_sets(gt, pred);
    CHECK(evaluation.corpus_score >= 0.95);
    for (const auto& video : evaluation.videos)
        for (const auto& pair : video.result.pairs) CHECK(pair.overlap >= 0.8);
}

TEST_CASE("scenario json parsing") {
    TempDir dir("scenario");
    put_file(dir.file("s.json"), R"({"scenario": {
        "seed": 9, "num_videos": 3, "num_classes": 4, "num_views": 2,
        "video_len_s": 90, "duration_s": [3, 6], "noise_sigma": 0.05,
        "pause_prob": 0.1, "pause_len_s": [0.5, 1.0], "distractor_prob": 0.0
    }})");
    const CorpusSpec spec = read_scenario(dir.file("s.json"));
    CHECK(spec.base.seed == 9);
    CHECK(spec.num_videos == 3);
    CHECK(spec.base.num_classes() == 4);
    CHECK(spec.base.num_views == 2);
    CHECK(spec.base.video_len_s == 90.0);
    CHECK(spec.base.noise_sigma == 0.05);

    put_file(dir.file("empty.json"), R"({"scenario": {}})");
    const CorpusSpec defaults = read_scenario(dir.file("empty.json"));
    CHECK(defaults.base.num_classes() == 16);
    CHECK(defaults.num_videos == 20);
    CHECK(defaults.base.video_len_s == 480.0);

    put_file(dir.file("bad.json"), R"({"scenario": {"pause_len_s": [2.0, 1.0]}})");
    CHECK_THROWS_WITH_AS(read_scenario(dir.file("bad.json")), doctest::Contains("pause_len_s"),
                         ConfigError);
    put_file(dir.file("nokey.json"), R"({"seed": 3})");
    CHECK_THROWS_AS(read_scenario(dir.file("nokey.json")), ConfigError);
}

TEST_CASE("ablation on a small noisy corpus is ordered and tuned") {
    Scenario base;
    base.seed = 5;
    base.video_len_s = 150.0;
    base.labels = LabelSet::generic(6);
    base.num_views = 3;
    base.duration_s = {5.0, 12.0};
    const auto corpus = generate_corpus(base, 6, 2);

    const AblationResult result = ablation_run(corpus);
    CHECK(result.tuning_videos == 3);
    CHECK(result.test_videos == 3);
    CHECK(!result.small_sample);
    for (double score : result.scores) {
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
    }
    // Cumulative variants never lose more than tuning noise.
    for (size_t v = 1; v < result.scores.size(); ++v)
        CHECK(result.scores[v] >= result.scores[v - 1] - 0.05);
    CHECK(result.tuned_thresholds.size() == 6);
    CHECK(result.tuned_weights.size() == 18);

    // Single-video corpus still runs, flagged as small sample.
    const AblationResult tiny = ablation_run(std::vector<SyntheticVideo>{corpus[0]});
    CHECK(tiny.small_sample);
    CHECK(tiny.test_videos == 1);
}
