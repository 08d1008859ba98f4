// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>

#include "mvtal/io_formats.hpp"
#include "mvtal/synthesis.hpp"
#include "test_util.hpp"

using namespace mvtal;
using mvtal_test::TempDir;
using mvtal_test::get_file;
using mvtal_test::put_file;

namespace {

ProbabilityTensor random_tensor(SplitMix64& rng, int max_dim = 6) {
    const int T = static_cast<int>(rng.uniform_int(1, max_dim * 4));
    const int K = static_cast<int>(rng.uniform_int(1, max_dim));
    const int M = static_cast<int>(rng.uniform_int(1, max_dim));
    ProbabilityTensor t(T, K, M);
    for (int f = 0; f < T; ++f)
        for (int c = 0; c < K; ++c)
            for (int m = 0; m < M; ++m) t.at(f, c, m) = rng.uniform01();
    return t;
}

}  // namespace

TEST_CASE("tensor csv smallest well-formed file") {
    TempDir dir;
    put_file(dir.file("t.csv"), "frame,view,p0,p1\n0,0,0.1,0.9\n1,0,0.5,0.5\n");
    const ProbabilityTensor t = read_tensor_csv(dir.file("t.csv"), 2, 1);
    CHECK(t.num_frames() == 2);
    CHECK(t.num_classes() == 2);
    CHECK(t.num_views() == 1);
    CHECK(t.at(0, 1, 0) == 0.9);
    CHECK(t.at(1, 0, 0) == 0.5);
}

TEST_CASE("tensor csv canonical writer output") {
    ProbabilityTensor t(1, 1, 1);
    t.at(0, 0, 0) = 0.5;
    CHECK(tensor_csv_string(t) == "frame,view,p0\n0,0,0.5\n");

    // The canonical formatter prints 1.0 as "1", consistently.
    t.at(0, 0, 0) = 1.0;
    CHECK(tensor_csv_string(t) == "frame,view,p0\n0,0,1\n");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0625) == "0.0625");
}

TEST_CASE("tensor csv format errors name the line") {
    TempDir dir;

    put_file(dir.file("range.csv"), "frame,view,p0\n0,0,1.2\n");
    CHECK_THROWS_WITH_AS(read_tensor_csv(dir.file("range.csv"), 1, 1),
                         doctest::Contains("range.csv:2"), FormatError);

    put_file(dir.file("missing.csv"), "frame,view,p0\n0,0,0.5\n0,0,0.5\n");
    CHECK_THROWS_AS(read_tensor_csv(dir.file("missing.csv"), 1, 2), FormatError);

    put_file(dir.file("header.csv"), "frame,view,p0,p1\n");
    CHECK_THROWS_AS(read_tensor_csv(dir.file("header.csv"), 1, 1), FormatError);

    put_file(dir.file("short.csv"), "frame,view,p0,p1\n0,0,0.5\n");
    CHECK_THROWS_AS(read_tensor_csv(dir.file("short.csv"), 2, 1), FormatError);

    CHECK_THROWS_AS(read_tensor_csv(dir.file("does_not_exist.csv"), 1, 1), IoError);
}

TEST_CASE("tensor csv round trip is exact") {
    TempDir dir;
    SplitMix64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const ProbabilityTensor t = random_tensor(rng);
        const std::string path = dir.file("roundtrip.csv");
        write_tensor_csv(t, path);
        const ProbabilityTensor back = read_tensor_csv(path, t.num_classes(), t.num_views());
        CHECK(back == t);
        // Second write is byte identical.
        const std::string first = get_file(path);
        write_tensor_csv(back, path);
        CHECK(get_file(path) == first);
    }
}

TEST_CASE("segments csv basics") {
    TempDir dir;
    put_file(dir.file("s.csv"), "video_id,class_id,start_s,end_s\nv1,5,10.0,15.0\n");
    auto sets = read_segments_csv(dir.file("s.csv"));
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].video_id == "v1");
    REQUIRE(sets[0].segments.size() == 1);
    CHECK(sets[0].segments[0] == ActionSegment(5, 10.0, 15.0));

    put_file(dir.file("two.csv"),
             "video_id,class_id,start_s,end_s\nv1,0,1,2\nv2,1,3,4\nv1,2,5,6\n");
    sets = read_segments_csv(dir.file("two.csv"));
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].video_id == "v1");
    CHECK(sets[0].segments.size() == 2);
    CHECK(sets[1].video_id == "v2");
}

TEST_CASE("segments csv rejects bad rows") {
    TempDir dir;
    put_file(dir.file("inv.csv"), "video_id,class_id,start_s,end_s\nv1,5,15.0,10.0\n");
    CHECK_THROWS_WITH_AS(read_segments_csv(dir.file("inv.csv")), doctest::Contains("inv.csv:2"),
                         FormatError);

    put_file(dir.file("cls.csv"), "video_id,class_id,start_s,end_s\nv1,9,1.0,2.0\n");
    const LabelSet labels = LabelSet::generic(4);
    CHECK_THROWS_AS(read_segments_csv(dir.file("cls.csv"), &labels), FormatError);
    CHECK_NOTHROW(read_segments_csv(dir.file("cls.csv")));
}

TEST_CASE("segments csv writer sorts and round trips") {
    TempDir dir;
    std::vector<SegmentSet> sets = {
        {"vb", {ActionSegment(1, 7.0, 9.0), ActionSegment(0, 1.5, 3.25)}},
        {"va", {ActionSegment(2, 0.5, 2.0)}},
    };
    const std::string path = dir.file("sorted.csv");
    write_segments_csv(sets, path);
    CHECK(get_file(path) ==
          "video_id,class_id,start_s,end_s\nva,2,0.5,2\nvb,0,1.5,3.25\nvb,1,7,9\n");

    const auto back = read_segments_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].video_id == "va");
    CHECK(back[1].segments[0] == ActionSegment(0, 1.5, 3.25));

    // Empty set list writes a header-only file.
    write_segments_csv({}, path);
    CHECK(get_file(path) == "video_id,class_id,start_s,end_s\n");

    // write -> read -> write is byte identical on random data.
    SplitMix64 rng(23);
    for (int i = 0; i < 40; ++i) {
        std::vector<SegmentSet> random_sets;
        const int num_videos = static_cast<int>(rng.uniform_int(0, 3));
        for (int v = 0; v < num_videos; ++v) {
            SegmentSet set;
            set.video_id = "video_" + std::to_string(rng.uniform_int(0, 5));
            const int n = static_cast<int>(rng.uniform_int(1, 6));
            for (int s = 0; s < n; ++s) {
                const double start = rng.uniform(0.0, 400.0);
                set.segments.emplace_back(static_cast<int>(rng.uniform_int(0, 15)), start,
                                          start + rng.uniform(0.01, 40.0));
            }
            random_sets.push_back(std::move(set));
        }
        write_segments_csv(random_sets, path);
        const std::string first = get_file(path);
        write_segments_csv(read_segments_csv(path), path);
        CHECK(get_file(path) == first);
    }
}

TEST_CASE("config defaults and normalization") {
    TempDir dir;
    put_file(dir.file("minimal.json"), R"({"num_classes": 4, "num_views": 3})");
    ElectionConfig cfg = read_config(dir.file("minimal.json"));
    CHECK(cfg.num_classes == 4);
    CHECK(cfg.num_views == 3);
    CHECK(cfg.tb.fps == 30.0);
    CHECK(cfg.merge_gap_s == 0.5);
    CHECK(cfg.fallback == Fallback::kArgmaxPeak);
    for (int c = 0; c < 4; ++c) {
        CHECK(cfg.thresholds[static_cast<size_t>(c)] == 0.5);
        for (int m = 0; m < 3; ++m) CHECK(cfg.weight(c, m) == 1.0 / 3.0);
    }

    put_file(dir.file("weights.json"),
             R"({"num_classes": 1, "num_views": 3, "weights": [[2, 1, 1]]})");
    cfg = read_config(dir.file("weights.json"));
    CHECK(cfg.weight(0, 0) == 0.5);
    CHECK(cfg.weight(0, 1) == 0.25);
    CHECK(cfg.weight(0, 2) == 0.25);

    put_file(dir.file("broadcast.json"),
             R"({"num_classes": 3, "num_views": 1, "thresholds": 0.4})");
    cfg = read_config(dir.file("broadcast.json"));
    for (int c = 0; c < 3; ++c) CHECK(cfg.thresholds[static_cast<size_t>(c)] == 0.4);
}

TEST_CASE("config errors name the offending key") {
    TempDir dir;
    put_file(dir.file("thr.json"), R"({"num_classes": 1, "num_views": 1, "thresholds": 1.5})");
    CHECK_THROWS_WITH_AS(read_config(dir.file("thr.json")), doctest::Contains("thresholds"),
                         ConfigError);

    put_file(dir.file("neg.json"),
             R"({"num_classes": 1, "num_views": 2, "weights": [[0.5, -0.1]]})");
    CHECK_THROWS_WITH_AS(read_config(dir.file("neg.json")), doctest::Contains("weights"),
                         ConfigError);

    put_file(dir.file("nok.json"), R"({"num_views": 2})");
    CHECK_THROWS_WITH_AS(read_config(dir.file("nok.json")), doctest::Contains("num_classes"),
                         ConfigError);

    put_file(dir.file("fb.json"), R"({"num_classes": 1, "num_views": 1, "fallback": "retry"})");
    CHECK_THROWS_WITH_AS(read_config(dir.file("fb.json")), doctest::Contains("fallback"),
                         ConfigError);
}

TEST_CASE("config json write -> read -> write is byte identical") {
    TempDir dir;
    SplitMix64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const int K = static_cast<int>(rng.uniform_int(1, 6));
        const int M = static_cast<int>(rng.uniform_int(1, 4));
        ElectionConfig cfg;
        cfg.tb = TimeBase(rng.uniform(1.0, 60.0));
        cfg.num_classes = K;
        cfg.num_views = M;
        cfg.weights.resize(static_cast<size_t>(K) * M);
        for (auto& w : cfg.weights) w = rng.uniform(0.0, 2.0) + 1e-3;
        cfg.thresholds.resize(static_cast<size_t>(K));
        for (auto& t : cfg.thresholds) t = rng.uniform(0.05, 0.95);
        cfg.merge_gap_s = rng.uniform(0.0, 3.0);
        cfg.fallback = rng.uniform01() < 0.5 ? Fallback::kNone : Fallback::kArgmaxPeak;
        cfg.normalize_and_check();

        const std::string path = dir.file("cfg.json");
        write_config(cfg, path);
        const std::string first = get_file(path);
        write_config(read_config(path), path);
        CHECK(get_file(path) == first);
    }
}

TEST_CASE("extract clips frame arithmetic") {
    const TimeBase tb(30.0);
    SegmentSet ann{"v", {ActionSegment(3, 1.0, 2.0)}};
    const auto clips = extract_clips(ann, tb, 14400);
    REQUIRE(clips.size() == 1);
    CHECK(clips[0] == ClipSample{"v", 3, 30, 59});
}

TEST_CASE("extract clips discards nothing but unannotated regions") {
    const TimeBase tb(30.0);
    CHECK(extract_clips({"v", {}}, tb, 300).empty());

    SegmentSet ann{"v", {ActionSegment(0, 0.5, 2.0), ActionSegment(1, 5.0, 7.5)}};
    const auto clips = extract_clips(ann, tb, 300);
    REQUIRE(clips.size() == 2);
    CHECK(clips[0].start_frame == 15);
    CHECK(clips[0].end_frame == 59);
    CHECK(clips[1].start_frame == 150);
    CHECK(clips[1].end_frame == 224);

    long long total = 0;
    for (const auto& clip : clips) total += clip.end_frame - clip.start_frame + 1;
    CHECK(total <= 300);
}

TEST_CASE("extract clips range check") {
    const TimeBase tb(30.0);
    SegmentSet ann{"v", {ActionSegment(0, 5.0, 11.0)}};
    CHECK_THROWS_AS(extract_clips(ann, tb, 300), RangeError);  // video is 10 s long
}
