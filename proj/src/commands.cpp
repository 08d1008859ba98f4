// SPDX-License-Identifier: Apache-2.0
#include "mvtal/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "mvtal/election.hpp"
#include "mvtal/evaluation.hpp"
#include "mvtal/io_formats.hpp"
#include "mvtal/report.hpp"
#include "mvtal/synthesis.hpp"

namespace mvtal {

namespace {

// Writes through a sibling temp file and renames, so a failure never leaves
// a partial output behind.
void write_whole_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError(path + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(path + ": rename failed");
    }
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}

std::string path_stem(const std::string& path) {
    const std::string stem = std::filesystem::path(path).stem().string();
    return stem.empty() ? "video" : stem;
}

}  // namespace

int cmd_elect(const std::string& tensor_path, const std::string& config_path,
              const std::string& out_path) {
    return guarded([&] {
        const ElectionConfig config = read_config(config_path);
        const ProbabilityTensor tensor =
            read_tensor_csv(tensor_path, config.num_classes, config.num_views);
        const ElectionOutcome outcome =
            elect_detailed(tensor, config, path_stem(tensor_path));

        write_whole_file(out_path, segments_csv_string({outcome.segments}));

        for (int c = 0; c < config.num_classes; ++c) {
            const auto& sel = outcome.selections[static_cast<size_t>(c)];
            if (!sel) {
                std::printf("class %-2d  no candidates\n", c);
                continue;
            }
            std::printf("class %-2d  %s -> %s s  mean %s%s\n", c,
                        format_double(sel->segment.start_s).c_str(),
                        format_double(sel->segment.end_s).c_str(),
                        format_fixed(sel->mean_score, 4).c_str(),
                        sel->from_fallback ? "  (argmax-peak fallback)" : "");
        }
    });
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path,
             const std::string& report_path) {
    return guarded([&] {
        const CorpusEvaluation evaluation = evaluate_files(gt_path, pred_path);
        write_whole_file(report_path, evaluation_report_json(evaluation));
        std::printf("%s\n", format_fixed(evaluation.corpus_score, 4).c_str());
    });
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<uint64_t> seed_override, int threads) {
    return guarded([&] {
        CorpusSpec spec = read_scenario(scenario_path);
        if (seed_override) spec.base.seed = *seed_override;
        const auto corpus = generate_corpus(spec.base, spec.num_videos, threads);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError(out_dir + ": cannot create output directory");

        std::string manifest = "{\n  \"seed\": " + std::to_string(spec.base.seed) +
                               ",\n  \"fps\": " + format_double(spec.base.tb.fps) +
                               ",\n  \"num_videos\": " + std::to_string(spec.num_videos) +
                               ",\n  \"gt_csv\": \"gt_segments.csv\",\n  \"videos\": [";
        std::vector<SegmentSet> gt;
        for (size_t i = 0; i < corpus.size(); ++i) {
            const auto& video = corpus[i];
            // Named <video_id>.csv so an elect run over this tensor labels its
            // output rows with the matching ground-truth video id.
            const std::string tensor_name = video.video_id + ".csv";
            write_whole_file((std::filesystem::path(out_dir) / tensor_name).string(),
                             tensor_csv_string(video.tensor));
            gt.push_back(video.scenario.ground_truth);
            manifest += i == 0 ? "\n" : ",\n";
            manifest += "    {\"video_id\": \"" + video.video_id + "\", \"seed\": " +
                        std::to_string(video.seed) + ", \"tensor_csv\": \"" + tensor_name +
                        "\", \"num_frames\": " + std::to_string(video.tensor.num_frames()) + "}";
        }
        manifest += "\n  ]\n}\n";
        write_whole_file((std::filesystem::path(out_dir) / "gt_segments.csv").string(),
                         segments_csv_string(gt));
        write_whole_file((std::filesystem::path(out_dir) / "manifest.json").string(), manifest);
        std::printf("wrote %d videos to %s\n", static_cast<int>(corpus.size()), out_dir.c_str());
    });
}

int cmd_ablate(const std::string& scenario_path, const std::string& report_path,
               std::optional<uint64_t> seed_override, int threads) {
    return guarded([&] {
        CorpusSpec spec = read_scenario(scenario_path);
        if (seed_override) spec.base.seed = *seed_override;
        if (spec.num_videos < 2)
            std::fprintf(stderr,
                         "warning: %d-video corpus is too small for a held-out split; "
                         "tuning and test sets coincide\n",
                         spec.num_videos);
        const auto corpus = generate_corpus(spec.base, spec.num_videos, threads);
        const AblationResult result = ablation_run(corpus);

        std::string report = "variant           score   reference\n";
        for (size_t v = 0; v < kAblationVariantNames.size(); ++v) {
            std::string name = kAblationVariantNames[v];
            name.resize(18, ' ');
            report += name + format_fixed(result.scores[v], 4) + "  " +
                      format_fixed(kReferenceFullScaleScores[v], 4) + "\n";
        }
        report += "\nreference column: overlap scores of the full-scale system on the";
        report += "\noriginal challenge data; desk-scale synthetic scores reproduce the";
        report += "\nstep ordering, not the absolute values.\n";
        report += "\ntuned_single_threshold " + format_double(result.tuned_single_threshold) + "\n";
        report += "tuned_thresholds";
        for (double t : result.tuned_thresholds) report += " " + format_double(t);
        report += "\ntuned_merge_gap_s " + format_double(result.tuned_merge_gap_s) + "\n";
        report += "tuning_videos " + std::to_string(result.tuning_videos) + "\n";
        report += "test_videos " + std::to_string(result.test_videos) + "\n";
        if (result.small_sample) report += "small_sample_warning true\n";
        write_whole_file(report_path, report);

        for (size_t v = 0; v < kAblationVariantNames.size(); ++v)
            std::printf("%-18s%s\n", kAblationVariantNames[v],
                        format_fixed(result.scores[v], 4).c_str());
    });
}

int cmd_viz(const std::string& tensor_path, const std::string& config_path, int class_id,
            const std::optional<std::string>& gt_path,
            const std::optional<std::string>& gt_video_id, const std::string& out_path) {
    return guarded([&] {
        const ElectionConfig config = read_config(config_path);
        const ProbabilityTensor tensor =
            read_tensor_csv(tensor_path, config.num_classes, config.num_views);

        std::optional<ActionSegment> gt;
        if (gt_path) {
            const auto sets = read_segments_csv(*gt_path);
            for (const auto& set : sets) {
                if (gt_video_id && set.video_id != *gt_video_id) continue;
                for (const auto& seg : set.segments) {
                    if (seg.class_id == class_id) {
                        gt = seg;
                        break;
                    }
                }
                if (gt || gt_video_id) break;
            }
        }
        write_whole_file(out_path, election_svg_string(tensor, config, class_id, gt));
    });
}

}  // namespace mvtal
