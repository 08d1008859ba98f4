// SPDX-License-Identifier: Apache-2.0
//
// mvtal: election post-processing, overlap-score evaluation and synthetic
// benchmark generation for multi-view temporal action localization.

#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mvtal/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"multi-view temporal action localization toolkit"};
    app.require_subcommand(1);

    std::string tensor_path, config_path, out_path, gt_path, pred_path, scenario_path;
    std::string gt_video_id;
    int class_id = 0;
    int threads = 1;
    uint64_t seed = 0;
    bool seed_given = false;

    auto* elect = app.add_subcommand("elect", "run the election pipeline over a tensor CSV");
    elect->add_option("--tensor", tensor_path, "probability tensor CSV")->required();
    elect->add_option("--config", config_path, "election config JSON")->required();
    elect->add_option("--out", out_path, "output segments CSV")->required();

    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--gt", gt_path, "ground-truth segments CSV")->required();
    eval->add_option("--pred", pred_path, "predicted segments CSV")->required();
    eval->add_option("--out", out_path, "output evaluation report JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic corpus");
    simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
    simulate->add_option("--out", out_path, "output directory")->required();
    simulate->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    simulate->add_option("--threads", threads, "cap worker threads");

    auto* ablate = app.add_subcommand("ablate", "run the four-step ablation study");
    ablate->add_option("--scenario", scenario_path, "scenario JSON")->required();
    ablate->add_option("--out", out_path, "output report path")->required();
    ablate->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    ablate->add_option("--threads", threads, "cap worker threads");

    auto* viz = app.add_subcommand("viz", "render the election of one class as SVG");
    viz->add_option("--tensor", tensor_path, "probability tensor CSV")->required();
    viz->add_option("--config", config_path, "election config JSON")->required();
    viz->add_option("--class", class_id, "class id to plot")->required();
    viz->add_option("--gt", gt_path, "optional ground-truth segments CSV");
    viz->add_option("--video-id", gt_video_id, "ground-truth video to plot from");
    viz->add_option("--out", out_path, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    const std::optional<uint64_t> seed_override =
        seed_given ? std::optional<uint64_t>(seed) : std::nullopt;

    if (elect->parsed()) return mvtal::cmd_elect(tensor_path, config_path, out_path);
    if (eval->parsed()) return mvtal::cmd_eval(gt_path, pred_path, out_path);
    if (simulate->parsed()) return mvtal::cmd_simulate(scenario_path, out_path, seed_override, threads);
    if (ablate->parsed()) return mvtal::cmd_ablate(scenario_path, out_path, seed_override, threads);
    if (viz->parsed())
        return mvtal::cmd_viz(tensor_path, config_path, class_id,
                              gt_path.empty() ? std::nullopt : std::optional<std::string>(gt_path),
                              gt_video_id.empty() ? std::nullopt
                                                  : std::optional<std::string>(gt_video_id),
                              out_path);
    return 1;
}
