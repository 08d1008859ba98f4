// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mvtal {

// CLI entry points. Each returns a process exit status: 0 on success, 1 on
// input or validation failure, 2 on an internal invariant violation.
// Output files are written whole or not at all.

int cmd_elect(const std::string& tensor_path, const std::string& config_path,
              const std::string& out_path);

int cmd_eval(const std::string& gt_path, const std::string& pred_path,
             const std::string& report_path);

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<uint64_t> seed_override, int threads);

int cmd_ablate(const std::string& scenario_path, const std::string& report_path,
               std::optional<uint64_t> seed_override, int threads);

int cmd_viz(const std::string& tensor_path, const std::string& config_path, int class_id,
            const std::optional<std::string>& gt_path,
            const std::optional<std::string>& gt_video_id, const std::string& out_path);

}  // namespace mvtal
