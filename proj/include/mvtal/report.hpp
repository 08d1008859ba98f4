// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "mvtal/domain.hpp"
#include "mvtal/io_formats.hpp"

namespace mvtal {

// Standalone SVG for one class: per-view probability curves with opacity
// proportional to their aggregation weight, the aggregated curve, a dashed
// threshold line, shaded super-threshold candidate regions, optional
// dash-dot ground-truth boundaries, and a star at the midpoint of the
// winning candidate. Fallback emissions draw no star.
std::string election_svg_string(const ProbabilityTensor& tensor, const ElectionConfig& config,
                                int class_id, const std::optional<ActionSegment>& gt);

void render_election_svg(const ProbabilityTensor& tensor, const ElectionConfig& config,
                         int class_id, const std::optional<ActionSegment>& gt,
                         const std::string& out_path);

}  // namespace mvtal
