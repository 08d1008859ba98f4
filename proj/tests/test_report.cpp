// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>
#include <vector>

#include "mvtal/report.hpp"
#include "mvtal/synthesis.hpp"

using namespace mvtal;

namespace {

// Minimal XML well-formedness check: every opened tag closes in order and
// the document is a single rooted element.
bool well_formed_xml(const std::string& text) {
    std::vector<std::string> stack;
    size_t pos = 0;
    bool seen_root = false;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        const size_t end = text.find('>', pos);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?') continue;  // declaration
        if (tag[0] == '/') {
            if (stack.empty()) return false;
            const std::string name = tag.substr(1);
            if (stack.back() != name) return false;
            stack.pop_back();
            continue;
        }
        if (seen_root && stack.empty()) return false;  // second root
        seen_root = true;
        if (tag.back() == '/') continue;  // self-closing
        const size_t space = tag.find_first_of(" \t\n");
        stack.push_back(space == std::string::npos ? tag : tag.substr(0, space));
    }
    return stack.empty() && seen_root;
}

}  // namespace

TEST_CASE("all-zero tensor renders flat curves without regions or star") {
    ProbabilityTensor tensor(300, 2, 3);
    const ElectionConfig cfg = ElectionConfig::uniform(2, 3);
    const std::string svg = election_svg_string(tensor, cfg, 0, std::nullopt);

    CHECK(well_formed_xml(svg));
    CHECK(svg.find("viewBox") != std::string::npos);
    CHECK(svg.find("fill-opacity=\"0.15\"") == std::string::npos);  // no candidate region
    CHECK(svg.find("#ffd700") == std::string::npos);                // no star
}

TEST_CASE("worked election example renders one region and a star") {
    const int K = 2, M = 3, T = 900;
    ProbabilityTensor tensor(T, K, M);
    for (int f = 150; f <= 449; ++f)
        for (int m = 0; m < M; ++m) tensor.at(f, 0, m) = 1.0;
    const ElectionConfig cfg = ElectionConfig::uniform(K, M);

    const ActionSegment gt(0, 5.0, 15.0);
    const std::string svg = election_svg_string(tensor, cfg, 0, gt);
    CHECK(well_formed_xml(svg));
    CHECK(svg.find("fill-opacity=\"0.15\"") != std::string::npos);
    CHECK(svg.find("#ffd700") != std::string::npos);  // star for the winner
    CHECK(svg.find("stroke-dasharray=\"8,3,2,3\"") != std::string::npos);  // gt boundaries
    CHECK(svg.find("stroke-dasharray=\"6,4\"") != std::string::npos);      // threshold line

    // A class decided purely by fallback renders no star.
    const std::string other = election_svg_string(tensor, cfg, 1, std::nullopt);
    CHECK(other.find("#ffd700") == std::string::npos);
}

TEST_CASE("svg output is deterministic and bounds-checked") {
    Scenario scenario;
    scenario.seed = 4;
    scenario.video_len_s = 60.0;
    scenario.labels = LabelSet::generic(3);
    scenario.duration_s = {4.0, 8.0};
    const auto generated = gen_scenario(scenario, "v");
    const ProbabilityTensor tensor = emit_probabilities(generated, scenario);
    const ElectionConfig cfg = ElectionConfig::uniform(3, 3, 30.0, 0.35);

    CHECK(election_svg_string(tensor, cfg, 2, std::nullopt) ==
          election_svg_string(tensor, cfg, 2, std::nullopt));
    CHECK_THROWS_AS(election_svg_string(tensor, cfg, 3, std::nullopt), RangeError);
    CHECK_THROWS_AS(election_svg_string(tensor, cfg, -1, std::nullopt), RangeError);
}
