// SPDX-License-Identifier: Apache-2.0
#include "mvtal/domain.hpp"

#include <algorithm>

namespace mvtal {

LabelSet LabelSet::generic(int num_classes) {
    if (num_classes < 1) throw RangeError("LabelSet: need at least one class");
    LabelSet ls;
    ls.labels.reserve(static_cast<size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c)
        ls.labels.push_back({c, "class_" + std::to_string(c)});
    return ls;
}

LabelSet LabelSet::driver_actions() {
    static const char* kNames[16] = {
        "Forward Driving",
        "Drinking",
        "Phone Call (Right)",
        "Phone Call (Left)",
        "Eating",
        "Text (Right)",
        "Text (Left)",
        "Reaching behind",
        "Adjust control panel",
        "Pick up from floor (Driver)",
        "Pick up from floor (Passenger)",
        "Talk to passenger at the right",
        "Talk to passenger at backseat",
        "Yawning",
        "Hand on head",
        "Singing or dancing with music",
    };
    LabelSet ls;
    ls.labels.reserve(16);
    for (int c = 0; c < 16; ++c) ls.labels.push_back({c, kNames[c]});
    return ls;
}

void ProbabilityTensor::validate() const {
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw RangeError("ProbabilityTensor: values must be finite and within [0, 1]");
    }
}

IntervalOverlap interval_overlap_seconds(double a_start, double a_end,
                                         double b_start, double b_end) {
    if (!(a_start < a_end) || !(b_start < b_end))
        throw RangeError("interval_overlap_seconds: intervals must satisfy start < end");
    IntervalOverlap o;
    o.intersection_s = std::max(std::min(a_end, b_end) - std::max(a_start, b_start), 0.0);
    o.union_s = std::max(a_end, b_end) - std::min(a_start, b_start);
    return o;
}

}  // namespace mvtal
