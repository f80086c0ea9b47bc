#pragma once

#include <string>
#include <vector>

namespace vbench {

// Flat real-valued descriptor tagged with the extractor that produced it.
struct FeatureVector {
    std::string extractor;
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

} // namespace vbench
